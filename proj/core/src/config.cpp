#include "fsrec/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "fsrec/errors.hpp"
#include "fsrec/text.hpp"

namespace fsrec {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& values, F&& fmt) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out += ',';
    out += fmt(values[k]);
  }
  return out;
}

bool parse_bool(std::string_view text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key, "expected true/false, got '" + std::string(text) + "'");
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }
std::string fmt_size(std::size_t v) { return std::to_string(v); }

struct KeyHandler {
  ConfigKeyInfo info;
  std::function<void(ExperimentConfig&, std::string_view, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define FSREC_DOUBLE_KEY(name, field, doc)                                                                   \
  KeyHandler {                                                                                                \
    {name, "", doc}, [](ExperimentConfig& c, std::string_view v, const std::string& k) { c.field = parse_double(v, k); }, \
        [](const ExperimentConfig& c) { return format_double(c.field); }                                    \
  }
#define FSREC_SIZE_KEY(name, field, doc)                                                                    \
  KeyHandler {                                                                                               \
    {name, "", doc},                                                                                         \
        [](ExperimentConfig& c, std::string_view v, const std::string& k) {                                 \
          c.field = static_cast<std::size_t>(parse_uint(v, k));                                              \
        },                                                                                                   \
        [](const ExperimentConfig& c) { return fmt_size(c.field); }                                         \
  }

const std::vector<KeyHandler>& handlers() {
  static const std::vector<KeyHandler> table = [] {
    std::vector<KeyHandler> h = {
        {{"corpus.min_items", "", "drop users with fewer labeled items than this"},
         [](ExperimentConfig& c, std::string_view v, const std::string& k) {
           c.corpus.min_items = static_cast<std::size_t>(parse_uint(v, k));
         },
         [](const ExperimentConfig& c) { return fmt_size(c.corpus.min_items); }},
        {{"corpus.require_friends", "", "drop users without friends (iterated to a fixed point)"},
         [](ExperimentConfig& c, std::string_view v, const std::string& k) {
           c.corpus.require_friends = parse_bool(v, k);
         },
         [](const ExperimentConfig& c) { return fmt_bool(c.corpus.require_friends); }},
        FSREC_DOUBLE_KEY("corpus.test_fraction", corpus.test_fraction,
                         "per-user fraction of items held out for testing, in (0, 1)"),
        FSREC_SIZE_KEY("clustering.clusters", clustering.num_clusters, "number of user clusters C"),
        FSREC_DOUBLE_KEY("clustering.fuzzifier", clustering.fuzzifier, "fuzzy C-means exponent m, > 1"),
        FSREC_SIZE_KEY("clustering.max_iter", clustering.max_iter, "clustering iteration cap"),
        FSREC_DOUBLE_KEY("clustering.tol", clustering.tol, "stop when the objective improves by less than this"),
        FSREC_DOUBLE_KEY("affinity.lambda", lambda, "hard-similarity weight for same-cluster friends, in (0, 1)"),
        {{"affinity.sim_norm", "", "averaging domain of pairwise item cosines: cotag | catalog"},
         [](ExperimentConfig& c, std::string_view v, const std::string&) { c.sim_norm = parse_sim_norm(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.sim_norm)); }},
        FSREC_DOUBLE_KEY("train.eta", train.eta, "SGD learning rate"),
        FSREC_DOUBLE_KEY("train.alpha", train.alpha, "user-item correlation coefficient"),
        FSREC_DOUBLE_KEY("train.beta", train.beta, "social similarity coefficient"),
        FSREC_DOUBLE_KEY("train.lambda1", train.lambda1, "L2 weight on user factors"),
        FSREC_DOUBLE_KEY("train.lambda2", train.lambda2, "L2 weight on item factors"),
        FSREC_SIZE_KEY("train.latent_dim", train.latent_dim, "latent dimension l"),
        FSREC_SIZE_KEY("train.max_iter", train.max_iter, "epoch cap"),
        FSREC_DOUBLE_KEY("train.conv_tol", train.conv_tol, "relative loss change that counts as converged"),
        FSREC_DOUBLE_KEY("train.init_scale", train.init_scale, "factors start uniform in [-init_scale, init_scale]"),
        {{"train.scalar_mode", "", "factorization target per cell: tag-count | binary"},
         [](ExperimentConfig& c, std::string_view v, const std::string&) {
           c.train.scalar_mode = parse_scalar_mode(v);
         },
         [](const ExperimentConfig& c) { return std::string(to_string(c.train.scalar_mode)); }},
        {{"train.update_mode", "", "social gradient granularity: per-entry | epoch-social"},
         [](ExperimentConfig& c, std::string_view v, const std::string&) {
           c.train.update_mode = parse_update_mode(v);
         },
         [](const ExperimentConfig& c) { return std::string(to_string(c.train.update_mode)); }},
        {{"train.grad_form", "", "user gradient: exact derivative of the loss | one-sided (u -> f direction only)"},
         [](ExperimentConfig& c, std::string_view v, const std::string&) {
           c.train.gradient_form = parse_gradient_form(v);
         },
         [](const ExperimentConfig& c) { return std::string(to_string(c.train.gradient_form)); }},
        {{"eval.ks", "", "comma-separated cut-offs k for P@k and R@k"},
         [](ExperimentConfig& c, std::string_view v, const std::string& k) {
           c.ks.clear();
           for (auto piece : split_list(v)) c.ks.push_back(static_cast<std::size_t>(parse_uint(piece, k)));
         },
         [](const ExperimentConfig& c) { return join(c.ks, fmt_size); }},
        FSREC_SIZE_KEY("eval.neighbors", neighbors, "u-CF neighborhood size"),
        {{"run.seed", "", "seed for clustering, factor init and the split"},
         [](ExperimentConfig& c, std::string_view v, const std::string& k) { c.seed = parse_uint(v, k); },
         [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
        {{"run.model", "", "pop | ucf | soreg | rsbosn | frsbosn"},
         [](ExperimentConfig& c, std::string_view v, const std::string&) { c.model = parse_model_kind(v); },
         [](const ExperimentConfig& c) { return std::string(to_string(c.model)); }},
        {{"sweep.parameter", "", "swept parameter: alpha | beta | latent_dim"},
         [](ExperimentConfig& c, std::string_view v, const std::string&) {
           c.sweep.parameter = parse_sweep_parameter(v);
         },
         [](const ExperimentConfig& c) { return std::string(to_string(c.sweep.parameter)); }},
        {{"sweep.values", "", "comma-separated values of the swept parameter"},
         [](ExperimentConfig& c, std::string_view v, const std::string& k) {
           c.sweep.values.clear();
           for (auto piece : split_list(v)) c.sweep.values.push_back(parse_double(piece, k));
         },
         [](const ExperimentConfig& c) { return join(c.sweep.values, format_double); }},
        {{"sweep.models", "", "comma-separated models to sweep"},
         [](ExperimentConfig& c, std::string_view v, const std::string&) {
           c.sweep.models.clear();
           for (auto piece : split_list(v)) c.sweep.models.push_back(parse_model_kind(piece));
         },
         [](const ExperimentConfig& c) {
           return join(c.sweep.models, [](ModelKind m) { return std::string(to_string(m)); });
         }},
    };
    const ExperimentConfig defaults;
    for (auto& k : h) k.info.default_value = k.get(defaults);
    return h;
  }();
  return table;
}

#undef FSREC_DOUBLE_KEY
#undef FSREC_SIZE_KEY

const KeyHandler& handler_for(std::string_view key) {
  const auto& h = handlers();
  auto it = std::find_if(h.begin(), h.end(), [&](const KeyHandler& k) { return k.info.key == key; });
  if (it == h.end()) throw ConfigError(std::string(key), "unknown configuration key");
  return *it;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kPop: return "pop";
    case ModelKind::kUcf: return "ucf";
    case ModelKind::kSoReg: return "soreg";
    case ModelKind::kRSboSN: return "rsbosn";
    case ModelKind::kFRSboSN: return "frsbosn";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  for (auto k : {ModelKind::kPop, ModelKind::kUcf, ModelKind::kSoReg, ModelKind::kRSboSN, ModelKind::kFRSboSN}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("model", "unknown model '" + std::string(text) + "' (pop | ucf | soreg | rsbosn | frsbosn)");
}

bool is_factor_model(ModelKind kind) {
  return kind == ModelKind::kSoReg || kind == ModelKind::kRSboSN || kind == ModelKind::kFRSboSN;
}

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kAlpha: return "alpha";
    case SweepParameter::kBeta: return "beta";
    case SweepParameter::kLatentDim: return "latent_dim";
  }
  return "?";
}

SweepParameter parse_sweep_parameter(std::string_view text) {
  if (text == "alpha") return SweepParameter::kAlpha;
  if (text == "beta") return SweepParameter::kBeta;
  if (text == "latent_dim") return SweepParameter::kLatentDim;
  throw ConfigError("sweep.parameter", "unknown sweep parameter '" + std::string(text) + "' (alpha | beta | latent_dim)");
}

void ExperimentConfig::validate() const {
  if (!(corpus.test_fraction > 0.0 && corpus.test_fraction < 1.0)) {
    throw ConfigError("corpus.test_fraction", "must lie in (0, 1)");
  }
  if (clustering.num_clusters < 1) throw ConfigError("clustering.clusters", "must be >= 1");
  if (!(clustering.fuzzifier > 1.0)) throw ConfigError("clustering.fuzzifier", "must be > 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("affinity.lambda", "must lie in (0, 1)");
  if (ks.empty()) throw ConfigError("eval.ks", "at least one cut-off is required");
  for (auto k : ks) {
    if (k == 0) throw ConfigError("eval.ks", "cut-offs must be >= 1");
  }
  if (sweep.values.empty()) throw ConfigError("sweep.values", "at least one value is required");
  if (sweep.models.empty()) throw ConfigError("sweep.models", "at least one model is required");
  try {
    train.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("train." + e.key(), "invalid value");
  }
}

TrainingConfig ExperimentConfig::training() const {
  TrainingConfig t = train;
  t.seed = seed;
  return t;
}

ClusterParams ExperimentConfig::cluster_params() const {
  ClusterParams p = clustering;
  p.seed = seed;
  return p;
}

const std::vector<ConfigKeyInfo>& config_keys() {
  static const std::vector<ConfigKeyInfo> keys = [] {
    std::vector<ConfigKeyInfo> out;
    for (const auto& h : handlers()) out.push_back(h.info);
    return out;
  }();
  return keys;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const auto& h = handler_for(key);
  try {
    h.set(cfg, trim(value), h.info.key);
  } catch (const ConfigError& e) {
    // Re-key errors raised by shared parsers so the message names the full key.
    if (e.key() == h.info.key) throw;
    throw ConfigError(h.info.key, e.what());
  }
}

std::string get_config_value(const ExperimentConfig& cfg, std::string_view key) { return handler_for(key).get(cfg); }

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string name(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const std::string key = name.find('.') != std::string::npos || section.empty() ? name : section + "." + name;
    set_config_value(base, key, value);
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  std::string section;
  for (const auto& h : handlers()) {
    const auto dot = h.info.key.find('.');
    const std::string sec = h.info.key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    out << h.info.key.substr(dot + 1) << " = " << h.get(cfg) << '\n';
  }
}

const std::vector<PresetInfo>& preset_names() {
  static const std::vector<PresetInfo> names = {
      {"default", "library defaults (eta = lambda1 = lambda2 = 0.5, C = 10, l = 80, alpha = beta = 0.01)"},
      {"paper-compare", "method comparison: l = 80, alpha = 0.01, beta = 0.01"},
      {"paper-beta-sweep", "P@1 over beta in {0.0001, 0.001, 0.01, 0.1, 0.3} for rsbosn and frsbosn"},
      {"paper-alpha-sweep", "P@1 over alpha in {0.0001, 0.001, 0.01, 0.1, 0.2, 0.3}, l = 30"},
      {"paper-dim-sweep", "P@1 over l in {30, 40, ..., 120}, alpha = beta = 0.01"},
      {"desk-synthetic", "desk-scale training settings for generated corpora (small eta, small initial factors)"},
  };
  return names;
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  // Constants shared by the experiment presets. lambda stays at the
  // 0.8 used for the hard similarity; 0.5 is the alternative experiment value.
  c.train.eta = 0.5;
  c.train.lambda1 = 0.5;
  c.train.lambda2 = 0.5;
  c.clustering.num_clusters = 10;
  if (name == "default") return c;
  if (name == "paper-compare") {
    c.train.latent_dim = 80;
    c.train.alpha = 0.01;
    c.train.beta = 0.01;
    c.ks = {1, 3, 5};
    return c;
  }
  if (name == "paper-beta-sweep") {
    c.sweep.parameter = SweepParameter::kBeta;
    c.sweep.values = {0.0001, 0.001, 0.01, 0.1, 0.3};
    c.sweep.models = {ModelKind::kRSboSN, ModelKind::kFRSboSN};
    c.ks = {1};
    return c;
  }
  if (name == "paper-alpha-sweep") {
    c.train.latent_dim = 30;
    c.train.beta = 0.01;
    c.sweep.parameter = SweepParameter::kAlpha;
    c.sweep.values = {0.0001, 0.001, 0.01, 0.1, 0.2, 0.3};
    c.sweep.models = {ModelKind::kRSboSN, ModelKind::kFRSboSN};
    c.ks = {1};
    return c;
  }
  if (name == "paper-dim-sweep") {
    c.train.alpha = 0.01;
    c.train.beta = 0.01;
    c.sweep.parameter = SweepParameter::kLatentDim;
    c.sweep.values = {30, 40, 50, 60, 70, 80, 90, 100, 110, 120};
    c.sweep.models = {ModelKind::kRSboSN, ModelKind::kFRSboSN};
    c.ks = {1};
    return c;
  }
  if (name == "desk-synthetic") {
    c.clustering.num_clusters = 2;
    c.train.eta = 0.02;
    c.train.lambda1 = 0.05;
    c.train.lambda2 = 0.05;
    c.train.latent_dim = 10;
    c.train.max_iter = 100;
    c.train.init_scale = 0.01;
    c.train.scalar_mode = ScalarMode::kBinary;
    c.ks = {1, 3, 5};
    return c;
  }
  throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
}

}  // namespace fsrec

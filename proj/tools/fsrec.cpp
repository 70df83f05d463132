// fsrec command-line front end: gen-synthetic -> ingest -> cluster -> train
// -> evaluate -> sweep, plus replay of any run from its manifest.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fsrec/checkpoint.hpp"
#include "fsrec/errors.hpp"
#include "fsrec/pipeline.hpp"
#include "fsrec/synthetic.hpp"
#include "fsrec/text.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Files of an ingested corpus directory, in checksum order.
const std::vector<std::string> kCorpusFiles = {"interactions.tsv", "friendships.tsv", "users.tsv",
                                               "items.tsv",        "tags.tsv",        "split.tsv"};

struct CommonOptions {
  std::string config_path;
  std::string preset = "default";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  std::string out_dir;
  std::map<std::string, std::string> key_flags;
};

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw fsrec::IoError("input file '" + path + "' does not exist");
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw fsrec::IoError("cannot write '" + path.string() + "'");
  return out;
}

// Records inputs and outputs of one command and writes manifest.json.
class Run {
 public:
  Run(std::string command, std::vector<std::string> args)
      : command_(std::move(command)), args_(std::move(args)), start_(std::chrono::steady_clock::now()) {}

  void input(const std::string& path) {
    require_file(path);
    inputs_[path] = fsrec::file_checksum(path);
  }
  void output(const fs::path& path) { outputs_.push_back(path); }

  void finish(const fs::path& out_dir, const fsrec::ExperimentConfig& cfg) const {
    ordered_json m;
    m["tool"] = "fsrec";
    m["version"] = kVersion;
    m["command"] = command_;
    m["args"] = args_;
    m["seed"] = cfg.seed;
    ordered_json config = ordered_json::object();
    for (const auto& info : fsrec::config_keys()) config[info.key] = fsrec::get_config_value(cfg, info.key);
    m["config"] = config;
    m["inputs"] = inputs_;
    ordered_json outs = ordered_json::object();
    for (const auto& p : outputs_) outs[p.filename().string()] = fsrec::file_checksum(p.string());
    m["outputs"] = outs;
    m["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    auto out = open_out(out_dir / "manifest.json");
    out << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::chrono::steady_clock::time_point start_;
  std::map<std::string, std::string> inputs_;
  std::vector<fs::path> outputs_;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_config_keys) {
  cmd->add_option("--out-dir", opts.out_dir, "directory for outputs and manifest.json")->required();
  cmd->add_option("--seed", opts.seed, "run seed (run.seed)");
  if (!with_config_keys) return;
  cmd->add_option("--config", opts.config_path, "config file of `key = value` lines");
  cmd->add_option("--preset", opts.preset, "built-in preset applied before the config file");
  cmd->add_option("--set", opts.sets, "override one key: --set section.key=value (repeatable)");
  for (const auto& info : fsrec::config_keys()) {
    cmd->add_option("--" + info.key, opts.key_flags[info.key], info.doc);
  }
}

fsrec::ExperimentConfig resolve_config(const CLI::App* cmd, const CommonOptions& opts, Run& run) {
  fsrec::ExperimentConfig cfg = fsrec::preset(opts.preset);
  if (!opts.config_path.empty()) {
    run.input(opts.config_path);
    cfg = fsrec::load_config(opts.config_path, cfg);
  }
  for (const auto& s : opts.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw fsrec::ConfigError(s, "--set expects key=value");
    fsrec::set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& info : fsrec::config_keys()) {
    if (cmd->count("--" + info.key) > 0) fsrec::set_config_value(cfg, info.key, opts.key_flags.at(info.key));
  }
  if (opts.seed) cfg.seed = *opts.seed;
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------- corpus dir

struct LoadedCorpus {
  fsrec::Corpus corpus;
  fsrec::FriendshipGraph graph;
  fsrec::DataSplit split;
  std::string checksum;
};

std::string corpus_checksum(const fs::path& dir) {
  std::string joined;
  for (const auto& name : kCorpusFiles) {
    joined += name + "=" + fsrec::file_checksum((dir / name).string()) + "\n";
  }
  return fsrec::bytes_checksum(joined);
}

fsrec::IdMap read_map(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw fsrec::IoError("cannot open '" + path.string() + "'");
  return fsrec::read_id_map(in);
}

LoadedCorpus load_corpus_dir(const fs::path& dir, Run& run) {
  for (const auto& name : kCorpusFiles) run.input((dir / name).string());
  LoadedCorpus out;
  fsrec::Corpus seed;
  seed.users = read_map(dir / "users.tsv");
  seed.items = read_map(dir / "items.tsv");
  seed.tags = read_map(dir / "tags.tsv");
  out.corpus = fsrec::load_interactions((dir / "interactions.tsv").string(), std::move(seed));
  out.graph = fsrec::load_friendships((dir / "friendships.tsv").string(), out.corpus.users);

  std::ifstream in(dir / "split.tsv");
  std::string line;
  std::uint64_t split_seed = 0;
  std::vector<std::pair<fsrec::UserId, fsrec::ItemId>> pairs;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("# seed\t", 0) == 0) {
      split_seed = fsrec::parse_uint(line.substr(7), "split.seed");
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw fsrec::ParseError(line_no, "split.tsv expects `user\\titem`");
    const auto* u = out.corpus.users.lookup(line.substr(0, tab));
    const auto* i = out.corpus.items.lookup(line.substr(tab + 1));
    if (u == nullptr) throw fsrec::UnknownUserError(line.substr(0, tab));
    if (i == nullptr) throw fsrec::ParseError(line_no, "unknown item '" + line.substr(tab + 1) + "'");
    pairs.emplace_back(*u, *i);
  }
  out.split = fsrec::split_from_pairs(out.corpus.tensor, pairs, split_seed);
  out.checksum = corpus_checksum(dir);
  return out;
}

// ---------------------------------------------------------------- commands

struct GenOptions {
  fsrec::SyntheticParams params;
};

void cmd_gen_synthetic(const CLI::App* cmd, const CommonOptions& opts, GenOptions& gen, Run& run) {
  fsrec::ExperimentConfig cfg = resolve_config(cmd, opts, run);
  gen.params.seed = cfg.seed;
  const auto syn = fsrec::generate_synthetic(gen.params);
  const fs::path out_dir = opts.out_dir;
  fs::create_directories(out_dir);

  auto inter = open_out(out_dir / "interactions.tsv");
  fsrec::write_interactions(inter, syn.corpus);
  inter.close();
  auto friends = open_out(out_dir / "friendships.tsv");
  fsrec::write_friendships(friends, syn.graph, syn.corpus.users);
  friends.close();
  auto truth = open_out(out_dir / "truth.tsv");
  truth << "user\thome_cluster\tbetween\n";
  for (fsrec::UserId u = 0; u < syn.corpus.users.size(); ++u) {
    truth << syn.corpus.users.key(u) << '\t' << syn.home_cluster[u] << '\t' << int(syn.between[u]) << '\n';
  }
  truth.close();
  for (const char* f : {"interactions.tsv", "friendships.tsv", "truth.tsv"}) run.output(out_dir / f);
  run.finish(out_dir, cfg);
  std::cout << "generated " << syn.corpus.users.size() << " users, " << syn.corpus.items.size() << " items, "
            << syn.corpus.tensor.num_entries() << " entries, " << syn.graph.num_edges() << " friendships\n";
}

struct IngestOptions {
  std::string interactions;
  std::string friendships;
};

void cmd_ingest(const CLI::App* cmd, const CommonOptions& opts, const IngestOptions& in, Run& run) {
  fsrec::ExperimentConfig cfg = resolve_config(cmd, opts, run);
  run.input(in.interactions);
  run.input(in.friendships);
  const fsrec::Corpus raw = fsrec::load_interactions(in.interactions);
  const fsrec::FriendshipGraph raw_graph = fsrec::load_friendships(in.friendships, raw.users);
  const fsrec::PruneResult pruned =
      fsrec::prune(raw.tensor, raw_graph, cfg.corpus.min_items, cfg.corpus.require_friends);

  fsrec::Corpus corpus;
  corpus.tensor = pruned.tensor;
  corpus.users = raw.users.subset(pruned.kept_users);
  corpus.items = raw.items.subset(pruned.kept_items);
  corpus.tags = raw.tags;
  const fsrec::DataSplit split = fsrec::split(corpus.tensor, cfg.corpus.test_fraction, cfg.seed);

  const fs::path out_dir = opts.out_dir;
  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "interactions.tsv");
    fsrec::write_interactions(out, corpus);
  }
  {
    auto out = open_out(out_dir / "friendships.tsv");
    fsrec::write_friendships(out, pruned.graph, corpus.users);
  }
  for (auto [name, map] : {std::pair{"users.tsv", &corpus.users}, std::pair{"items.tsv", &corpus.items},
                           std::pair{"tags.tsv", &corpus.tags}}) {
    auto out = open_out(out_dir / name);
    fsrec::write_id_map(out, *map);
  }
  {
    auto out = open_out(out_dir / "split.tsv");
    out << "# seed\t" << split.seed << '\n';
    for (fsrec::UserId u = 0; u < split.test.size(); ++u) {
      for (const auto& e : split.test[u]) out << corpus.users.key(u) << '\t' << corpus.items.key(e.item) << '\n';
    }
  }
  for (const auto& f : kCorpusFiles) run.output(out_dir / f);
  run.finish(out_dir, cfg);
  std::cout << "kept " << corpus.users.size() << " of " << raw.users.size() << " users, " << corpus.items.size()
            << " of " << raw.items.size() << " items; " << split.num_test_entries() << " held-out entries\n";
}

struct ClusterOptions {
  std::string corpus_dir;
  std::string algorithm;
};

void cmd_cluster(const CLI::App* cmd, const CommonOptions& opts, const ClusterOptions& co, Run& run) {
  fsrec::ExperimentConfig cfg = resolve_config(cmd, opts, run);
  const LoadedCorpus data = load_corpus_dir(co.corpus_dir, run);
  std::string algorithm = co.algorithm;
  if (algorithm.empty()) algorithm = cfg.model == fsrec::ModelKind::kFRSboSN ? "cmeans" : "kmeans";
  const Eigen::MatrixXd profiles = fsrec::normalized_profiles(data.split.train);
  fsrec::ClusterModel model;
  if (algorithm == "kmeans") {
    model = fsrec::kmeans(profiles, cfg.cluster_params());
  } else if (algorithm == "cmeans") {
    model = fsrec::cmeans(profiles, cfg.cluster_params());
  } else {
    throw fsrec::ConfigError("algorithm", "expected kmeans or cmeans, got '" + algorithm + "'");
  }
  const fs::path out_dir = opts.out_dir;
  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "clusters.txt");
    fsrec::write_cluster_model(out, model);
  }
  {
    auto out = open_out(out_dir / "memberships.tsv");
    fsrec::write_memberships(out, model);
  }
  run.output(out_dir / "clusters.txt");
  run.output(out_dir / "memberships.tsv");
  run.finish(out_dir, cfg);
  std::cout << algorithm << ": " << model.num_clusters << " clusters, final objective "
            << fsrec::format_double(model.objective_trace.empty() ? 0.0 : model.objective_trace.back()) << '\n';
}

struct TrainOptions {
  std::string corpus_dir;
  std::string clusters_path;
  bool dump_tables = false;
};

void cmd_train(const CLI::App* cmd, const CommonOptions& opts, const TrainOptions& to, Run& run) {
  fsrec::ExperimentConfig cfg = resolve_config(cmd, opts, run);
  const LoadedCorpus data = load_corpus_dir(to.corpus_dir, run);
  std::optional<fsrec::ClusterModel> clusters;
  if (!to.clusters_path.empty()) {
    run.input(to.clusters_path);
    std::ifstream in(to.clusters_path);
    clusters = fsrec::read_cluster_model(in);
    if (clusters->num_users() != data.split.train.num_users()) {
      throw fsrec::ShapeError("cluster model covers " + std::to_string(clusters->num_users()) +
                              " users but the corpus has " + std::to_string(data.split.train.num_users()));
    }
  }
  const fsrec::FittedModel fitted =
      fsrec::fit_model(cfg.model, data.split, data.graph, cfg, clusters ? &*clusters : nullptr);
  for (const auto& w : fitted.warnings) std::cerr << "warning: " << w << '\n';

  const fs::path out_dir = opts.out_dir;
  fs::create_directories(out_dir);
  std::map<std::string, std::string> meta;
  meta["model"] = std::string(fsrec::to_string(cfg.model));
  meta["corpus_checksum"] = data.checksum;
  for (const auto& info : fsrec::config_keys()) meta["config." + info.key] = fsrec::get_config_value(cfg, info.key);

  if (fsrec::is_factor_model(cfg.model)) {
    fsrec::write_checkpoint((out_dir / "factors.bin").string(), fitted.factors(), cfg.train.scalar_mode, cfg.seed);
    run.output(out_dir / "factors.bin");
    {
      auto out = open_out(out_dir / "loss.tsv");
      fsrec::write_loss_trace(out, *fitted.report);
    }
    run.output(out_dir / "loss.tsv");
    meta["epochs_run"] = std::to_string(fitted.report->epochs_run);
    meta["converged"] = fitted.report->converged ? "true" : "false";
    meta["factors_checksum"] = fsrec::file_checksum((out_dir / "factors.bin").string());

    if (to.dump_tables) {
      const auto mode =
          cfg.model == fsrec::ModelKind::kFRSboSN ? fsrec::SimilarityMode::kSoft : fsrec::SimilarityMode::kHard;
      const auto sims = fsrec::build_similarity_table(data.graph, data.split.train, *fitted.clusters, mode,
                                                      cfg.lambda, cfg.sim_norm);
      const auto corrs = fsrec::build_correlation_table(data.graph, data.split.train);
      {
        auto out = open_out(out_dir / "similarity.tsv");
        fsrec::write_similarity_table(out, sims, data.graph);
      }
      {
        auto out = open_out(out_dir / "correlation.tsv");
        fsrec::write_correlation_table(out, corrs);
      }
      run.output(out_dir / "similarity.tsv");
      run.output(out_dir / "correlation.tsv");
    }
  }
  {
    auto out = open_out(out_dir / "factors.meta");
    fsrec::write_metadata(out, meta);
  }
  run.output(out_dir / "factors.meta");
  run.finish(out_dir, cfg);
  std::cout << meta["model"];
  if (fitted.report) {
    const double last = fitted.report->loss_trace.empty() ? fitted.report->initial.total()
                                                          : fitted.report->loss_trace.back();
    std::cout << ": " << fitted.report->epochs_run << " epochs, loss " << fsrec::format_double(last)
              << (fitted.report->converged ? " (converged)" : "");
  }
  std::cout << '\n';
}

struct EvaluateOptions {
  std::string corpus_dir;
  std::string model_dir;
};

void cmd_evaluate(const CLI::App* cmd, const CommonOptions& opts, const EvaluateOptions& eo, Run& run) {
  fsrec::ExperimentConfig cfg = resolve_config(cmd, opts, run);
  const fs::path model_dir = eo.model_dir;
  run.input((model_dir / "factors.meta").string());
  std::map<std::string, std::string> meta;
  {
    std::ifstream in(model_dir / "factors.meta");
    meta = fsrec::read_metadata(in);
  }
  const LoadedCorpus data = load_corpus_dir(eo.corpus_dir, run);
  if (meta["corpus_checksum"] != data.checksum) {
    throw fsrec::StaleCheckpointError("model in '" + model_dir.string() + "' was trained on corpus " +
                                      meta["corpus_checksum"] + " but '" + eo.corpus_dir + "' has checksum " +
                                      data.checksum + "; retrain against this corpus");
  }
  const fsrec::ModelKind kind = fsrec::parse_model_kind(meta["model"]);
  std::unique_ptr<fsrec::Scorer> scorer;
  if (kind == fsrec::ModelKind::kPop) {
    scorer = std::make_unique<fsrec::PopScorer>(data.split.train);
  } else if (kind == fsrec::ModelKind::kUcf) {
    const auto neighbors = fsrec::parse_uint(meta["config.eval.neighbors"], "eval.neighbors");
    scorer = std::make_unique<fsrec::UcfScorer>(data.split.train, neighbors);
  } else {
    const std::string path = (model_dir / "factors.bin").string();
    run.input(path);
    fsrec::Checkpoint ck = fsrec::read_checkpoint(path);
    if (ck.header.num_users != data.split.train.num_users()) {
      throw fsrec::ShapeError("checkpoint has " + std::to_string(ck.header.num_users) + " users but the corpus has " +
                              std::to_string(data.split.train.num_users()));
    }
    scorer = std::make_unique<fsrec::FactorScorer>(meta["model"], std::move(ck.factors));
  }
  const fsrec::EvalReport report = fsrec::evaluate(*scorer, data.split, cfg.ks);

  const fs::path out_dir = opts.out_dir;
  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "report.tsv");
    fsrec::write_report(out, report);
  }
  {
    auto out = open_out(out_dir / "users.tsv");
    fsrec::write_user_detail(out, report);
  }
  run.output(out_dir / "report.tsv");
  run.output(out_dir / "users.tsv");
  run.finish(out_dir, cfg);
  for (const auto& [name, value] : report.metrics) std::cout << name << '\t' << fsrec::format_double(value) << '\n';
}

struct SweepOptions {
  std::string corpus_dir;
  std::string parameter;
};

void cmd_sweep(const CLI::App* cmd, const CommonOptions& opts, const SweepOptions& so, Run& run) {
  fsrec::ExperimentConfig cfg = resolve_config(cmd, opts, run);
  if (!so.parameter.empty()) cfg.sweep.parameter = fsrec::parse_sweep_parameter(so.parameter);
  const LoadedCorpus data = load_corpus_dir(so.corpus_dir, run);
  const auto rows = fsrec::sweep(cfg.sweep.parameter, cfg.sweep.values, cfg.sweep.models, cfg, data.split, data.graph);
  const fs::path out_dir = opts.out_dir;
  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "sweep.tsv");
    fsrec::write_sweep_table(out, rows);
  }
  run.output(out_dir / "sweep.tsv");
  run.finish(out_dir, cfg);
  fsrec::write_sweep_table(std::cout, rows);
}

int run_cli(std::vector<std::string> args);

// Reruns the command recorded in a manifest after checking that its inputs
// are unchanged. --out-dir redirects the outputs.
void cmd_replay(const std::string& manifest_path, const std::string& out_dir) {
  require_file(manifest_path);
  std::ifstream in(manifest_path);
  ordered_json m;
  try {
    m = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw fsrec::ParseError(0, "manifest '" + manifest_path + "': " + e.what());
  }
  for (const auto& [path, sum] : m.at("inputs").items()) {
    require_file(path);
    const std::string now = fsrec::file_checksum(path);
    if (now != sum.get<std::string>()) {
      throw fsrec::StaleCheckpointError("input '" + path + "' changed since the manifest was written (" +
                                        sum.get<std::string>() + " -> " + now + ")");
    }
  }
  std::vector<std::string> args = {"fsrec"};
  const auto recorded = m.at("args").get<std::vector<std::string>>();
  for (std::size_t a = 0; a < recorded.size(); ++a) {
    if (!out_dir.empty() && recorded[a] == "--out-dir" && a + 1 < recorded.size()) {
      args.push_back("--out-dir");
      args.push_back(out_dir);
      ++a;
    } else if (!out_dir.empty() && recorded[a].rfind("--out-dir=", 0) == 0) {
      args.push_back("--out-dir=" + out_dir);
    } else {
      args.push_back(recorded[a]);
    }
  }
  if (const int rc = run_cli(args); rc != 0) throw fsrec::Error("replay-failed", "replayed command exited with " + std::to_string(rc));
}

void print_error(const std::string& category, std::string message) {
  std::replace(message.begin(), message.end(), '\n', ' ');
  std::cerr << category << ": " << message << '\n';
}

int run_cli(std::vector<std::string> args) {
  CLI::App app{"fsrec: social recommendation by matrix factorization with fuzzy user clustering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonOptions common;
  GenOptions gen;
  auto* c_gen = app.add_subcommand("gen-synthetic", "generate a clustered corpus with a friendship graph");
  add_common(c_gen, common, true);
  auto& sp = gen.params;
  c_gen->add_option("--clusters", sp.clusters, "number of user clusters")->capture_default_str();
  c_gen->add_option("--users-per-cluster", sp.users_per_cluster)->capture_default_str();
  c_gen->add_option("--items-per-cluster", sp.items_per_cluster)->capture_default_str();
  c_gen->add_option("--topics-per-cluster", sp.topics_per_cluster)->capture_default_str();
  c_gen->add_option("--tags-per-cluster", sp.tags_per_cluster)->capture_default_str();
  c_gen->add_option("--tags-per-item", sp.tags_per_item)->capture_default_str();
  c_gen->add_option("--min-items", sp.min_items_per_user, "fewest items per user")->capture_default_str();
  c_gen->add_option("--max-items", sp.max_items_per_user, "most items per user")->capture_default_str();
  c_gen->add_option("--overlap", sp.overlap, "share of a core user's items from other clusters")->capture_default_str();
  c_gen->add_option("--between-fraction", sp.between_fraction, "share of users split evenly over two clusters")
      ->capture_default_str();
  c_gen->add_option("--topic-focus", sp.topic_focus)->capture_default_str();
  c_gen->add_option("--friends-per-user", sp.friends_per_user)->capture_default_str();
  c_gen->add_option("--homophily", sp.homophily, "chance a friend comes from the home cluster")->capture_default_str();

  IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "load, prune and split a raw corpus into a corpus directory");
  add_common(c_ingest, common, true);
  c_ingest->add_option("--interactions", ingest.interactions, "user/item/tag records")->required();
  c_ingest->add_option("--friendships", ingest.friendships, "friendship pairs or group lines")->required();

  ClusterOptions cluster;
  auto* c_cluster = app.add_subcommand("cluster", "cluster users by their training tag profiles");
  add_common(c_cluster, common, true);
  c_cluster->add_option("--corpus", cluster.corpus_dir, "corpus directory written by ingest")->required();
  c_cluster->add_option("--algorithm", cluster.algorithm, "kmeans | cmeans (default follows run.model)");

  TrainOptions trainopt;
  auto* c_train = app.add_subcommand("train", "fit run.model on the training split");
  add_common(c_train, common, true);
  c_train->add_option("--corpus", trainopt.corpus_dir, "corpus directory written by ingest")->required();
  c_train->add_option("--clusters", trainopt.clusters_path, "reuse a cluster model written by cluster");
  c_train->add_flag("--dump-tables", trainopt.dump_tables, "also write similarity.tsv and correlation.tsv");

  EvaluateOptions evalopt;
  auto* c_eval = app.add_subcommand("evaluate", "score a trained model on the held-out split");
  add_common(c_eval, common, true);
  c_eval->add_option("--corpus", evalopt.corpus_dir, "corpus directory written by ingest")->required();
  c_eval->add_option("--model", evalopt.model_dir, "output directory of train")->required();

  SweepOptions sweepopt;
  auto* c_sweep = app.add_subcommand("sweep", "retrain and evaluate over a grid of one parameter");
  add_common(c_sweep, common, true);
  c_sweep->add_option("parameter", sweepopt.parameter, "alpha | beta | latent_dim (default sweep.parameter)");
  c_sweep->add_option("--corpus", sweepopt.corpus_dir, "corpus directory written by ingest")->required();

  std::string manifest_path;
  std::string replay_out;
  auto* c_replay = app.add_subcommand("replay", "rerun the command recorded in a manifest");
  c_replay->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required();
  c_replay->add_option("--out-dir", replay_out, "write outputs here instead of the recorded directory");

  std::string show_preset = "default";
  std::string show_config;
  bool show_keys = false;
  auto* c_config = app.add_subcommand("config", "print a resolved configuration or the key reference");
  c_config->add_option("--preset", show_preset, "preset to start from")->capture_default_str();
  c_config->add_option("--config", show_config, "config file applied on top of the preset");
  c_config->add_flag("--keys", show_keys, "list every key with its default and meaning");
  auto* c_presets = app.add_subcommand("presets", "list built-in presets");

  const std::vector<std::string> recorded(args.begin() + 1, args.end());
  // CLI11 consumes a reversed argument list without the program name.
  std::vector<std::string> reversed(recorded.rbegin(), recorded.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("usage-error", e.what());
    return 2;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    Run run(cmd->get_name(), recorded);
    if (cmd == c_gen) cmd_gen_synthetic(cmd, common, gen, run);
    if (cmd == c_ingest) cmd_ingest(cmd, common, ingest, run);
    if (cmd == c_cluster) cmd_cluster(cmd, common, cluster, run);
    if (cmd == c_train) cmd_train(cmd, common, trainopt, run);
    if (cmd == c_eval) cmd_evaluate(cmd, common, evalopt, run);
    if (cmd == c_sweep) cmd_sweep(cmd, common, sweepopt, run);
    if (cmd == c_replay) cmd_replay(manifest_path, replay_out);
    if (cmd == c_config) {
      if (show_keys) {
        for (const auto& info : fsrec::config_keys()) {
          std::cout << info.key << "\t" << info.default_value << "\t" << info.doc << '\n';
        }
      } else {
        fsrec::ExperimentConfig cfg = fsrec::preset(show_preset);
        if (!show_config.empty()) cfg = fsrec::load_config(show_config, cfg);
        fsrec::write_config(std::cout, cfg);
      }
    }
    if (cmd == c_presets) {
      for (const auto& p : fsrec::preset_names()) std::cout << p.name << '\t' << p.description << '\n';
    }
  } catch (const fsrec::Error& e) {
    print_error(e.category(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal-error", e.what());
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(std::move(args));
}

#include "fsrec/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>

#include "fsrec/errors.hpp"
#include "fsrec/text.hpp"

namespace fsrec {

ClusterModel cluster_users(const TagTensor& train, ModelKind kind, const ExperimentConfig& cfg) {
  const Eigen::MatrixXd profiles = normalized_profiles(train);
  return kind == ModelKind::kFRSboSN ? cmeans(profiles, cfg.cluster_params()) : kmeans(profiles, cfg.cluster_params());
}

const LatentFactors& FittedModel::factors() const {
  const auto* fs = dynamic_cast<const FactorScorer*>(scorer.get());
  if (fs == nullptr) throw ConfigError("model", "model has no latent factors");
  return fs->factors();
}

FittedModel fit_model(ModelKind kind, const DataSplit& split, const FriendshipGraph& graph,
                      const ExperimentConfig& cfg, const ClusterModel* clusters) {
  cfg.validate();
  FittedModel out;
  const TagTensor& train_tensor = split.train;
  if (kind == ModelKind::kPop) {
    out.scorer = std::make_unique<PopScorer>(train_tensor);
    return out;
  }
  if (kind == ModelKind::kUcf) {
    auto ucf = std::make_unique<UcfScorer>(train_tensor, cfg.neighbors);
    out.warnings = ucf->warnings();
    out.scorer = std::move(ucf);
    return out;
  }

  out.clusters = clusters != nullptr ? *clusters : cluster_users(train_tensor, kind, cfg);
  const SimilarityMode mode = kind == ModelKind::kFRSboSN ? SimilarityMode::kSoft : SimilarityMode::kHard;
  const SimilarityTable sims = build_similarity_table(graph, train_tensor, *out.clusters, mode, cfg.lambda, cfg.sim_norm);
  out.warnings.insert(out.warnings.end(), sims.warnings().begin(), sims.warnings().end());
  const CorrelationTable corrs = build_correlation_table(graph, train_tensor);
  const TrainingData data{train_tensor, graph, sims, corrs};

  TrainResult result = kind == ModelKind::kSoReg ? soreg_train(data, cfg.training()) : train(data, cfg.training());
  out.report = std::move(result.report);
  out.scorer = std::make_unique<FactorScorer>(std::string(to_string(kind)), std::move(result.factors));
  return out;
}

std::vector<SweepRow> sweep(SweepParameter parameter, std::span<const double> values, std::span<const ModelKind> models,
                            const ExperimentConfig& base, const DataSplit& split, const FriendshipGraph& graph) {
  std::vector<SweepRow> rows;
  // Clusters depend only on the data and seed, so they are shared across values.
  std::map<ModelKind, ClusterModel> cluster_cache;
  for (double value : values) {
    ExperimentConfig cfg = base;
    switch (parameter) {
      case SweepParameter::kAlpha: cfg.train.alpha = value; break;
      case SweepParameter::kBeta: cfg.train.beta = value; break;
      case SweepParameter::kLatentDim:
        if (value < 1.0 || value != static_cast<double>(static_cast<std::size_t>(value))) {
          throw ConfigError("sweep.values", "latent_dim values must be positive integers");
        }
        cfg.train.latent_dim = static_cast<std::size_t>(value);
        break;
    }
    for (ModelKind kind : models) {
      const ClusterModel* cached = nullptr;
      if (is_factor_model(kind)) {
        auto it = cluster_cache.find(kind);
        if (it == cluster_cache.end()) it = cluster_cache.emplace(kind, cluster_users(split.train, kind, cfg)).first;
        cached = &it->second;
      }
      const FittedModel fitted = fit_model(kind, split, graph, cfg, cached);
      const EvalReport report = evaluate(*fitted.scorer, split, cfg.ks);
      for (const auto& [metric, v] : report.metrics) rows.push_back({value, kind, metric, v});
    }
  }
  return rows;
}

void write_sweep_table(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "param_value\tmodel\tmetric\tvalue\n";
  for (const auto& r : rows) {
    out << format_double(r.value) << '\t' << to_string(r.model) << '\t' << r.metric << '\t'
        << format_double(r.metric_value) << '\n';
  }
}

std::string bytes_checksum(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for checksumming");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes_checksum(bytes);
}

}  // namespace fsrec

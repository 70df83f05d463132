#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsrec/affinity.hpp"
#include "fsrec/baselines.hpp"
#include "fsrec/clustering.hpp"
#include "fsrec/config.hpp"
#include "fsrec/evaluator.hpp"

namespace fsrec {

/// Hard K-means for rsbosn/soreg, fuzzy C-means for frsbosn, on the
/// normalized tag profiles of the training tensor.
ClusterModel cluster_users(const TagTensor& train, ModelKind kind, const ExperimentConfig& cfg);

struct FittedModel {
  std::unique_ptr<Scorer> scorer;
  std::optional<ClusterModel> clusters;
  std::optional<TrainReport> report;
  std::vector<std::string> warnings;

  /// Factors of a factor model; throws for pop/ucf.
  const LatentFactors& factors() const;
};

/// Fits `kind` on the training side of `split`. `clusters` may be passed to
/// reuse an existing cluster model (must match the algorithm of `kind`).
FittedModel fit_model(ModelKind kind, const DataSplit& split, const FriendshipGraph& graph,
                      const ExperimentConfig& cfg, const ClusterModel* clusters = nullptr);

struct SweepRow {
  double value;
  ModelKind model;
  std::string metric;
  double metric_value;
};

/// Retrains every model for every value of the swept parameter with the same
/// seed and evaluates it.
std::vector<SweepRow> sweep(SweepParameter parameter, std::span<const double> values, std::span<const ModelKind> models,
                            const ExperimentConfig& base, const DataSplit& split, const FriendshipGraph& graph);

/// `param_value\tmodel\tmetric\tvalue` with a header line.
void write_sweep_table(std::ostream& out, const std::vector<SweepRow>& rows);

/// 64-bit FNV-1a of a file's bytes as 16 hex digits.
std::string file_checksum(const std::string& path);
std::string bytes_checksum(std::string_view bytes);

}  // namespace fsrec

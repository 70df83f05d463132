#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fsrec/affinity.hpp"
#include "fsrec/clustering.hpp"
#include "fsrec/factorizer.hpp"

namespace fsrec {

enum class ModelKind { kPop, kUcf, kSoReg, kRSboSN, kFRSboSN };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);
/// True for the models trained by matrix factorization.
bool is_factor_model(ModelKind kind);

enum class SweepParameter { kAlpha, kBeta, kLatentDim };

std::string_view to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(std::string_view text);

struct CorpusParams {
  std::size_t min_items = 1;
  bool require_friends = true;
  double test_fraction = 0.2;
};

struct SweepSpec {
  SweepParameter parameter = SweepParameter::kBeta;
  std::vector<double> values = {0.0001, 0.001, 0.01, 0.1, 0.3};
  std::vector<ModelKind> models = {ModelKind::kRSboSN, ModelKind::kFRSboSN};
};

/// Every tunable of a pipeline run. Serialized as flat `key = value` lines
/// grouped in `[section]` blocks; see config_keys() for the key list.
struct ExperimentConfig {
  CorpusParams corpus;
  ClusterParams clustering;
  double lambda = 0.8;
  SimNorm sim_norm = SimNorm::kCoTag;
  TrainingConfig train;
  std::vector<std::size_t> ks = {1, 3, 5};
  std::size_t neighbors = 20;
  std::uint64_t seed = 0;
  ModelKind model = ModelKind::kFRSboSN;
  SweepSpec sweep;

  /// Throws ConfigError naming the first invalid key.
  void validate() const;

  /// Training config with the run seed applied.
  TrainingConfig training() const;
  /// Clustering params with the run seed applied.
  ClusterParams cluster_params() const;
};

struct ConfigKeyInfo {
  std::string key;  // "section.name"
  std::string default_value;
  std::string doc;
};

/// All recognized keys with their defaults and meaning.
const std::vector<ConfigKeyInfo>& config_keys();

/// Sets one key from its text form; throws ConfigError on an unknown key or
/// an unparsable value.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const ExperimentConfig& cfg, std::string_view key);

/// Applies a config file on top of `base`. Accepts `[section]` headers with
/// bare keys, or fully qualified `section.key = value` lines.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Canonical snapshot of every key, stable across runs.
void write_config(std::ostream& out, const ExperimentConfig& cfg);

struct PresetInfo {
  std::string name;
  std::string description;
};

const std::vector<PresetInfo>& preset_names();
ExperimentConfig preset(std::string_view name);

}  // namespace fsrec

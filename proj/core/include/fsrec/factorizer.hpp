#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fsrec/affinity.hpp"
#include "fsrec/corpus.hpp"

namespace fsrec {

/// S is l x p (column u is S_u), V is l x q (column i is V_i).
struct LatentFactors {
  Eigen::MatrixXd S;
  Eigen::MatrixXd V;

  std::size_t latent_dim() const { return static_cast<std::size_t>(S.rows()); }
  std::size_t num_users() const { return static_cast<std::size_t>(S.cols()); }
  std::size_t num_items() const { return static_cast<std::size_t>(V.cols()); }

  friend bool operator==(const LatentFactors& a, const LatentFactors& b) {
    return a.S.rows() == b.S.rows() && a.S.cols() == b.S.cols() && a.V.rows() == b.V.rows() &&
           a.V.cols() == b.V.cols() && a.S == b.S && a.V == b.V;
  }
};

/// Granularity of the social and user-item gradient contributions.
/// kPerEntry recomputes the whole user gradient for every observed entry;
/// kEpochSocial applies the social part once per user at the end of an epoch.
enum class UpdateMode { kPerEntry, kEpochSocial };

/// kExact differentiates the combined loss (both directions of every
/// friendship); kOneSided keeps only the u -> f direction of each social sum.
enum class GradientForm { kExact, kOneSided };

std::string_view to_string(UpdateMode mode);
UpdateMode parse_update_mode(std::string_view text);
std::string_view to_string(GradientForm form);
GradientForm parse_gradient_form(std::string_view text);

struct TrainingConfig {
  double eta = 0.5;
  double alpha = 0.01;
  double beta = 0.01;
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  std::size_t latent_dim = 80;
  std::size_t max_iter = 100;
  double conv_tol = 1e-5;
  std::uint64_t seed = 0;
  double init_scale = 0.01;
  ScalarMode scalar_mode = ScalarMode::kTagCount;
  UpdateMode update_mode = UpdateMode::kPerEntry;
  GradientForm gradient_form = GradientForm::kExact;

  /// Throws ConfigError naming the first out-of-range field.
  void validate() const;
};

/// Everything the loss reads besides the factors. Tables must be built from
/// the same tensor and graph.
struct TrainingData {
  const TagTensor& tensor;
  const FriendshipGraph& graph;
  const SimilarityTable& similarity;
  const CorrelationTable& correlation;
};

struct LossBreakdown {
  double fit = 0.0;
  double l2_s = 0.0;
  double l2_v = 0.0;
  double user_item = 0.0;
  double social = 0.0;

  double total() const { return fit + l2_s + l2_v + user_item + social; }
};

LossBreakdown loss(const LatentFactors& factors, const TrainingData& data, const TrainingConfig& cfg);

/// Gradient of the fit and lambda1 terms with respect to S_u.
Eigen::VectorXd grad_user_local(UserId u, const LatentFactors& factors, const TrainingData& data,
                                const TrainingConfig& cfg);
/// Gradient of the user-item (alpha) and social (beta) terms with respect to S_u.
Eigen::VectorXd grad_user_social(UserId u, const LatentFactors& factors, const TrainingData& data,
                                 const TrainingConfig& cfg);
/// Full dLoss/dS_u.
Eigen::VectorXd grad_user(UserId u, const LatentFactors& factors, const TrainingData& data,
                          const TrainingConfig& cfg);
/// dLoss/dV_i. Only the fit and lambda2 terms depend on V.
Eigen::VectorXd grad_item(ItemId i, const LatentFactors& factors, const TagTensor& tensor, const TrainingConfig& cfg);

struct TrainReport {
  LossBreakdown initial;
  std::vector<double> loss_trace;
  std::vector<LossBreakdown> term_trace;
  std::size_t epochs_run = 0;
  bool converged = false;
};

struct TrainResult {
  LatentFactors factors;
  TrainReport report;
};

/// Uniform init in [-init_scale, init_scale] from cfg.seed.
LatentFactors init_factors(std::size_t num_users, std::size_t num_items, const TrainingConfig& cfg);

/// Stochastic gradient descent over observed entries in (user, item) order.
/// Throws DivergenceError when the loss stops being finite.
TrainResult train(const TrainingData& data, const TrainingConfig& cfg);

double predict(const LatentFactors& factors, UserId u, ItemId i);

/// Full p x q matrix of S^T V.
Eigen::MatrixXd score_matrix(const LatentFactors& factors);

/// `epoch\ttotal\tfit\tl2s\tl2v\tuseritem\tsocial` with a header line.
void write_loss_trace(std::ostream& out, const TrainReport& report);

}  // namespace fsrec

#include "fsrec/factorizer.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "fsrec/errors.hpp"
#include "fsrec/text.hpp"

namespace fsrec {
namespace {

void check_shapes(const LatentFactors& factors, const TrainingData& data) {
  const auto p = static_cast<Eigen::Index>(data.tensor.num_users());
  const auto q = static_cast<Eigen::Index>(data.tensor.num_items());
  if (factors.S.cols() != p || factors.V.cols() != q || factors.S.rows() != factors.V.rows()) {
    throw ShapeError("factors are " + std::to_string(factors.S.rows()) + "x" + std::to_string(factors.S.cols()) +
                     " / " + std::to_string(factors.V.rows()) + "x" + std::to_string(factors.V.cols()) +
                     " but the corpus has p=" + std::to_string(p) + ", q=" + std::to_string(q));
  }
  if (data.graph.num_users() != data.tensor.num_users() ||
      data.similarity.num_users() != data.tensor.num_users() ||
      data.correlation.num_users() != data.tensor.num_users()) {
    throw ShapeError("graph or tables were built for a different number of users");
  }
}

void check_non_negative(double v, const char* key) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be a finite value >= 0");
}

}  // namespace

std::string_view to_string(UpdateMode mode) {
  return mode == UpdateMode::kPerEntry ? "per-entry" : "epoch-social";
}

UpdateMode parse_update_mode(std::string_view text) {
  if (text == "per-entry") return UpdateMode::kPerEntry;
  if (text == "epoch-social") return UpdateMode::kEpochSocial;
  throw ConfigError("update_mode", "expected 'per-entry' or 'epoch-social', got '" + std::string(text) + "'");
}

std::string_view to_string(GradientForm form) { return form == GradientForm::kExact ? "exact" : "one-sided"; }

GradientForm parse_gradient_form(std::string_view text) {
  if (text == "exact") return GradientForm::kExact;
  if (text == "one-sided") return GradientForm::kOneSided;
  throw ConfigError("grad_form", "expected 'exact' or 'one-sided', got '" + std::string(text) + "'");
}

void TrainingConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta", "learning rate must be > 0");
  check_non_negative(alpha, "alpha");
  check_non_negative(beta, "beta");
  check_non_negative(lambda1, "lambda1");
  check_non_negative(lambda2, "lambda2");
  if (latent_dim == 0) throw ConfigError("latent_dim", "must be >= 1");
  if (!(conv_tol > 0.0)) throw ConfigError("conv_tol", "must be > 0");
  if (!(init_scale > 0.0) || !std::isfinite(init_scale)) throw ConfigError("init_scale", "must be > 0");
}

LossBreakdown loss(const LatentFactors& factors, const TrainingData& data, const TrainingConfig& cfg) {
  check_shapes(factors, data);
  const auto& S = factors.S;
  const auto& V = factors.V;
  LossBreakdown out;

  for (UserId u = 0; u < data.tensor.num_users(); ++u) {
    for (const auto& e : data.tensor.row(u)) {
      const double r = scalar_value(e, cfg.scalar_mode) - S.col(u).dot(V.col(e.item));
      out.fit += 0.5 * r * r;
    }
  }
  out.l2_s = 0.5 * cfg.lambda1 * S.squaredNorm();
  out.l2_v = 0.5 * cfg.lambda2 * V.squaredNorm();

  for (UserId u = 0; u < data.graph.num_users(); ++u) {
    const auto friends = data.graph.friends(u);
    const auto& sims = data.similarity.row(u);
    for (std::size_t k = 0; k < friends.size(); ++k) {
      const UserId f = friends[k];
      const double d2 = (S.col(u) - S.col(f)).squaredNorm();
      out.user_item += 0.5 * cfg.alpha * data.correlation.row_sum(f) * d2;
      out.social += 0.5 * cfg.beta * sims[k] * d2;
    }
  }
  return out;
}

Eigen::VectorXd grad_user_local(UserId u, const LatentFactors& factors, const TrainingData& data,
                                const TrainingConfig& cfg) {
  check_shapes(factors, data);
  const auto su = factors.S.col(u);
  Eigen::VectorXd g = cfg.lambda1 * su;
  for (const auto& e : data.tensor.row(u)) {
    const auto vi = factors.V.col(e.item);
    g += (su.dot(vi) - scalar_value(e, cfg.scalar_mode)) * vi;
  }
  return g;
}

Eigen::VectorXd grad_user_social(UserId u, const LatentFactors& factors, const TrainingData& data,
                                 const TrainingConfig& cfg) {
  check_shapes(factors, data);
  const auto su = factors.S.col(u);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(su.size());
  const auto friends = data.graph.friends(u);
  const auto& sims = data.similarity.row(u);
  const bool exact = cfg.gradient_form == GradientForm::kExact;
  const double own_corr = data.correlation.row_sum(u);
  for (std::size_t k = 0; k < friends.size(); ++k) {
    const UserId f = friends[k];
    // Each friendship appears in the loss as (u, f) and (f, u).
    const double corr_weight = exact ? data.correlation.row_sum(f) + own_corr : data.correlation.row_sum(f);
    const double sim_weight = exact ? 2.0 * sims[k] : sims[k];
    g += (cfg.alpha * corr_weight + cfg.beta * sim_weight) * (su - factors.S.col(f));
  }
  return g;
}

Eigen::VectorXd grad_user(UserId u, const LatentFactors& factors, const TrainingData& data,
                          const TrainingConfig& cfg) {
  return grad_user_local(u, factors, data, cfg) + grad_user_social(u, factors, data, cfg);
}

Eigen::VectorXd grad_item(ItemId i, const LatentFactors& factors, const TagTensor& tensor, const TrainingConfig& cfg) {
  if (i >= factors.V.cols() || factors.S.cols() != static_cast<Eigen::Index>(tensor.num_users())) {
    throw ShapeError("item gradient requested for incompatible factors");
  }
  const auto vi = factors.V.col(i);
  Eigen::VectorXd g = cfg.lambda2 * vi;
  for (UserId u : tensor.users_of(i)) {
    const auto su = factors.S.col(u);
    const TagVector* tags = tensor.find(u, i);
    const double target = cfg.scalar_mode == ScalarMode::kBinary ? 1.0 : static_cast<double>(total_count(*tags));
    g += (su.dot(vi) - target) * su;
  }
  return g;
}

LatentFactors init_factors(std::size_t num_users, std::size_t num_items, const TrainingConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-cfg.init_scale, cfg.init_scale);
  const auto l = static_cast<Eigen::Index>(cfg.latent_dim);
  LatentFactors f;
  f.S.resize(l, static_cast<Eigen::Index>(num_users));
  f.V.resize(l, static_cast<Eigen::Index>(num_items));
  for (Eigen::Index k = 0; k < f.S.size(); ++k) f.S.data()[k] = unif(rng);
  for (Eigen::Index k = 0; k < f.V.size(); ++k) f.V.data()[k] = unif(rng);
  return f;
}

TrainResult train(const TrainingData& data, const TrainingConfig& cfg) {
  cfg.validate();
  TrainResult result;
  result.factors = init_factors(data.tensor.num_users(), data.tensor.num_items(), cfg);
  auto& factors = result.factors;
  auto& report = result.report;
  report.initial = loss(factors, data, cfg);
  if (!std::isfinite(report.initial.total())) throw DivergenceError(0, "initial loss is not finite");

  double previous = report.initial.total();
  for (std::size_t epoch = 1; epoch <= cfg.max_iter; ++epoch) {
    for (UserId u = 0; u < data.tensor.num_users(); ++u) {
      for (const auto& e : data.tensor.row(u)) {
        const Eigen::VectorXd gu = cfg.update_mode == UpdateMode::kPerEntry ? grad_user(u, factors, data, cfg)
                                                                            : grad_user_local(u, factors, data, cfg);
        factors.S.col(u) -= cfg.eta * gu;
        const Eigen::VectorXd gi = grad_item(e.item, factors, data.tensor, cfg);
        factors.V.col(e.item) -= cfg.eta * gi;
      }
    }
    if (cfg.update_mode == UpdateMode::kEpochSocial) {
      for (UserId u = 0; u < data.tensor.num_users(); ++u) {
        const Eigen::VectorXd gs = grad_user_social(u, factors, data, cfg);
        factors.S.col(u) -= cfg.eta * gs;
      }
    }

    const LossBreakdown terms = loss(factors, data, cfg);
    const double total = terms.total();
    if (!std::isfinite(total) || !factors.S.allFinite() || !factors.V.allFinite()) {
      throw DivergenceError(epoch, "factors or loss overflowed");
    }
    report.loss_trace.push_back(total);
    report.term_trace.push_back(terms);
    report.epochs_run = epoch;
    if (std::abs(total - previous) / std::max(previous, 1.0) < cfg.conv_tol) {
      report.converged = true;
      break;
    }
    previous = total;
  }
  return result;
}

double predict(const LatentFactors& factors, UserId u, ItemId i) {
  if (u >= factors.S.cols() || i >= factors.V.cols()) {
    throw IndexError("prediction requested for (" + std::to_string(u) + "," + std::to_string(i) + ") out of range");
  }
  return factors.S.col(u).dot(factors.V.col(i));
}

Eigen::MatrixXd score_matrix(const LatentFactors& factors) { return factors.S.transpose() * factors.V; }

void write_loss_trace(std::ostream& out, const TrainReport& report) {
  out << "epoch\ttotal\tfit\tl2s\tl2v\tuseritem\tsocial\n";
  for (std::size_t e = 0; e < report.term_trace.size(); ++e) {
    const auto& t = report.term_trace[e];
    out << (e + 1) << '\t' << format_double(report.loss_trace[e]) << '\t' << format_double(t.fit) << '\t'
        << format_double(t.l2_s) << '\t' << format_double(t.l2_v) << '\t' << format_double(t.user_item) << '\t'
        << format_double(t.social) << '\n';
  }
}

}  // namespace fsrec

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fsrec/checkpoint.hpp"
#include "fsrec/errors.hpp"
#include "fsrec/factorizer.hpp"
#include "oracles.hpp"

using namespace fsrec;

namespace {

// Owns everything a TrainingData refers to.
struct Problem {
  TagTensor tensor;
  FriendshipGraph graph;
  ClusterModel clusters;
  SimilarityTable sims;
  CorrelationTable corrs;

  Problem(TagTensor t, FriendshipGraph g, ClusterModel c, SimilarityMode mode)
      : tensor(std::move(t)), graph(std::move(g)), clusters(std::move(c)) {
    sims = build_similarity_table(graph, tensor, clusters, mode, 0.8);
    corrs = build_correlation_table(graph, tensor);
  }

  TrainingData data() const { return {tensor, graph, sims, corrs}; }

  double sim(UserId u, UserId f) const { return sims.value(u, f, graph); }
};

Problem random_problem(std::uint64_t seed, std::size_t p, std::size_t q, bool soft) {
  auto inst = oracle::random_instance(seed, p, q);
  return soft ? Problem(std::move(inst.tensor), std::move(inst.graph), std::move(inst.soft), SimilarityMode::kSoft)
              : Problem(std::move(inst.tensor), std::move(inst.graph), std::move(inst.hard), SimilarityMode::kHard);
}

TrainingConfig small_cfg(double alpha, double beta, std::size_t l = 4) {
  TrainingConfig cfg;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.lambda1 = 0.3;
  cfg.lambda2 = 0.2;
  cfg.latent_dim = l;
  return cfg;
}

ClusterModel single_cluster(std::size_t p) {
  ClusterModel m;
  m.num_clusters = 1;
  m.memberships = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(p), 1);
  m.hard_assign.assign(p, 0);
  return m;
}

double user_fd_error(const Problem& pr, const LatentFactors& base, UserId u, const TrainingConfig& cfg) {
  const auto data = pr.data();
  auto f = [&](const Eigen::VectorXd& x) {
    LatentFactors moved = base;
    moved.S.col(u) = x;
    return loss(moved, data, cfg).total();
  };
  return oracle::relative_error(grad_user(u, base, data, cfg), oracle::central_difference(f, base.S.col(u)));
}

double item_fd_error(const Problem& pr, const LatentFactors& base, ItemId i, const TrainingConfig& cfg) {
  const auto data = pr.data();
  auto f = [&](const Eigen::VectorXd& x) {
    LatentFactors moved = base;
    moved.V.col(i) = x;
    return loss(moved, data, cfg).total();
  };
  return oracle::relative_error(grad_item(i, base, pr.tensor, cfg), oracle::central_difference(f, base.V.col(i)));
}

}  // namespace

TEST(Loss, ZeroFactorsBinaryIsHalfTheEntryCount) {
  const Problem pr = random_problem(1, 5, 6, false);
  TrainingConfig cfg = small_cfg(0.1, 0.1, 3);
  cfg.scalar_mode = ScalarMode::kBinary;
  LatentFactors z{Eigen::MatrixXd::Zero(3, 5), Eigen::MatrixXd::Zero(3, 6)};
  const LossBreakdown b = loss(z, pr.data(), cfg);
  EXPECT_EQ(b.fit, 0.5 * static_cast<double>(pr.tensor.num_entries()));
  EXPECT_EQ(b.l2_s + b.l2_v + b.user_item + b.social, 0.0);
}

TEST(Loss, ExactFactorizationWithoutRegularizersIsZero) {
  const Problem pr = random_problem(2, 5, 6, false);
  TrainingConfig cfg = small_cfg(0, 0, 1);
  cfg.lambda1 = cfg.lambda2 = 0;
  cfg.scalar_mode = ScalarMode::kBinary;
  LatentFactors ones{Eigen::MatrixXd::Ones(1, 5), Eigen::MatrixXd::Ones(1, 6)};
  EXPECT_EQ(loss(ones, pr.data(), cfg).total(), 0.0);
}

TEST(Loss, MatchesNaiveTripleLoop) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (bool soft : {false, true}) {
      const Problem pr = random_problem(seed, 4, 5, soft);
      std::mt19937_64 rng(seed + 100);
      const LatentFactors f = oracle::random_factors(rng, 2, 4, 5);
      for (auto mode : {ScalarMode::kBinary, ScalarMode::kTagCount}) {
        TrainingConfig cfg = small_cfg(0.07, 0.11, 2);
        cfg.scalar_mode = mode;
        const double got = loss(f, pr.data(), cfg).total();
        const double want =
            oracle::naive_loss(f.S, f.V, pr.tensor, pr.graph, [&](UserId u, UserId v) { return pr.sim(u, v); }, cfg);
        EXPECT_NEAR(got, want, 1e-10 * std::abs(want)) << "seed " << seed;
      }
    }
  }
}

TEST(Loss, ShapeMismatchRejected) {
  const Problem pr = random_problem(3, 5, 6, false);
  LatentFactors f{Eigen::MatrixXd::Zero(2, 4), Eigen::MatrixXd::Zero(2, 6)};
  EXPECT_THROW(loss(f, pr.data(), small_cfg(0, 0, 2)), ShapeError);
}

TEST(GradUser, IsolatedUserWithoutItemsIsOnlyTheL2Term) {
  std::vector<std::vector<Entry>> rows(3);
  rows[0] = {{0, {{0, 1}}}};
  rows[1] = {{0, {{0, 2}}}};
  const std::vector<std::pair<UserId, UserId>> edges = {{0, 1}};
  const Problem pr(TagTensor(3, 1, 1, rows), FriendshipGraph(3, edges), single_cluster(3), SimilarityMode::kHard);
  std::mt19937_64 rng(4);
  const LatentFactors f = oracle::random_factors(rng, 3, 3, 1);
  TrainingConfig cfg = small_cfg(0.5, 0.5, 3);
  cfg.lambda1 = 1.0;
  EXPECT_TRUE(grad_user(2, f, pr.data(), cfg).isApprox(f.S.col(2)));
  EXPECT_EQ(grad_user(2, f, pr.data(), cfg), Eigen::VectorXd(f.S.col(2)));
}

TEST(GradUser, EqualToOnlyFriendHasNoSocialPart) {
  std::vector<std::vector<Entry>> rows(2);
  rows[0] = {{0, {{0, 1}}}, {1, {{1, 1}}}};
  rows[1] = {{0, {{0, 1}}}};
  const std::vector<std::pair<UserId, UserId>> edges = {{0, 1}};
  const Problem pr(TagTensor(2, 2, 2, rows), FriendshipGraph(2, edges), single_cluster(2), SimilarityMode::kHard);
  std::mt19937_64 rng(5);
  LatentFactors f = oracle::random_factors(rng, 3, 2, 2);
  f.S.col(1) = f.S.col(0);
  const TrainingConfig cfg = small_cfg(0.4, 0.9, 3);
  EXPECT_EQ(grad_user_social(0, f, pr.data(), cfg), Eigen::VectorXd::Zero(3));
  EXPECT_EQ(grad_user(0, f, pr.data(), cfg), grad_user_local(0, f, pr.data(), cfg));
}

TEST(GradUser, MatchesFiniteDifferencesInEveryRegime) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    for (bool soft : {false, true}) {
      const Problem pr = random_problem(seed, 8, 12, soft);
      std::mt19937_64 rng(seed);
      const LatentFactors f = oracle::random_factors(rng, 4, 8, 12);
      for (double alpha : {0.0, 0.01, 0.1}) {
        for (double beta : {0.0, 0.01, 0.1}) {
          const TrainingConfig cfg = small_cfg(alpha, beta);
          for (UserId u = 0; u < 8; ++u) EXPECT_LT(user_fd_error(pr, f, u, cfg), 1e-4) << seed << " " << u;
          for (ItemId i = 0; i < 12; ++i) EXPECT_LT(item_fd_error(pr, f, i, cfg), 1e-4) << seed << " " << i;
        }
      }
    }
  }
}

TEST(GradUser, LocalPlusSocialIsTheFullGradient) {
  const Problem pr = random_problem(7, 8, 10, true);
  std::mt19937_64 rng(7);
  const LatentFactors f = oracle::random_factors(rng, 4, 8, 10);
  const TrainingConfig cfg = small_cfg(0.1, 0.3);
  for (UserId u = 0; u < 8; ++u) {
    const Eigen::VectorXd split = grad_user_local(u, f, pr.data(), cfg) + grad_user_social(u, f, pr.data(), cfg);
    EXPECT_TRUE(split.isApprox(grad_user(u, f, pr.data(), cfg), 1e-14));
  }
}

// The one-sided form keeps one direction of each pair: alpha * sum_f c_f (S_u - S_f) + beta * sum_f sim (S_u - S_f).
TEST(GradUser, OneSidedFormFollowsItsFormula) {
  const Problem pr = random_problem(8, 7, 9, false);
  std::mt19937_64 rng(8);
  const LatentFactors f = oracle::random_factors(rng, 3, 7, 9);
  TrainingConfig cfg = small_cfg(0.2, 0.3, 3);
  cfg.gradient_form = GradientForm::kOneSided;
  for (UserId u = 0; u < 7; ++u) {
    Eigen::VectorXd want = Eigen::VectorXd::Zero(3);
    for (UserId v : pr.graph.friends(u)) {
      double cf = 0;
      for (ItemId i = 0; i < 9; ++i) cf += oracle::corr(pr.tensor, v, i);
      want += (cfg.alpha * cf + cfg.beta * pr.sim(u, v)) * (f.S.col(u) - f.S.col(v));
    }
    EXPECT_LT(oracle::relative_error(grad_user_social(u, f, pr.data(), cfg), want), 1e-12);
  }
}

TEST(GradItem, UntaggedItemIsOnlyTheL2Term) {
  std::vector<std::vector<Entry>> rows(1);
  rows[0] = {{0, {{0, 1}}}};
  const Problem pr(TagTensor(1, 2, 1, rows), FriendshipGraph(1), single_cluster(1), SimilarityMode::kHard);
  std::mt19937_64 rng(9);
  const LatentFactors f = oracle::random_factors(rng, 2, 1, 2);
  TrainingConfig cfg = small_cfg(0, 0, 2);
  cfg.lambda2 = 1.0;
  EXPECT_EQ(grad_item(1, f, pr.tensor, cfg), Eigen::VectorXd(f.V.col(1)));
}

TEST(GradItem, ExactFactorizationIsStationary) {
  const Problem pr = random_problem(10, 4, 5, false);
  TrainingConfig cfg = small_cfg(0, 0, 1);
  cfg.lambda2 = 0;
  cfg.scalar_mode = ScalarMode::kBinary;
  const LatentFactors ones{Eigen::MatrixXd::Ones(1, 4), Eigen::MatrixXd::Ones(1, 5)};
  for (ItemId i = 0; i < 5; ++i) EXPECT_EQ(grad_item(i, ones, pr.tensor, cfg), Eigen::VectorXd::Zero(1));
}

TEST(Train, ZeroEpochsReturnsTheInitialization) {
  const Problem pr = random_problem(11, 5, 6, false);
  TrainingConfig cfg = small_cfg(0.01, 0.01, 3);
  cfg.max_iter = 0;
  cfg.seed = 42;
  const TrainResult r = train(pr.data(), cfg);
  EXPECT_EQ(r.factors, init_factors(5, 6, cfg));
  EXPECT_TRUE(r.report.loss_trace.empty());
  EXPECT_EQ(r.report.epochs_run, 0u);
}

TEST(Train, InitialValuesAreSmallAndUniform) {
  TrainingConfig cfg;
  cfg.latent_dim = 5;
  cfg.init_scale = 0.01;
  const LatentFactors f = init_factors(30, 40, cfg);
  EXPECT_LE(f.S.cwiseAbs().maxCoeff(), 0.01);
  EXPECT_LE(f.V.cwiseAbs().maxCoeff(), 0.01);
  EXPECT_GT(f.S.cwiseAbs().maxCoeff(), 0.005);
}

TEST(Train, TinyInstanceReducesTheFit) {
  const Problem pr = random_problem(12, 4, 5, false);
  TrainingConfig cfg = small_cfg(0, 0, 2);
  cfg.eta = 0.01;
  cfg.max_iter = 50;
  cfg.init_scale = 0.3;
  const TrainResult r = train(pr.data(), cfg);
  EXPECT_LT(r.report.term_trace.back().fit, r.report.initial.fit);
}

TEST(Train, DescentOverTheFirstTwentyEpochs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (auto mode : {UpdateMode::kPerEntry, UpdateMode::kEpochSocial}) {
      const Problem pr = random_problem(seed, 5, 6, seed % 2 == 0);
      TrainingConfig cfg = small_cfg(0.05, 0.05, 3);
      cfg.eta = 0.01;
      cfg.max_iter = 20;
      cfg.conv_tol = 1e-300;
      cfg.init_scale = 0.3;
      cfg.update_mode = mode;
      const TrainResult r = train(pr.data(), cfg);
      double prev = r.report.initial.total();
      for (double l : r.report.loss_trace) {
        EXPECT_LE(l, prev * (1 + 1e-9)) << "seed " << seed;
        prev = l;
      }
    }
  }
}

TEST(Train, DeterministicAndTermsAddUp) {
  const Problem pr = random_problem(13, 8, 10, true);
  TrainingConfig cfg = small_cfg(0.02, 0.05, 4);
  cfg.eta = 0.02;
  cfg.max_iter = 15;
  cfg.seed = 9;
  const TrainResult a = train(pr.data(), cfg);
  const TrainResult b = train(pr.data(), cfg);
  EXPECT_EQ(a.factors, b.factors);
  EXPECT_EQ(a.report.loss_trace, b.report.loss_trace);
  ASSERT_EQ(a.report.loss_trace.size(), a.report.epochs_run);
  for (std::size_t e = 0; e < a.report.loss_trace.size(); ++e) {
    const auto& t = a.report.term_trace[e];
    const double sum = t.fit + t.l2_s + t.l2_v + t.user_item + t.social;
    EXPECT_NEAR(a.report.loss_trace[e], sum, 1e-8 * std::abs(sum));
  }
  EXPECT_TRUE(a.factors.S.allFinite());
  EXPECT_TRUE(a.factors.V.allFinite());
}

TEST(Train, StopsWhenConverged) {
  const Problem pr = random_problem(14, 5, 6, false);
  TrainingConfig cfg = small_cfg(0.01, 0.01, 3);
  cfg.eta = 0.02;
  cfg.max_iter = 5000;
  cfg.conv_tol = 1e-4;
  const TrainResult r = train(pr.data(), cfg);
  EXPECT_TRUE(r.report.converged);
  EXPECT_LT(r.report.epochs_run, 5000u);
}

TEST(Train, DivergenceNamesTheEpoch) {
  const Problem pr = random_problem(15, 6, 8, false);
  TrainingConfig cfg = small_cfg(0.01, 0.01, 4);
  cfg.eta = 50.0;
  cfg.init_scale = 1.0;
  try {
    train(pr.data(), cfg);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.category(), "divergence");
    EXPECT_GE(e.epoch(), 1u);
    EXPECT_NE(std::string(e.what()).find("eta"), std::string::npos);
  }
}

TEST(Train, SocialWeightPullsFriendsTogether) {
  std::vector<std::vector<Entry>> rows(2);
  rows[0] = {{0, {{0, 1}}}, {1, {{1, 2}}}};
  rows[1] = {{0, {{0, 1}}}, {2, {{2, 3}}}};
  const std::vector<std::pair<UserId, UserId>> edges = {{0, 1}};
  const Problem pr(TagTensor(2, 3, 3, rows), FriendshipGraph(2, edges), single_cluster(2), SimilarityMode::kSoft);
  ASSERT_EQ(pr.sim(0, 1), 1.0);
  auto gap = [&](double beta) {
    TrainingConfig cfg = small_cfg(0, beta, 3);
    cfg.eta = 0.02;
    cfg.max_iter = 3000;
    cfg.conv_tol = 1e-12;
    cfg.init_scale = 0.3;
    const TrainResult r = train(pr.data(), cfg);
    return (r.factors.S.col(0) - r.factors.S.col(1)).norm();
  };
  EXPECT_LT(gap(1.0), gap(0.0));
}

TEST(Train, InvalidConfigNamesTheKey) {
  const Problem pr = random_problem(16, 4, 4, false);
  TrainingConfig cfg;
  cfg.eta = 0;
  try {
    train(pr.data(), cfg);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "eta");
  }
  cfg = TrainingConfig{};
  cfg.beta = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Predict, Examples) {
  LatentFactors f{Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Zero(1, 2)};
  f.S(0, 1) = 2;
  f.V(0, 0) = 3;
  f.V(0, 1) = -7;
  EXPECT_EQ(predict(f, 0, 0), 0.0);
  EXPECT_EQ(predict(f, 0, 1), 0.0);
  EXPECT_EQ(predict(f, 1, 0), 6.0);
  EXPECT_THROW(predict(f, 2, 0), IndexError);
}

TEST(Predict, ScoreMatrixIsTheNaiveProduct) {
  std::mt19937_64 rng(17);
  const LatentFactors f = oracle::random_factors(rng, 2, 3, 3);
  const Eigen::MatrixXd m = score_matrix(f);
  for (int u = 0; u < 3; ++u) {
    for (int i = 0; i < 3; ++i) {
      double s = 0;
      for (int d = 0; d < 2; ++d) s += f.S(d, u) * f.V(d, i);
      EXPECT_NEAR(m(u, i), s, 1e-15);
    }
  }
}

TEST(Checkpoint, BitExactRoundTrip) {
  std::mt19937_64 rng(18);
  const LatentFactors f = oracle::random_factors(rng, 5, 7, 11);
  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  write_checkpoint(buf, f, ScalarMode::kBinary, 1234);
  const std::string bytes = buf.str();
  const Checkpoint ck = read_checkpoint(buf);
  EXPECT_EQ(ck.factors, f);
  EXPECT_EQ(ck.header.num_users, 7u);
  EXPECT_EQ(ck.header.num_items, 11u);
  EXPECT_EQ(ck.header.latent_dim, 5u);
  EXPECT_EQ(ck.header.scalar_mode, ScalarMode::kBinary);
  EXPECT_EQ(ck.header.seed, 1234u);
  EXPECT_EQ(bytes.substr(0, 8), "FSRECFAC");
  EXPECT_EQ(bytes.size(), 8u + 4 + 8 * 3 + 1 + 8 + 8 * 5 * (7 + 11));

  std::stringstream again;
  write_checkpoint(again, ck.factors, ck.header.scalar_mode, ck.header.seed);
  EXPECT_EQ(again.str(), bytes);

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_checkpoint(truncated), IoError);
  std::stringstream trailing(bytes + "x");
  EXPECT_THROW(read_checkpoint(trailing), IoError);
  std::stringstream garbage("not a checkpoint at all");
  EXPECT_THROW(read_checkpoint(garbage), IoError);
}

TEST(Checkpoint, MetadataRoundTrip) {
  const std::map<std::string, std::string> meta = {{"model", "frsbosn"}, {"config.train.eta", "0.5"}};
  std::stringstream buf;
  write_metadata(buf, meta);
  EXPECT_EQ(read_metadata(buf), meta);
}

TEST(LossTrace, TsvHeaderAndRows) {
  TrainReport r;
  r.loss_trace = {3.5};
  r.term_trace = {LossBreakdown{1, 0.5, 0.5, 1, 0.5}};
  r.epochs_run = 1;
  std::ostringstream out;
  write_loss_trace(out, r);
  EXPECT_EQ(out.str(), "epoch\ttotal\tfit\tl2s\tl2v\tuseritem\tsocial\n1\t3.5\t1\t0.5\t0.5\t1\t0.5\n");
}

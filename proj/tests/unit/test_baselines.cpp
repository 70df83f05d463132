#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fsrec/baselines.hpp"
#include "fsrec/errors.hpp"
#include "oracles.hpp"

using namespace fsrec;

namespace {

std::vector<double> score_all(const Scorer& s, UserId u) {
  std::vector<ItemId> items(s.num_items());
  std::iota(items.begin(), items.end(), 0);
  std::vector<double> out(items.size());
  s.score(u, items, out);
  return out;
}

// u0 used tag 0 three times (once on item 0, twice on item 2); item 1 carries
// tag 0 twice and tag 1 once from u1.
TagTensor pop_fixture() {
  std::vector<std::vector<Entry>> rows(3);
  rows[0] = {{0, {{0, 1}}}, {2, {{0, 2}, {2, 5}}}};
  rows[1] = {{1, {{0, 2}, {1, 1}}}};
  return TagTensor(3, 3, 3, rows);
}

}  // namespace

TEST(Pop, Examples) {
  const TagTensor t = pop_fixture();
  EXPECT_EQ(pop_score(0, 1, t), 6.0);
  EXPECT_EQ(pop_score(2, 1, t), 0.0);
  // Tag 2 appears only on u0's own item and contributes nothing to item 1.
  EXPECT_EQ(pop_score(1, 0, t), 2.0);
  const PopScorer s(t);
  EXPECT_EQ(score_all(s, 0)[1], 6.0);
  for (double v : score_all(s, 2)) EXPECT_EQ(v, 0.0);
}

TEST(Pop, ScorerAgreesWithPointwiseScore) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const TagTensor t = oracle::random_tensor(rng, 8, 10, 5, 1, 4);
    const PopScorer s(t);
    for (UserId u = 0; u < 8; ++u) {
      const auto all = score_all(s, u);
      for (ItemId i = 0; i < 10; ++i) EXPECT_EQ(all[i], pop_score(u, i, t));
    }
  }
}

TEST(Pop, TagRelabelingDoesNotChangeScores) {
  std::mt19937_64 rng(3);
  const TagTensor t = oracle::random_tensor(rng, 6, 8, 5, 1, 4);
  const std::vector<TagId> perm = {3, 0, 4, 1, 2};
  std::vector<std::vector<Entry>> rows(6);
  for (UserId u = 0; u < 6; ++u) {
    for (const auto& e : t.row(u)) {
      TagVector tags;
      for (const auto& tc : e.tags) tags.push_back({perm[tc.tag], tc.count});
      std::sort(tags.begin(), tags.end(), [](const TagCount& a, const TagCount& b) { return a.tag < b.tag; });
      rows[u].push_back({e.item, tags});
    }
  }
  const TagTensor relabeled(6, 8, 5, rows);
  for (UserId u = 0; u < 6; ++u) {
    for (ItemId i = 0; i < 8; ++i) EXPECT_EQ(pop_score(u, i, t), pop_score(u, i, relabeled));
  }
}

TEST(Ucf, NeighborsWithoutTheItemScoreZero) {
  std::vector<std::vector<Entry>> rows(2);
  rows[0] = {{0, {{0, 1}}}};
  rows[1] = {{0, {{0, 1}}}};
  const TagTensor t(2, 2, 1, rows);
  EXPECT_EQ(ucf_score(0, 1, t, 1), 0.0);
  EXPECT_EQ(ucf_score(0, 0, t, 1), 1.0);
}

// u0 and u1 share tag profiles, u2 is orthogonal.
TEST(Ucf, HandFixture) {
  std::vector<std::vector<Entry>> rows(3);
  rows[0] = {{0, {{0, 1}}}};
  rows[1] = {{0, {{0, 1}}}, {1, {{0, 1}}}};
  rows[2] = {{2, {{1, 1}}}};
  const TagTensor t(3, 3, 2, rows);
  EXPECT_DOUBLE_EQ(ucf_score(0, 1, t, 1), 1.0);
  EXPECT_EQ(ucf_score(0, 2, t, 1), 0.0);
  // With k = 2 u2 joins the neighborhood but has similarity 0.
  EXPECT_EQ(ucf_score(0, 2, t, 2), 0.0);
  const UcfScorer s(t, 1);
  ASSERT_EQ(s.neighbors(0).size(), 1u);
  EXPECT_EQ(s.neighbors(0)[0].user, 1u);
  EXPECT_DOUBLE_EQ(score_all(s, 0)[1], 1.0);
  EXPECT_TRUE(s.warnings().empty());
}

TEST(Ucf, OversizedNeighborhoodIsClamped) {
  std::mt19937_64 rng(4);
  const TagTensor t = oracle::random_tensor(rng, 5, 6, 4, 1, 3);
  const UcfScorer s(t, 50);
  EXPECT_EQ(s.neighborhood_size(), 4u);
  ASSERT_EQ(s.warnings().size(), 1u);
  EXPECT_NE(s.warnings()[0].find("clamped"), std::string::npos);
}

TEST(Ucf, EmptyNeighborhoodScoresZero) {
  std::mt19937_64 rng(5);
  const TagTensor t = oracle::random_tensor(rng, 5, 6, 4, 1, 3);
  const UcfScorer s(t, 0);
  for (double v : score_all(s, 2)) EXPECT_EQ(v, 0.0);
}

TEST(Ucf, ScorerAgreesWithPointwiseScore) {
  std::mt19937_64 rng(6);
  const TagTensor t = oracle::random_tensor(rng, 9, 10, 5, 1, 4);
  const UcfScorer s(t, 3);
  for (UserId u = 0; u < 9; ++u) {
    const auto all = score_all(s, u);
    for (ItemId i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(all[i], ucf_score(u, i, t, 3));
  }
}

TEST(FactorScorer, DotProducts) {
  std::mt19937_64 rng(7);
  const LatentFactors f = oracle::random_factors(rng, 3, 4, 5);
  const FactorScorer s("x", f);
  const auto all = score_all(s, 2);
  for (ItemId i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(all[i], f.S.col(2).dot(f.V.col(i)));
  std::vector<double> wrong(2);
  const std::vector<ItemId> items = {0, 1, 2};
  EXPECT_THROW(s.score(0, items, wrong), ShapeError);
}

TEST(SoReg, IsTrainingWithoutTheUserItemTerm) {
  const auto inst = oracle::random_instance(8, 8, 10);
  const auto sims = build_similarity_table(inst.graph, inst.tensor, inst.hard, SimilarityMode::kHard, 0.8);
  const auto corrs = build_correlation_table(inst.graph, inst.tensor);
  const TrainingData data{inst.tensor, inst.graph, sims, corrs};
  TrainingConfig cfg;
  cfg.eta = 0.02;
  cfg.latent_dim = 4;
  cfg.max_iter = 10;
  cfg.alpha = 0.3;
  cfg.beta = 0.05;
  const TrainResult soreg = soreg_train(data, cfg);
  TrainingConfig zero = cfg;
  zero.alpha = 0;
  const TrainResult direct = train(data, zero);
  EXPECT_EQ(soreg.factors, direct.factors);
  for (const auto& t : soreg.report.term_trace) EXPECT_EQ(t.user_item, 0.0);

  // With beta = 0 as well it is plain regularized factorization.
  TrainingConfig plain = zero;
  plain.beta = 0;
  for (const auto& t : train(data, plain).report.term_trace) EXPECT_EQ(t.social + t.user_item, 0.0);
}

// u0 used "design" three times; two other users tagged item 2 "design" once each.
TEST(Pop, TwoTaggersOnceEach) {
  std::vector<std::vector<Entry>> rows(3);
  rows[0] = {{0, {{0, 2}}}, {1, {{0, 1}}}};
  rows[1] = {{2, {{0, 1}}}};
  rows[2] = {{2, {{0, 1}, {1, 4}}}};
  EXPECT_EQ(pop_score(0, 2, TagTensor(3, 3, 2, rows)), 6.0);
}

TEST(Pop, ItemRelabelingPermutesScores) {
  std::mt19937_64 rng(11);
  const TagTensor t = oracle::random_tensor(rng, 6, 8, 5, 1, 4);
  std::vector<ItemId> perm(8);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<Entry>> rows(6);
  for (UserId u = 0; u < 6; ++u) {
    for (const auto& e : t.row(u)) rows[u].push_back({perm[e.item], e.tags});
    std::sort(rows[u].begin(), rows[u].end(), [](const Entry& a, const Entry& b) { return a.item < b.item; });
  }
  const TagTensor moved(6, 8, 5, rows);
  for (UserId u = 0; u < 6; ++u) {
    for (ItemId i = 0; i < 8; ++i) EXPECT_EQ(pop_score(u, i, t), pop_score(u, perm[i], moved));
  }
}

// Profiles u0 (1,1,0), u1 (2,0,0), u2 (0,1,1): cos(u0,u1) = 1/sqrt2, cos(u0,u2) = 1/2.
TEST(Ucf, ThreeUserHandArithmetic) {
  std::vector<std::vector<Entry>> rows(3);
  rows[0] = {{0, {{0, 1}, {1, 1}}}};
  rows[1] = {{0, {{0, 1}}}, {1, {{0, 1}}}};
  rows[2] = {{1, {{1, 1}}}, {2, {{2, 1}}}};
  const TagTensor t(3, 3, 3, rows);
  EXPECT_DOUBLE_EQ(ucf_score(0, 1, t, 2), 1.0 / std::sqrt(2.0) + 0.5);
  EXPECT_DOUBLE_EQ(ucf_score(0, 2, t, 2), 0.5);
  EXPECT_DOUBLE_EQ(ucf_score(0, 1, t, 1), 1.0 / std::sqrt(2.0));
  EXPECT_EQ(ucf_score(0, 2, t, 1), 0.0);
  EXPECT_EQ(ucf_score(0, 1, t, 0), 0.0);
}

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "fsrec/pipeline.hpp"
#include "fsrec/synthetic.hpp"

using namespace fsrec;

namespace {

// A generated desk-scale corpus with both similarity tables built once.
struct Fixture {
  DataSplit split;
  FriendshipGraph graph;
  ClusterModel clusters;
  SimilarityTable sims;
  CorrelationTable corrs;
  TrainingConfig cfg;

  Fixture() {
    SyntheticParams p;
    p.seed = 7;
    p.between_fraction = 0.3;
    const SyntheticCorpus syn = generate_synthetic(p);
    PruneResult pr = prune(syn.corpus.tensor, syn.graph, 2, true);
    split = fsrec::split(pr.tensor, 0.2, 7);
    graph = std::move(pr.graph);
    ExperimentConfig ec = preset("desk-synthetic");
    clusters = cluster_users(split.train, ModelKind::kFRSboSN, ec);
    sims = build_similarity_table(graph, split.train, clusters, SimilarityMode::kSoft, ec.lambda);
    corrs = build_correlation_table(graph, split.train);
    cfg = ec.training();
  }

  TrainingData data() const { return {split.train, graph, sims, corrs}; }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Loss(benchmark::State& state) {
  const Fixture& f = fixture();
  const LatentFactors factors = init_factors(f.split.train.num_users(), f.split.train.num_items(), f.cfg);
  for (auto _ : state) benchmark::DoNotOptimize(loss(factors, f.data(), f.cfg).total());
}
BENCHMARK(BM_Loss);

void BM_GradUserAllUsers(benchmark::State& state) {
  const Fixture& f = fixture();
  const LatentFactors factors = init_factors(f.split.train.num_users(), f.split.train.num_items(), f.cfg);
  for (auto _ : state) {
    for (UserId u = 0; u < f.split.train.num_users(); ++u) {
      benchmark::DoNotOptimize(grad_user(u, factors, f.data(), f.cfg));
    }
  }
}
BENCHMARK(BM_GradUserAllUsers);

void BM_TrainEpoch(benchmark::State& state) {
  const Fixture& f = fixture();
  TrainingConfig cfg = f.cfg;
  cfg.max_iter = 1;
  cfg.update_mode = state.range(0) == 0 ? UpdateMode::kPerEntry : UpdateMode::kEpochSocial;
  for (auto _ : state) benchmark::DoNotOptimize(train(f.data(), cfg).report.loss_trace);
}
BENCHMARK(BM_TrainEpoch)->Arg(0)->Arg(1);

void BM_CMeans(benchmark::State& state) {
  const Fixture& f = fixture();
  const Eigen::MatrixXd x = normalized_profiles(f.split.train);
  ClusterParams p;
  p.num_clusters = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cmeans(x, p).objective_trace);
}
BENCHMARK(BM_CMeans)->Arg(2)->Arg(10);

void BM_TopK(benchmark::State& state) {
  const Fixture& f = fixture();
  const FactorScorer scorer("f", init_factors(f.split.train.num_users(), f.split.train.num_items(), f.cfg));
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    for (UserId u = 0; u < f.split.train.num_users(); ++u) benchmark::DoNotOptimize(top_k(u, scorer, k, f.split.train));
  }
}
BENCHMARK(BM_TopK)->Arg(1)->Arg(5)->Arg(50);

}  // namespace

BENCHMARK_MAIN();

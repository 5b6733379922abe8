#include <benchmark/benchmark.h>

#include "daa/bias_lab.hpp"
#include "daa/harness.hpp"
#include "daa/mlp.hpp"
#include "daa/objectives.hpp"
#include "daa/toy_policy.hpp"

using namespace daa;

static void BM_ScalarLoss(benchmark::State& state) {
  const ObjectiveSpec spec{static_cast<ObjectiveKind>(state.range(0)), 1.0};
  CounterRng rng(1);
  std::vector<ScorePair> inputs(1024);
  for (auto& s : inputs) s = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scalar_loss(spec, inputs[i++ & 1023]));
  }
  state.SetLabel(std::string(to_string(spec.kind)));
}
BENCHMARK(BM_ScalarLoss)
    ->Arg(static_cast<int>(ObjectiveKind::DPO))
    ->Arg(static_cast<int>(ObjectiveKind::IPO))
    ->Arg(static_cast<int>(ObjectiveKind::ASFTAlign))
    ->Arg(static_cast<int>(ObjectiveKind::NCA))
    ->Arg(static_cast<int>(ObjectiveKind::CalDPO))
    ->Arg(static_cast<int>(ObjectiveKind::APOZero));

static void BM_TabularPairLoss(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<int> lengths(n, 3);
  CounterRng rng(2);
  std::vector<double> logits(n);
  for (double& v : logits) v = rng.uniform(-2, 2);
  const TabularPolicy pol(1, lengths, logits);
  const TabularPolicy ref(1, lengths);
  const ObjectiveSpec spec{ObjectiveKind::ASFTAlign};
  for (auto _ : state) {
    benchmark::DoNotOptimize(pair_loss(spec, pol, ref, 0, 0, 1));
  }
}
BENCHMARK(BM_TabularPairLoss)->Arg(4)->Arg(64)->Arg(1024);

static void BM_BatchGradient(benchmark::State& state) {
  const std::size_t h = static_cast<std::size_t>(state.range(0));
  const ToyDataset d = generate(BiasConfig{});
  const ScorerParams p = init_scorer(h, 3);
  const ObjectiveSpec spec{ObjectiveKind::DPO};
  for (auto _ : state) {
    benchmark::DoNotOptimize(batch_gradient(p, d.train, spec));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.train.size()));
}
BENCHMARK(BM_BatchGradient)->Arg(1)->Arg(3)->Arg(8);

static void BM_RunSingle(benchmark::State& state) {
  RunSpec rs;
  rs.objective = {ObjectiveKind::NCA};
  rs.hidden = static_cast<std::size_t>(state.range(0));
  rs.bias_strength = 0.9;
  rs.lr = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_single(rs));
    ++rs.seed;
  }
}
BENCHMARK(BM_RunSingle)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

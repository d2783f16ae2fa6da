#include <random>

#include <benchmark/benchmark.h>

#include "semcond/compiled_knowledge.hpp"
#include "semcond/inference.hpp"
#include "semcond/loss.hpp"

namespace {

using namespace semcond;

HexGraph chain(std::size_t depth) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < depth; ++i) edges.emplace_back(i, i + 1);
  return HexGraph::from_edges(depth, edges, {});
}

// Complete `branching`-ary tree of the given depth with sibling exclusions.
HexGraph taxonomy(std::size_t branching, std::size_t depth) {
  std::vector<Edge> hier, excl;
  std::vector<std::size_t> level{0};
  std::size_t n = 1;
  for (std::size_t d = 1; d < depth; ++d) {
    std::vector<std::size_t> next;
    for (std::size_t p : level) {
      const std::size_t first = n;
      for (std::size_t b = 0; b < branching; ++b) {
        hier.emplace_back(p, n);
        for (std::size_t s = first; s < n; ++s) excl.emplace_back(s, n);
        next.push_back(n++);
      }
    }
    level = std::move(next);
  }
  return HexGraph::from_edges(n, hier, excl);
}

ActivationVector activations(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<double> v(k);
  for (double& x : v) x = g(rng);
  return ActivationVector(v);
}

void BM_PqeChain(benchmark::State& state) {
  const auto ck = compile(chain(static_cast<std::size_t>(state.range(0))));
  const auto a = activations(ck.num_labels(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(pqe(ck, a));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PqeChain)->RangeMultiplier(2)->Range(16, 4096)->Complexity(benchmark::oN);

void BM_InferTaxonomy(benchmark::State& state) {
  const auto ck = compile(taxonomy(static_cast<std::size_t>(state.range(0)), 4));
  const auto a = activations(ck.num_labels(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(infer(ck, a));
  state.counters["labels"] = static_cast<double>(ck.num_labels());
}
BENCHMARK(BM_InferTaxonomy)->DenseRange(2, 6, 2);

void BM_MapChain(benchmark::State& state) {
  const auto ck = compile(chain(static_cast<std::size_t>(state.range(0))));
  const auto a = activations(ck.num_labels(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(map_state(ck, a));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MapChain)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oN);

void BM_LossSc(benchmark::State& state) {
  const Knowledge kappa(compile(taxonomy(4, 4)));
  const auto a = activations(kappa.num_labels(), 4);
  const LabelVector y = kappa.map_state(a);
  for (auto _ : state) benchmark::DoNotOptimize(loss_sc(kappa, a, y));
}
BENCHMARK(BM_LossSc);

void BM_CompileTaxonomy(benchmark::State& state) {
  const auto h = taxonomy(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(compile(h));
}
BENCHMARK(BM_CompileTaxonomy)->DenseRange(2, 6, 2);

void BM_CompileChain(benchmark::State& state) {
  const auto h = chain(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compile(h));
}
BENCHMARK(BM_CompileChain)->RangeMultiplier(4)->Range(16, 1024);

}  // namespace

BENCHMARK_MAIN();

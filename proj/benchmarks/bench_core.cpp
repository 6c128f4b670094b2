#include <benchmark/benchmark.h>

#include <random>
#include <set>
#include <vector>

#include "goalforge/analytics.hpp"
#include "goalforge/kg.hpp"

using namespace goalforge;

namespace {

std::vector<std::set<int>> tag_sets(std::size_t talks) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> goal(1, 17), count(1, 5);
  std::vector<std::set<int>> out(talks);
  for (auto& s : out) {
    const int n = count(rng);
    while (static_cast<int>(s.size()) < n) s.insert(goal(rng));
  }
  return out;
}

// Chain plus random cross links; some duplicates and dangling targets for repair.
KgDoc graph_doc(std::size_t nodes, bool dirty) {
  std::mt19937_64 rng(13);
  KgDoc doc;
  for (std::size_t i = 0; i < nodes; ++i) {
    doc.nodes.push_back({"node " + std::to_string(i), static_cast<long long>(i + 1), "details"});
  }
  std::uniform_int_distribution<std::size_t> pick(0, nodes - 1);
  for (std::size_t i = 0; i < nodes * 2; ++i) {
    doc.links.push_back({doc.nodes[pick(rng)].id, doc.nodes[pick(rng)].id, "relates to"});
  }
  if (dirty) {
    for (std::size_t i = 0; i < nodes / 10 + 1; ++i) {
      doc.nodes.push_back({" node " + std::to_string(i) + " ", static_cast<long long>(i + 1), "dup"});
      doc.links.push_back({"node 0", "missing " + std::to_string(i), "dangles"});
    }
  }
  return doc;
}

void BM_Cooccurrence(benchmark::State& state) {
  const auto sets = tag_sets(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cooccurrence(sets));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Cooccurrence)->Arg(269)->Arg(1127)->Arg(10000);

void BM_Repair(benchmark::State& state) {
  const auto doc = graph_doc(static_cast<std::size_t>(state.range(0)), true);
  for (auto _ : state) benchmark::DoNotOptimize(validate_and_repair(doc));
}
BENCHMARK(BM_Repair)->Arg(20)->Arg(200)->Arg(2000);

void BM_KgMetrics(benchmark::State& state) {
  const auto graph = make_graph(1, "bench", graph_doc(static_cast<std::size_t>(state.range(0)), false));
  for (auto _ : state) benchmark::DoNotOptimize(kg_metrics(graph));
}
BENCHMARK(BM_KgMetrics)->Arg(20)->Arg(200)->Arg(2000);

void BM_LeveneWelch(benchmark::State& state) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> d(18, 5);
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (auto& x : a) x = d(rng);
  for (auto& x : b) x = d(rng) + 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(levene({a, b}));
    benchmark::DoNotOptimize(welch(a, b));
  }
}
BENCHMARK(BM_LeveneWelch)->Arg(17)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();

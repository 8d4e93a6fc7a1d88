#include <benchmark/benchmark.h>

#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "tarc/code_system.hpp"
#include "tarc/evaluation.hpp"
#include "tarc/transliteration.hpp"

using namespace tarc;

namespace {

std::vector<TrainingPair> corpus(std::size_t n) {
  std::mt19937_64 rng(42);
  testing::SyntheticChannel ch;
  std::vector<TrainingPair> out = testing::gold_pairs();
  while (out.size() < n) {
    std::vector<std::size_t> w;
    for (std::size_t i = 0, len = 2 + rng() % 4; i < len; ++i) {
      std::size_t g = rng() % ch.graphemes.size();
      if (!w.empty() && w.back() == g) g = (g + 1) % ch.graphemes.size();
      w.push_back(g);
    }
    out.push_back(ch.emit(w, rng, MappingTable::builtin()).pair);
  }
  return out;
}

const TransducerModel& model() {
  static const TransducerModel m = TransducerModel::train(corpus(2000));
  return m;
}

std::vector<std::string> tokens(std::size_t n, std::size_t max_units) {
  std::mt19937_64 rng(7);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(testing::random_token(rng, max_units));
  return out;
}

}  // namespace

static void BM_Expand(benchmark::State& state) {
  const auto toks = tokens(256, static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(expand(toks[i++ % toks.size()], false));
}
BENCHMARK(BM_Expand)->Arg(3)->Arg(6);

static void BM_Search(benchmark::State& state) {
  const auto& m = model();
  const auto toks = tokens(256, static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(m.search(toks[i++ % toks.size()]));
}
BENCHMARK(BM_Search)->Arg(3)->Arg(6)->Unit(benchmark::kMicrosecond);

static void BM_PredictSeen(benchmark::State& state) {
  const auto& m = model();
  for (auto _ : state) benchmark::DoNotOptimize(m.predict("kifech"));
}
BENCHMARK(BM_PredictSeen);

static void BM_Train(benchmark::State& state) {
  const auto pairs = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(TransducerModel::train(pairs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Train)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_Cv(benchmark::State& state) {
  const auto pairs = corpus(2000);
  CvOptions opt;
  for (auto _ : state) benchmark::DoNotOptimize(kfold_cv(pairs, opt));
}
BENCHMARK(BM_Cv)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK_MAIN();

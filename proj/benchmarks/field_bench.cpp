#include <benchmark/benchmark.h>

#include "fpp/edge_field.hpp"
#include "fpp/rng.hpp"

namespace {

void BM_SampleExponentialField(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto box = fpp::LatticeBox::cube(2, -side / 2, side);
  const auto spec = fpp::DistributionSpec::exponential(1.0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto field = fpp::EdgeField::sample(box, spec, seed++);
    benchmark::DoNotOptimize(field);
  }
  state.SetItemsProcessed(state.iterations() * 2 * side * (side - 1));
}
BENCHMARK(BM_SampleExponentialField)->Arg(64)->Arg(256);

void BM_HashWords(benchmark::State& state) {
  std::uint64_t acc = 0;
  std::uint64_t i = 0;
  for (auto _ : state) {
    acc ^= fpp::hash_words(7, {i++, 3, 5});
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_HashWords);

}  // namespace

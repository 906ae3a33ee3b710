#include <benchmark/benchmark.h>

#include "fpp/edge_field.hpp"
#include "fpp/geodesic.hpp"

namespace {

fpp::EdgeField make_field(int side) {
  return fpp::EdgeField::sample(fpp::LatticeBox::cube(2, -side / 2, side), fpp::DistributionSpec::exponential(1.0),
                                11);
}

void BM_ShortestTime(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto field = make_field(side);
  const fpp::Vertex u{0, 0};
  const fpp::Vertex v{side / 4, 0};
  for (auto _ : state) benchmark::DoNotOptimize(fpp::shortest_time(field, u, v));
}
BENCHMARK(BM_ShortestTime)->Arg(64)->Arg(160);

void BM_ExtractGeodesic(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto field = make_field(side);
  const fpp::Vertex u{0, 0};
  const fpp::Vertex v{side / 4, 0};
  for (auto _ : state) benchmark::DoNotOptimize(fpp::extract_geodesic(field, u, v));
}
BENCHMARK(BM_ExtractGeodesic)->Arg(64)->Arg(160);

void BM_RestrictedTime(benchmark::State& state) {
  const auto field = make_field(160);
  const fpp::Vertex u{0, 0};
  const fpp::Vertex v{40, 0};
  for (auto _ : state) benchmark::DoNotOptimize(fpp::restricted_time(field, 1.0, u, v));
}
BENCHMARK(BM_RestrictedTime);

}  // namespace

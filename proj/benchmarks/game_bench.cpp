#include <benchmark/benchmark.h>

#include "fpp/edge_field.hpp"
#include "fpp/game.hpp"

namespace {

void BM_PlanAndPursue(benchmark::State& state) {
  const auto field = fpp::EdgeField::sample(fpp::LatticeBox::cube(2, -40, 80),
                                            fpp::DistributionSpec::uniform(0.0, 1.0), 3);
  const fpp::Vertex x_lambda{0, 0};
  const auto positions = fpp::find_escape_positions(field, x_lambda, 1.0, 30);
  if (positions.empty()) {
    state.SkipWithError("no escape position");
    return;
  }
  for (auto _ : state) {
    const auto plan = fpp::build_escape_plan(field, x_lambda, positions.front(), 1.0, 30);
    if (plan) {
      benchmark::DoNotOptimize(fpp::run_pursuit(field, *plan, {fpp::PolicyKind::kIntercept, 0}, 1e9));
    }
  }
}
BENCHMARK(BM_PlanAndPursue);

}  // namespace

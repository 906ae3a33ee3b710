#include <gtest/gtest.h>

#include "fpp/errors.hpp"
#include "fpp/game.hpp"

namespace fpp {
namespace {

const LatticeBox kBox = LatticeBox::cube(2, -10, 20);

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kRuntimeFailure;
}

EscapePlan hand_plan(std::vector<Vertex> route, std::size_t anchor_index, double M,
                     const EdgeField& f, Vertex x_lambda) {
  EscapePlan p;
  p.x_lambda = x_lambda;
  p.x_sigma = route.front();
  p.M = M;
  p.route = std::move(route);
  p.anchor_index = anchor_index;
  p.anchor = p.route[anchor_index];
  p.arrival.assign(p.route.size(), 0.0);
  for (std::size_t i = 1; i < p.route.size(); ++i) p.arrival[i] = p.arrival[i - 1] + f.weight(p.route[i - 1], p.route[i]);
  p.departure.assign(p.route.size(), 0.0);
  for (std::size_t i = 0; i + 1 < p.route.size(); ++i) p.departure[i] = p.arrival[i + 1];
  p.departure.back() = p.arrival.back() + M;
  return p;
}

TEST(EscapePlan, Errors) {
  const EdgeField unit = EdgeField::constant(kBox, 1.0);
  EXPECT_EQ(code_of([&] { build_escape_plan(unit, {0, 0}, {0, 0}, 1.0, 5); }), ErrorCode::kSamePosition);
  const EdgeField expo = EdgeField::sample(kBox, DistributionSpec::exponential(1.0), 3);
  EXPECT_EQ(code_of([&] { build_escape_plan(expo, {0, 0}, {2, 0}, 1.0, 5); }), ErrorCode::kUnboundedWeights);
  PlanOptions light;
  light.restrict_to_light = true;
  EXPECT_NO_THROW(build_escape_plan(expo, {0, 0}, {2, 0}, 1.0, 5, light));
}

TEST(EscapePlan, SigmaOnRayBeyondMIsItsOwnAnchor) {
  const EdgeField unit = EdgeField::constant(kBox, 1.0);
  const auto plan = build_escape_plan(unit, {0, 0}, {3, 0}, 1.0, 8);
  ASSERT_TRUE(plan.has_value());
  EXPECT_EQ(plan->anchor, Vertex({3, 0}));
  EXPECT_EQ(plan->anchor_index, 0u);
  EXPECT_EQ(plan->approach.vertex_count(), 1u);
  EXPECT_EQ(plan->route.size(), 6u);
  EXPECT_EQ(plan->route.back(), Vertex({8, 0}));
  EXPECT_TRUE(verify_escape_certificate(unit, *plan));
  EXPECT_DOUBLE_EQ(check_escape_certificate(unit, *plan).min_slack, 2.0);
}

TEST(EscapePlan, AbsentWhenNoVertexQualifies) {
  const EdgeField unit = EdgeField::constant(kBox, 1.0);
  // On a constant field t(x_sigma, x) >= t(x_lambda, x) - t(x_lambda, x_sigma).
  EXPECT_FALSE(build_escape_plan(unit, {0, 0}, {1, 0}, 1.0, 8).has_value());
  EXPECT_FALSE(build_escape_plan(unit, {0, 0}, {2, 1}, 1.0, 8).has_value());
}

TEST(EscapePlan, DegenerateTail) {
  const EdgeField unit = EdgeField::constant(kBox, 1.0);
  const auto plan = build_escape_plan(unit, {0, 0}, {5, 0}, 1.0, 5);
  ASSERT_TRUE(plan.has_value());
  EXPECT_TRUE(plan->degenerate);
  const CertificateCheck c = check_escape_certificate(unit, *plan);
  EXPECT_TRUE(c.ok);
  EXPECT_TRUE(c.degenerate);
}

TEST(Certificate, RejectsViolatedPremiseAndMalformedPlans) {
  const EdgeField unit = EdgeField::constant(kBox, 1.0);
  const EscapePlan bad = hand_plan({{1, 0}, {2, 0}, {3, 0}}, 0, 1.0, unit, {0, 0});
  const CertificateCheck c = check_escape_certificate(unit, bad);
  EXPECT_FALSE(c.ok);
  EXPECT_EQ(c.first_failure, 0u);

  EscapePlan broken = bad;
  broken.arrival[1] = 0.5;
  EXPECT_EQ(code_of([&] { verify_escape_certificate(unit, broken); }), ErrorCode::kMalformedPlan);
  broken = bad;
  broken.route[1] = {5, 5};
  EXPECT_EQ(code_of([&] { verify_escape_certificate(unit, broken); }), ErrorCode::kMalformedPlan);
  broken = bad;
  broken.anchor = {9, 9};
  EXPECT_EQ(code_of([&] { verify_escape_certificate(unit, broken); }), ErrorCode::kMalformedPlan);
}

TEST(Pursuit, StationaryAndSlowPursuersLose) {
  const EdgeField unit = EdgeField::constant(kBox, 1.0);
  const auto plan = build_escape_plan(unit, {0, 0}, {3, 0}, 1.0, 8);
  ASSERT_TRUE(plan.has_value());
  const GameTrace still = run_pursuit(unit, *plan, {PolicyKind::kStationary, 0}, 100.0);
  EXPECT_FALSE(still.caught);
  EXPECT_DOUBLE_EQ(still.horizon, 6.0);
  const GameTrace short_run = run_pursuit(unit, *plan, {PolicyKind::kGreedy, 0}, 2.5);
  EXPECT_FALSE(short_run.caught);
  EXPECT_DOUBLE_EQ(short_run.horizon, 2.5);
}

TEST(Pursuit, CaptureSemantics) {
  const EdgeField unit = EdgeField::constant(kBox, 1.0);
  // sigma walks through lambda's stationary vertex.
  const EscapePlan through = hand_plan({{-1, 0}, {0, 0}, {1, 0}, {2, 0}}, 2, 1.0, unit, {0, 0});
  const GameTrace t1 = run_pursuit(unit, through, {PolicyKind::kStationary, 0}, 10.0);
  ASSERT_TRUE(t1.caught);
  EXPECT_DOUBLE_EQ(t1.capture_time, 1.0);
  EXPECT_EQ(t1.capture_vertex, Vertex({0, 0}));
  EXPECT_EQ(t1.capture_phase, CapturePhase::kApproach);
  EXPECT_EQ(t1.events.back().kind, EventKind::kCapture);

  const EscapePlan through_tail = hand_plan({{-1, 0}, {0, 0}, {1, 0}}, 0, 1.0, unit, {0, 0});
  EXPECT_EQ(run_pursuit(unit, through_tail, {PolicyKind::kStationary, 0}, 10.0).capture_phase, CapturePhase::kTail);

  // Opposite crossings of one edge at the same instant do not collide.
  const EscapePlan swap = hand_plan({{1, 0}, {0, 0}}, 0, 1.0, unit, {0, 0});
  const GameTrace t2 = run_pursuit(unit, swap, {PolicyKind::kGreedy, 0}, 10.0);
  EXPECT_FALSE(t2.caught);

  // Simultaneous arrival at a vertex is a capture.
  const EscapePlan meet = hand_plan({{2, 0}, {1, 0}, {1, 1}}, 0, 1.0, unit, {0, 0});
  const GameTrace t3 = run_pursuit(unit, meet, {PolicyKind::kIntercept, 0}, 10.0);
  ASSERT_TRUE(t3.caught);
  EXPECT_DOUBLE_EQ(t3.capture_time, 1.0);
  EXPECT_EQ(t3.capture_vertex, Vertex({1, 0}));
}

TEST(Pursuit, ParsePolicies) {
  EXPECT_EQ(parse_policy("greedy"), PolicyKind::kGreedy);
  EXPECT_EQ(parse_policy("random-walk"), PolicyKind::kRandomWalk);
  EXPECT_EQ(parse_policy(policy_name(PolicyKind::kIntercept)), PolicyKind::kIntercept);
  EXPECT_EQ(code_of([] { parse_policy("teleport"); }), ErrorCode::kConfigInvalid);
}

class UniformFieldGames : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(UniformFieldGames, CertifiedPlansSurviveTheTail) {
  const LatticeBox box = LatticeBox::cube(2, -20, 40);
  const EdgeField f = EdgeField::sample(box, DistributionSpec::uniform(0, 1), GetParam());
  const Vertex x_lambda{0, 0};
  const int horizon = 18;
  const std::vector<Vertex> candidates = find_escape_positions(f, x_lambda, 1.0, horizon);
  ASSERT_FALSE(candidates.empty());
  const PathRecord ray = finite_horizon_ray(f, x_lambda, 0, 1, horizon);
  for (std::size_t k = 1; k < ray.vertex_count(); ++k) {
    if (shortest_time(f, x_lambda, ray[k]) > 1.0) {
      EXPECT_TRUE(std::binary_search(candidates.begin(), candidates.end(), ray[k]));
    }
  }
  EXPECT_FALSE(std::binary_search(candidates.begin(), candidates.end(), x_lambda));

  for (std::size_t i = 0; i < candidates.size(); i += 1 + candidates.size() / 6) {
    const auto plan = build_escape_plan(f, x_lambda, candidates[i], 1.0, horizon);
    ASSERT_TRUE(plan.has_value()) << candidates[i].to_string();
    EXPECT_LT(plan->M + plan->sigma_to_anchor, plan->lambda_to_anchor);
    EXPECT_TRUE(verify_escape_certificate(f, *plan));
    for (PolicyKind kind : {PolicyKind::kGreedy, PolicyKind::kIntercept, PolicyKind::kRandomWalk,
                            PolicyKind::kStationary}) {
      const GameTrace trace = run_pursuit(f, *plan, {kind, GetParam()}, 1e9);
      EXPECT_NE(trace.capture_phase, CapturePhase::kTail) << policy_name(kind);
      for (std::size_t e = 1; e < trace.events.size(); ++e) {
        EXPECT_LE(trace.events[e - 1].time, trace.events[e].time);
      }
      // Knock-to-cross gaps equal the edge weight.
      for (const GameEvent& knock : trace.events) {
        if (knock.kind != EventKind::kKnock) continue;
        for (const GameEvent& cross : trace.events) {
          if (cross.kind == EventKind::kCross && cross.player == knock.player && cross.from == knock.from &&
              cross.to == knock.to && cross.time >= knock.time) {
            EXPECT_NEAR(cross.time - knock.time, f.weight(knock.from, knock.to), 1e-12);
            break;
          }
        }
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, UniformFieldGames, ::testing::Values(1u, 2u, 3u, 4u));

TEST(EscapePositions, RestrictedModeOnUnboundedWeights) {
  const EdgeField f = EdgeField::sample(LatticeBox::cube(2, -15, 30), DistributionSpec::exponential(1.0), 8);
  PlanOptions light;
  light.restrict_to_light = true;
  const auto candidates = find_escape_positions(f, {0, 0}, 2.0, 10, light);
  for (std::size_t i = 0; i < candidates.size(); i += 1 + candidates.size() / 5) {
    const auto plan = build_escape_plan(f, {0, 0}, candidates[i], 2.0, 10, light);
    ASSERT_TRUE(plan.has_value());
    EXPECT_TRUE(verify_escape_certificate(f, *plan));
  }
}

}  // namespace
}  // namespace fpp

#include <gtest/gtest.h>
#include <gmpxx.h>

#include <random>

#include "../support/shortcut_checks.hpp"
#include "fpp/errors.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/shortcut.hpp"

namespace fpp {
namespace {

// 2M + 1 + r + delta/(24d) + K delta/2 < K delta, in GMP rationals.
bool sucesso(double M, double r, double delta, int d, std::int64_t K) {
  const mpq_class m(M), rr(r), dl(delta), k(static_cast<long>(K));
  const mpq_class lhs = 2 * m + 1 + rr + dl / (24 * d) + k * dl / 2;
  return lhs < k * dl;
}

TEST(MinK, Examples) {
  EXPECT_EQ(min_K(1, 0, 1, 2), 7);
  EXPECT_EQ(min_K(1, 0, 10, 2), 1);
  EXPECT_EQ(min_K(2, 1, 1, 2), 13);
  try {
    min_K(1, 0, 0, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidDelta);
  }
  EXPECT_THROW(min_K(1, 0, -1, 2), Error);
}

TEST(MinK, BoundaryAgainstGmp) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double M = 10.0 * (1.0 - unit(gen));
    const double r = 5.0 * unit(gen);
    const double delta = 10.0 * (1.0 - unit(gen));
    const int d = 2 + static_cast<int>(gen() % 2);
    const std::int64_t K = min_K(M, r, delta, d);
    EXPECT_TRUE(sucesso(M, r, delta, d, K));
    EXPECT_FALSE(sucesso(M, r, delta, d, K - 1));
  }
  // Exact tie at K = 1: 2*11 + 1 + 0 + 48/48 = 24 = K * 48 / 2.
  EXPECT_FALSE(sucesso(11, 0, 48, 2, 1));
  EXPECT_EQ(min_K(11, 0, 48, 2), 2);
  EXPECT_EQ(min_K(0.5, 0, 2.0, 1), 3);  // K > 2 + 1/12
}

PathRecord from_points(std::vector<Vertex> v) { return PathRecord(std::move(v)); }

PathRecord horizontal(Vertex from, int to_x) {
  std::vector<Vertex> v{from};
  while (v.back()[0] < to_x) v.push_back(v.back().shifted(0, 1));
  return PathRecord(std::move(v));
}

// K = 2, N = 8, host cube 0: B = [8,16] x [-8,16].
const BoxRegion kB = BoxRegion::b_plus({{0, 0}, 8}, 0);

StretchRecord only_crossing(const PathRecord& p) {
  const auto c = find_crossings(p, kB);
  EXPECT_EQ(c.size(), 1u);
  return c.at(0);
}

TEST(BuildShortcut, StraightCrossing) {
  const EdgeField f = EdgeField::constant(LatticeBox::cube(2, -10, 40), 1.0);
  const PathRecord path = horizontal({0, 4}, 20);
  const ShortcutProposal p = build_shortcut(f, path, only_crossing(path), 2);
  EXPECT_EQ(p.z, Vertex({10, 4}));
  EXPECT_EQ(p.z_prime, Vertex({10, 3}));
  EXPECT_EQ(p.w, Vertex({12, 4}));
  EXPECT_EQ(p.detour, from_points({{10, 4}, {10, 3}, {11, 3}, {12, 3}, {12, 4}}));
  EXPECT_EQ(p.case_tag, ShortcutCase::kA);
  EXPECT_FALSE(p.mirrored);
  EXPECT_EQ(p.perimeter_edges.size(), 6u);
  EXPECT_TRUE(testing::proposal_violations(path, p).empty());

  const PathRecord spliced = apply_shortcut(path, p);
  EXPECT_EQ(spliced.front(), path.front());
  EXPECT_EQ(spliced.back(), path.back());
  EXPECT_DOUBLE_EQ(path_time(f, spliced),
                   path_time(f, path) - path_time(f, p.substituted) + path_time(f, p.detour));
}

TEST(BuildShortcut, ImmediateHitBelowZ) {
  const EdgeField f = EdgeField::constant(LatticeBox::cube(2, -10, 40), 1.0);
  std::vector<Vertex> v{{10, 3}, {9, 3}, {8, 3}, {7, 3}, {7, 4}};
  for (int x = 8; x <= 20; ++x) v.push_back({x, 4});
  const PathRecord path(std::move(v));
  const ShortcutProposal p = build_shortcut(f, path, only_crossing(path), 2);
  EXPECT_EQ(p.w, p.z_prime);
  EXPECT_EQ(p.detour.edge_count(), 1u);
  EXPECT_EQ(p.case_tag, ShortcutCase::kB);
  EXPECT_TRUE(p.perimeter_edges.empty());
  EXPECT_TRUE(testing::proposal_violations(path, p).empty());
  const PathRecord spliced = apply_shortcut(path, p);
  EXPECT_EQ(spliced.vertex_count(), 1u + (20 - 10 + 1));
  EXPECT_EQ(spliced.front(), Vertex({10, 3}));
}

TEST(BuildShortcut, RightHalfIsMirrored) {
  const EdgeField f = EdgeField::constant(LatticeBox::cube(2, -10, 40), 1.0);
  std::vector<Vertex> v;
  for (int x = 0; x <= 13; ++x) v.push_back({x, 4});
  v.insert(v.end(), {{13, 3}, {14, 3}, {14, 4}});
  for (int x = 15; x <= 20; ++x) v.push_back({x, 4});
  const PathRecord path(std::move(v));
  const ShortcutProposal p = build_shortcut(f, path, only_crossing(path), 2);
  EXPECT_TRUE(p.mirrored);
  EXPECT_EQ(p.z, Vertex({13, 3}));
  EXPECT_EQ(p.detour, from_points({{13, 3}, {13, 2}, {12, 2}, {11, 2}, {11, 3}, {11, 4}}));
  EXPECT_EQ(p.case_tag, ShortcutCase::kA);
  EXPECT_TRUE(testing::proposal_violations(path, p).empty());
  EXPECT_NO_THROW(apply_shortcut(path, p));
}

TEST(BuildShortcut, LeftwardStretchUsesItsOwnFrame) {
  const EdgeField f = EdgeField::constant(LatticeBox::cube(2, -10, 40), 1.0);
  const PathRecord path = horizontal({0, 4}, 20).reversed();
  const ShortcutProposal p = build_shortcut(f, path, only_crossing(path), 2);
  EXPECT_EQ(p.z, Vertex({14, 4}));
  EXPECT_EQ(p.w, Vertex({12, 4}));
  EXPECT_TRUE(testing::proposal_violations(path, p).empty());
}

TEST(BuildShortcut, ThreeDimensionsStayInPlane) {
  const EdgeField f = EdgeField::constant(LatticeBox::cube(3, -10, 40), 1.0);
  std::vector<Vertex> v{{0, 4, 4}};
  while (v.back()[0] < 20) v.push_back(v.back().shifted(0, 1));
  const PathRecord path(std::move(v));
  const BoxRegion b = BoxRegion::b_plus({{0, 0, 0}, 8}, 0);
  const auto c = find_crossings(path, b);
  ASSERT_EQ(c.size(), 1u);
  const ShortcutProposal p = build_shortcut(f, path, c[0], 2);
  for (const Vertex& x : p.detour.vertices()) EXPECT_EQ(x[2], 4);
  EXPECT_EQ(p.perimeter_edges.size(), 3u * 4u);
  EXPECT_TRUE(testing::proposal_violations(path, p).empty());

  // The stretch leaves the plane of z before the detour's column.
  std::vector<Vertex> bent{{0, 4, 4}};
  while (bent.back()[0] < 11) bent.push_back(bent.back().shifted(0, 1));
  bent.push_back(bent.back().shifted(2, 1));
  while (bent.back()[0] < 20) bent.push_back(bent.back().shifted(0, 1));
  const PathRecord bent_path(std::move(bent));
  const auto bc = find_crossings(bent_path, b);
  ASSERT_EQ(bc.size(), 1u);
  try {
    build_shortcut(f, bent_path, bc[0], 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConstructionBlocked);
  }
}

TEST(BuildShortcut, BlockedByFieldBox) {
  const EdgeField f = EdgeField::constant(LatticeBox(Vertex{0, 3}, Vertex{24, 10}), 1.0);
  const PathRecord path = horizontal({0, 4}, 20);
  try {
    build_shortcut(f, path, only_crossing(path), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConstructionBlocked);
  }
}

TEST(BuildShortcut, RejectsWrongScale) {
  const EdgeField f = EdgeField::constant(LatticeBox::cube(2, -10, 40), 1.0);
  const PathRecord path = horizontal({0, 4}, 20);
  EXPECT_THROW(build_shortcut(f, path, only_crossing(path), 3), Error);
}

EdgeField with_event_F(const EdgeField& base, const ShortcutProposal& p, double M, double r) {
  std::vector<std::pair<EdgeId, double>> set;
  for (std::size_t i = 0; i < p.detour_edges.size(); ++i) set.emplace_back(p.detour_edges[i], i == 0 ? M + 0.5 : r);
  for (const EdgeId& e : p.perimeter_edges) set.emplace_back(e, M + 1.0);
  return base.with_weights(set);
}

TEST(EventF, Predicates) {
  const double M = 1.0, r = 0.0, delta = 1.0;
  const EdgeField base = EdgeField::constant(LatticeBox::cube(2, -10, 40), 1.0);
  const PathRecord path = horizontal({0, 4}, 20);
  const ShortcutProposal p = build_shortcut(base, path, only_crossing(path), 2);

  std::vector<std::pair<EdgeId, double>> zeros;
  for (const EdgeId& e : p.detour_edges) zeros.emplace_back(e, 0.0);
  EXPECT_FALSE(event_F_holds(base.with_weights(zeros), p, M, r, delta, 2));

  const EdgeField good = with_event_F(base, p, M, r);
  EXPECT_TRUE(event_F_holds(good, p, M, r, delta, 2));
  const std::pair<EdgeId, double> perimeter_at_M[] = {{p.perimeter_edges.front(), M}};
  EXPECT_FALSE(event_F_holds(good.with_weights(perimeter_at_M), p, M, r, delta, 2));
  const std::pair<EdgeId, double> first_at_M[] = {{p.detour_edges.front(), M}};
  EXPECT_FALSE(event_F_holds(good.with_weights(first_at_M), p, M, r, delta, 2));
  const std::pair<EdgeId, double> light_at_cap[] = {{p.detour_edges.back(), r + delta / 24}};
  EXPECT_FALSE(event_F_holds(good.with_weights(light_at_cap), p, M, r, delta, 2));
}

TEST(Success, StrictInequality) {
  const PathRecord path = horizontal({0, 4}, 20);
  const EdgeField base = EdgeField::constant(LatticeBox::cube(2, -10, 40), 5.0);
  const ShortcutProposal p = build_shortcut(base, path, only_crossing(path), 2);
  // Substituted part: 2 edges of 5 = 10.
  std::vector<std::pair<EdgeId, double>> zeros;
  for (const EdgeId& e : p.detour_edges) zeros.emplace_back(e, 0.0);
  EXPECT_TRUE(shortcut_is_successful(base.with_weights(zeros), p, 1.0));
  std::vector<std::pair<EdgeId, double>> equal;
  for (const EdgeId& e : p.detour_edges) equal.emplace_back(e, 2.25);  // M + 4 * 2.25 = 10
  EXPECT_FALSE(shortcut_is_successful(base.with_weights(equal), p, 1.0));
}

// Restricted geodesics on light-heavy fields: every harvested proposal is
// valid, and imposing event F with K >= min_K makes it successful.
TEST(Shortcut, HarvestedStretchesSatisfyInvariantsAndSucceedUnderEventF) {
  const double M = 10.0, r = 0.0, delta = 9.0;
  const int K = static_cast<int>(min_K(M, r, delta, 2));
  ASSERT_EQ(K, 5);
  const auto spec = DistributionSpec::mixture({{0.0, 1e-4}}, 1.0 - 1e-4, DistributionSpec::uniform(9.0, 10.5));
  const LatticeBox box(Vertex{-60, -70}, Vertex{130, 70});
  std::size_t built = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const EdgeField f = EdgeField::sample(box, spec, seed);
    const auto route = restricted_time(f, M, {0, 0}, {70, 0});
    ASSERT_TRUE(route.geodesic.has_value());
    const PathRecord& path = route.geodesic->path;
    for (const StretchRecord& s :
         shortcutable_stretches(f, path, 4 * K, {M, r, delta}, OutOfBoxPolicy::kSkip)) {
      const ShortcutProposal p = build_shortcut(f, path, s, K);
      EXPECT_TRUE(testing::proposal_violations(path, p).empty());
      const EdgeField g = with_event_F(f, p, M, r);
      ASSERT_TRUE(event_F_holds(g, p, M, r, delta, 2));
      EXPECT_TRUE(shortcut_is_successful(g, p, M));
      const PathRecord spliced = apply_shortcut(path, p);
      EXPECT_LT(path_time(g, spliced) + M, path_time(g, path));
      ++built;
    }
  }
  EXPECT_GT(built, 5u) << built;
}

}  // namespace
}  // namespace fpp

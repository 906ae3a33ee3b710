#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fpp/distribution.hpp"
#include "fpp/edge_field.hpp"
#include "fpp/errors.hpp"
#include "fpp/lattice.hpp"
#include "fpp/usefulness.hpp"

namespace fpp {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an fpp::Error";
  return ErrorCode::kRuntimeFailure;
}

TEST(EdgeId, CanonicalOrdering) {
  const LatticeBox box = LatticeBox::cube(2, 0, 3);
  const EdgeId e = box.edge_id({0, 0}, {1, 0});
  EXPECT_EQ(e.base, Vertex({0, 0}));
  EXPECT_EQ(e.axis, 0);  // e_1
  EXPECT_EQ(box.edge_id({1, 0}, {0, 0}), e);
}

TEST(EdgeId, Errors) {
  const LatticeBox box = LatticeBox::cube(2, 0, 3);
  EXPECT_EQ(code_of([&] { box.edge_id({0, 0}, {2, 0}); }), ErrorCode::kNotAdjacent);
  EXPECT_EQ(code_of([&] { box.edge_id({0, 0}, {1, 1}); }), ErrorCode::kNotAdjacent);
  EXPECT_EQ(code_of([&] { box.edge_id({3, 0}, {4, 0}); }), ErrorCode::kOutOfBox);
}

TEST(EdgeId, SymmetricExhaustively) {
  for (int d : {1, 2, 3}) {
    const LatticeBox box = LatticeBox::cube(d, -1, 2);
    for (std::size_t i = 0; i < box.vertex_count(); ++i) {
      const Vertex u = box.vertex(i);
      for (const Vertex& v : box.neighbors(u)) {
        const EdgeId e = box.edge_id(u, v);
        EXPECT_EQ(e, box.edge_id(v, u));
        EXPECT_TRUE(e.base < e.tip());
        EXPECT_TRUE(box.contains(e));
      }
    }
  }
}

TEST(LatticeBox, CountsAndIndexOrder) {
  const LatticeBox box(Vertex{-1, 2, 0}, Vertex{1, 4, 3});
  EXPECT_EQ(box.vertex_count(), 3u * 3u * 4u);
  for (std::size_t i = 0; i < box.vertex_count(); ++i) {
    EXPECT_EQ(box.index(box.vertex(i)), i);
    if (i > 0) EXPECT_LT(box.vertex(i - 1), box.vertex(i));
  }
  std::size_t edges = 0;
  box.for_each_edge([&](const EdgeId&) { ++edges; });
  EXPECT_EQ(edges, box.edge_count());
  // Interior vertices have 2d neighbours.
  EXPECT_EQ(box.neighbors({0, 3, 1}).size(), 6u);
}

TEST(Distribution, CdfExamples) {
  const auto ex = DistributionSpec::exponential(1.0);
  EXPECT_EQ(ex.cdf(0.0), 0.0);
  EXPECT_EQ(ex.support_min(), 0.0);
  const auto mix = DistributionSpec::atoms({{0.0, 0.7}, {5.0, 0.3}});
  EXPECT_DOUBLE_EQ(mix.cdf(0.0), 0.7);
  EXPECT_DOUBLE_EQ(mix.cdf_below(5.0), 0.7);
  EXPECT_DOUBLE_EQ(mix.cdf(5.0), 1.0);
  const auto sh = DistributionSpec::shifted(2.0, DistributionSpec::uniform(0.0, 1.0));
  EXPECT_EQ(sh.support_min(), 2.0);
  EXPECT_DOUBLE_EQ(sh.cdf(2.5), 0.5);
  EXPECT_EQ(DistributionSpec::pareto(2.0, 3.0).support_min(), 3.0);
  EXPECT_FALSE(DistributionSpec::pareto(2.0, 3.0).has_bounded_support());
  EXPECT_TRUE(DistributionSpec::uniform(0, 1).has_bounded_support());
}

TEST(Distribution, InvalidSpecsRejected) {
  EXPECT_EQ(code_of([] { DistributionSpec::exponential(0.0); }), ErrorCode::kInvalidSpec);
  EXPECT_EQ(code_of([] { DistributionSpec::uniform(1.0, 1.0); }), ErrorCode::kInvalidSpec);
  EXPECT_EQ(code_of([] { DistributionSpec::atoms({{1.0, 0.5}}); }), ErrorCode::kInvalidSpec);
  EXPECT_EQ(code_of([] { DistributionSpec::shifted(-1.0, DistributionSpec::uniform(0, 1)); }),
            ErrorCode::kInvalidSpec);
}

std::vector<DistributionSpec> zoo() {
  return {
      DistributionSpec::exponential(1.5),
      DistributionSpec::uniform(0.5, 2.0),
      DistributionSpec::pareto(2.5, 1.0),
      DistributionSpec::shifted(2.0, DistributionSpec::uniform(0.0, 1.0)),
      DistributionSpec::point_mass(1.0),
      DistributionSpec::atoms({{0.0, 0.7}, {5.0, 0.3}}),
      DistributionSpec::mixture({{0.0, 0.1}, {3.0, 0.2}}, 0.7, DistributionSpec::exponential(2.0)),
      DistributionSpec::shifted(0.25, DistributionSpec::mixture({{1.0, 0.5}}, 0.5,
                                                                 DistributionSpec::pareto(3, 2))),
  };
}

TEST(Distribution, CdfIsMonotoneAndVanishesBelowSupport) {
  for (const auto& spec : zoo()) {
    double prev = 0.0;
    for (int k = -20; k <= 400; ++k) {
      const double x = k * 0.025;
      const double f = spec.cdf(x);
      EXPECT_GE(f, prev) << spec.describe() << " at " << x;
      EXPECT_GE(f, spec.cdf_below(x));
      EXPECT_LE(f, 1.0);
      prev = f;
    }
    const double r = spec.support_min();
    if (r > 0) EXPECT_EQ(spec.cdf(r - 1e-9), 0.0) << spec.describe();
  }
}

TEST(Distribution, ConfigRoundTrip) {
  for (const auto& spec : zoo()) {
    const KeyValueConfig cfg = spec.to_config();
    const auto back = DistributionSpec::from_config(KeyValueConfig::parse(cfg.to_text()));
    EXPECT_EQ(back.to_config().to_text(), cfg.to_text());
    for (double x : {0.0, 0.3, 1.0, 2.2, 5.0, 9.0}) EXPECT_EQ(back.cdf(x), spec.cdf(x));
  }
}

TEST(Distribution, SamplesMatchCdf) {
  // Kolmogorov-type check on a fine grid for each family.
  for (const auto& spec : zoo()) {
    const LatticeBox box = LatticeBox::cube(2, 0, 99);
    const EdgeField f = EdgeField::sample(box, spec, 7);
    std::vector<double> w;
    box.for_each_edge([&](const EdgeId& e) { w.push_back(f.weight(e)); });
    std::sort(w.begin(), w.end());
    const double n = static_cast<double>(w.size());
    for (double x : {0.1, 0.5, 1.0, 1.7, 2.5, 4.0}) {
      const double emp = static_cast<double>(std::upper_bound(w.begin(), w.end(), x) - w.begin()) / n;
      EXPECT_NEAR(emp, spec.cdf(x), 4.0 / std::sqrt(n)) << spec.describe() << " at " << x;
    }
    EXPECT_GE(w.front(), spec.support_min());
  }
}

TEST(EdgeField, PointMassGivesConstantWeights) {
  const LatticeBox box = LatticeBox::cube(2, 0, 1);
  const EdgeField f = EdgeField::sample(box, DistributionSpec::point_mass(1.0), 12345);
  box.for_each_edge([&](const EdgeId& e) { EXPECT_EQ(f.weight(e), 1.0); });
}

TEST(EdgeField, DeterministicAcrossRunsAndThreads) {
  const LatticeBox box = LatticeBox::cube(2, -40, 80);
  const auto spec = DistributionSpec::exponential(1.0);
  const EdgeField a = EdgeField::sample(box, spec, 99, 1);
  const EdgeField b = EdgeField::sample(box, spec, 99, 1);
  const EdgeField c = EdgeField::sample(box, spec, 99, 4);
  std::ostringstream sa, sb, sc;
  a.write_binary(sa);
  b.write_binary(sb);
  c.write_binary(sc);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str(), sc.str());
  const EdgeField other = EdgeField::sample(box, spec, 100, 1);
  EXPECT_NE(a.weight(EdgeId{Vertex{0, 0}, 0}), other.weight(EdgeId{Vertex{0, 0}, 0}));
}

TEST(EdgeField, WeightIndependentOfEnclosingBox) {
  const auto spec = DistributionSpec::uniform(0, 1);
  const EdgeField small = EdgeField::sample(LatticeBox::cube(2, 0, 5), spec, 3);
  const EdgeField large = EdgeField::sample(LatticeBox::cube(2, -10, 30), spec, 3);
  small.box().for_each_edge([&](const EdgeId& e) { EXPECT_EQ(small.weight(e), large.weight(e)); });
}

TEST(EdgeField, UniformMeanWithinThreeStandardErrors) {
  const LatticeBox box = LatticeBox::cube(2, 0, 49);  // 50 x 50 vertices
  const EdgeField f = EdgeField::sample(box, DistributionSpec::uniform(0, 1), 2024);
  double sum = 0;
  std::size_t n = 0;
  box.for_each_edge([&](const EdgeId& e) {
    sum += f.weight(e);
    ++n;
  });
  ASSERT_EQ(n, 2u * 50u * 49u);
  const double se = std::sqrt(1.0 / 12.0 / static_cast<double>(n));
  EXPECT_LT(std::abs(sum / static_cast<double>(n) - 0.5), 3 * se);
}

TEST(EdgeField, CsvDumpHasOneRowPerEdge) {
  const LatticeBox box = LatticeBox::cube(2, 0, 2);
  const EdgeField f = EdgeField::constant(box, 0.5);
  std::ostringstream out;
  f.write_csv(out);
  const std::string s = out.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), static_cast<long>(box.edge_count() + 1));
  EXPECT_EQ(s.substr(0, s.find('\n')), "x1,x2,axis,weight");
  EXPECT_EQ(code_of([&] { f.weight(EdgeId{Vertex{2, 0}, 0}); }), ErrorCode::kEdgeOutOfBox);
}

TEST(Usefulness, Examples) {
  const auto ex = check_useful(DistributionSpec::exponential(1.0), 2);
  EXPECT_TRUE(ex.useful);
  EXPECT_EQ(ex.clause, UsefulClause::kZeroMinimum);
  EXPECT_EQ(ex.mass_at_min, 0.0);
  EXPECT_EQ(ex.threshold, 0.5);

  const auto pm = check_useful(DistributionSpec::point_mass(1.0), 2);
  EXPECT_FALSE(pm.useful);
  EXPECT_EQ(pm.clause, UsefulClause::kPositiveMinimum);
  EXPECT_EQ(pm.support_min, 1.0);
  EXPECT_EQ(pm.mass_at_min, 1.0);

  const auto at = check_useful(DistributionSpec::atoms({{0.0, 0.7}, {5.0, 0.3}}), 2);
  EXPECT_FALSE(at.useful);
  EXPECT_DOUBLE_EQ(at.mass_at_min, 0.7);

  // Atomless with r > 0: F(r) = 0, always useful.
  EXPECT_TRUE(check_useful(DistributionSpec::uniform(1, 2), 3).useful);
  EXPECT_EQ(code_of([] { check_useful(DistributionSpec::exponential(1), 7); }),
            ErrorCode::kUnknownDimension);
}

TEST(Usefulness, TableOverridesAndValidation) {
  PcTable t = PcTable::defaults();
  EXPECT_GE(t.at(2).oriented_bond, t.at(2).bond);
  EXPECT_GE(t.at(3).oriented_bond, t.at(3).bond);
  t.set(7, {0.1, 0.2, "test"});
  EXPECT_TRUE(check_useful(DistributionSpec::exponential(1), 7, t).useful);
  EXPECT_EQ(code_of([&] { t.set(4, {0.3, 0.2, "bad"}); }), ErrorCode::kInvalidSpec);
}

TEST(Usefulness, MoreMassAtZeroNeverHelps) {
  bool was_useful = true;
  for (int k = 0; k <= 20; ++k) {
    const double p0 = k / 20.0;
    const auto spec = p0 < 1.0 ? DistributionSpec::mixture({{0.0, p0}}, 1.0 - p0,
                                                           DistributionSpec::uniform(0.5, 1.5))
                               : DistributionSpec::point_mass(0.0);
    const bool useful = check_useful(spec, 2).useful;
    if (!was_useful) EXPECT_FALSE(useful) << "p0=" << p0;
    was_useful = useful;
  }
}

}  // namespace
}  // namespace fpp

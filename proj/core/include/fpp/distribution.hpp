#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "fpp/config.hpp"

namespace fpp {

class DistributionSpec;

struct Exponential {
  double rate = 1.0;
};

struct Uniform {
  double a = 0.0;
  double b = 1.0;
};

/// Pareto type I: P(X > x) = (scale / x)^shape for x >= scale.
struct Pareto {
  double shape = 1.0;
  double scale = 1.0;
};

struct Shifted {
  double offset = 0.0;
  std::shared_ptr<const DistributionSpec> inner;
};

struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

/// Finite atoms plus an optional continuous (or any) part of mass
/// `continuous_weight`.
struct AtomMixture {
  std::vector<Atom> atoms;
  double continuous_weight = 0.0;
  std::shared_ptr<const DistributionSpec> continuous;
};

/// Parametric law F of a single passage time. Immutable; validated on
/// construction (support inside [0, inf), masses summing to 1).
class DistributionSpec {
 public:
  using Family = std::variant<Exponential, Uniform, Pareto, Shifted, AtomMixture>;

  static DistributionSpec exponential(double rate);
  static DistributionSpec uniform(double a, double b);
  static DistributionSpec pareto(double shape, double scale);
  static DistributionSpec shifted(double offset, DistributionSpec inner);
  static DistributionSpec point_mass(double value);
  static DistributionSpec atoms(std::vector<Atom> atoms);
  static DistributionSpec mixture(std::vector<Atom> atoms, double continuous_weight,
                                  DistributionSpec continuous);

  const Family& family() const noexcept { return family_; }
  std::string family_name() const;

  /// F(x) = P(tau <= x).
  double cdf(double x) const;
  /// P(tau < x), the left limit of F at x.
  double cdf_below(double x) const;
  /// r = inf{x : F(x) > 0}.
  double support_min() const;
  /// sup of the support; +inf for unbounded families.
  double support_max() const;
  bool has_bounded_support() const;

  /// Inverse-CDF transform; `pick` selects a mixture component, `u` feeds the
  /// continuous quantile. Both in [0, 1).
  double sample(double pick, double u) const;

  /// Serializes into `key = value` entries (see README for the schema).
  KeyValueConfig to_config() const;
  static DistributionSpec from_config(const KeyValueConfig& cfg);
  std::string describe() const;

 private:
  explicit DistributionSpec(Family f);
  void validate() const;

  Family family_;
};

}  // namespace fpp

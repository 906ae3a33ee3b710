#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fpp/distribution.hpp"
#include "fpp/lattice.hpp"

namespace fpp {

struct FieldProvenance {
  std::uint64_t seed = 0;
  DistributionSpec spec;
};

/// Immutable passage times tau(e) for every edge of a box.
class EdgeField {
 public:
  /// Each weight is the inverse-CDF transform of a counter stream keyed by
  /// hash(seed, edge); the result does not depend on `threads`.
  static EdgeField sample(const LatticeBox& box, const DistributionSpec& spec, std::uint64_t seed,
                          int threads = 1);
  static EdgeField constant(const LatticeBox& box, double weight);
  static EdgeField from_function(const LatticeBox& box,
                                 const std::function<double(const EdgeId&)>& weight);

  /// Copy with some weights replaced; provenance is dropped.
  EdgeField with_weights(std::span<const std::pair<EdgeId, double>> overrides) const;

  const LatticeBox& box() const noexcept { return box_; }
  const std::optional<FieldProvenance>& provenance() const noexcept { return provenance_; }
  /// Distinct per constructed field; copies share it. Used as a memo key.
  std::uint64_t uid() const noexcept { return uid_; }

  /// Throws EdgeOutOfBox.
  double weight(const EdgeId& e) const;
  double weight(const Vertex& u, const Vertex& v) const;
  double weight_at_slot(std::size_t slot) const noexcept { return weights_[slot]; }
  double max_weight() const noexcept;

  /// Raw slot array (NaN in slots that name no in-box edge).
  std::span<const double> slots() const noexcept { return weights_; }

  /// CSV rows `x1,...,xd,axis,weight`; axis is 1-based.
  void write_csv(std::ostream& out) const;
  /// Little-endian: u32 d, d x i32 lo, d x i32 hi, u64 edge count, then per
  /// edge d x i32 base, u32 axis (1-based), f64 weight.
  void write_binary(std::ostream& out) const;

  /// Weight for edge `e` under (spec, seed), independent of any box.
  static double sample_edge(const DistributionSpec& spec, std::uint64_t seed, const EdgeId& e);

 private:
  EdgeField(LatticeBox box, std::vector<double> weights, std::optional<FieldProvenance> prov);

  LatticeBox box_;
  std::vector<double> weights_;
  std::optional<FieldProvenance> provenance_;
  std::uint64_t uid_ = 0;
};

}  // namespace fpp

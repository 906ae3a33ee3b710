#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpp/edge_field.hpp"
#include "fpp/lattice.hpp"
#include "fpp/path.hpp"

namespace fpp {

/// Passage time in [0, +inf]. +inf is a state, not a float value, so it can
/// only reach arithmetic through the explicit operators below.
class ExtendedTime {
 public:
  constexpr ExtendedTime() = default;  // +inf
  constexpr explicit ExtendedTime(double finite) : value_(finite), finite_(true) {}
  static constexpr ExtendedTime infinite() { return ExtendedTime(); }

  constexpr bool is_finite() const noexcept { return finite_; }
  /// Throws RuntimeFailure when infinite.
  double value() const;

  friend constexpr ExtendedTime operator+(ExtendedTime t, double dt) {
    return t.finite_ ? ExtendedTime(t.value_ + dt) : t;
  }
  friend constexpr ExtendedTime operator+(double dt, ExtendedTime t) { return t + dt; }

  friend constexpr bool operator==(const ExtendedTime& a, const ExtendedTime& b) {
    return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
  }
  friend constexpr std::weak_ordering operator<=>(const ExtendedTime& a, const ExtendedTime& b) {
    if (!a.finite_ && !b.finite_) return std::weak_ordering::equivalent;
    if (!a.finite_) return std::weak_ordering::greater;
    if (!b.finite_) return std::weak_ordering::less;
    return a.value_ < b.value_ ? std::weak_ordering::less
           : b.value_ < a.value_ ? std::weak_ordering::greater
                                 : std::weak_ordering::equivalent;
  }
  friend constexpr bool operator<(double a, const ExtendedTime& b) { return ExtendedTime(a) < b; }
  friend constexpr bool operator<(const ExtendedTime& a, double b) { return a < ExtendedTime(b); }

  std::string to_string() const;

 private:
  double value_ = 0.0;
  bool finite_ = false;
};

/// Optional restrictions of the admissible subgraph.
struct SearchLimits {
  /// Only edges with tau(e) <= max_weight are usable.
  std::optional<double> max_weight;
  /// Only vertices inside this box (must lie in the field's box).
  std::optional<LatticeBox> region;
  /// Stop once the smallest unsettled time reaches this value. Settled entries
  /// below it are exact; every finite entry is the time of a real path.
  std::optional<double> time_cutoff;
};

/// One-to-all shortest-time tree. Ties in relaxation keep the
/// lexicographically smallest predecessor, so trees are deterministic.
class ShortestTimeTree {
 public:
  const LatticeBox& domain() const noexcept { return domain_; }
  const Vertex& source() const noexcept { return source_; }

  bool reached(const Vertex& v) const;
  ExtendedTime time_to(const Vertex& v) const;
  /// Throws OutOfBox if v is outside the domain, RuntimeFailure if unreached.
  PathRecord path_to(const Vertex& v) const;
  std::optional<Vertex> predecessor(const Vertex& v) const;
  /// Whether a tie was broken at any vertex of the tree path to v.
  bool tie_on_path(const Vertex& v) const;

  /// Raw per-domain-index times (+inf where unreached); for bulk scans.
  const std::vector<double>& raw_times() const noexcept { return dist_; }

 private:
  friend ShortestTimeTree shortest_time_tree(const EdgeField&, const Vertex&, const SearchLimits&,
                                             const std::optional<Vertex>&);
  LatticeBox domain_;
  Vertex source_;
  std::vector<double> dist_;
  std::vector<std::int64_t> pred_;
  std::vector<std::uint8_t> tie_;
};

/// Dijkstra from `source`. With `stop_at`, the search halts once that vertex
/// is settled; all settled entries are final.
ShortestTimeTree shortest_time_tree(const EdgeField& field, const Vertex& source,
                                    const SearchLimits& limits = {},
                                    const std::optional<Vertex>& stop_at = std::nullopt);

/// t(u, v) inside the field's box.
double shortest_time(const EdgeField& field, const Vertex& u, const Vertex& v);

struct GeodesicResult {
  PathRecord path;
  double time = 0.0;
  bool unique = true;  // false when a tie was broken along the path
};

GeodesicResult extract_geodesic(const EdgeField& field, const Vertex& u, const Vertex& v);

struct RestrictedResult {
  ExtendedTime time;
  std::optional<GeodesicResult> geodesic;  // absent when time is +inf
};

/// Shortest time over edges with tau(e) <= max_weight; +inf when disconnected.
RestrictedResult restricted_time(const EdgeField& field, double max_weight, const Vertex& u,
                                 const Vertex& v);

/// Geodesic from origin to origin + length * sign * e_axis. Every prefix of
/// the result is a geodesic (tree path).
PathRecord finite_horizon_ray(const EdgeField& field, const Vertex& origin, int axis, int sign,
                              int length);

/// Exhaustive minimum over self-avoiding paths with at most `max_len` edges.
/// Throws BudgetExceeded after `node_budget` DFS expansions.
ExtendedTime brute_force_time(const EdgeField& field, const Vertex& u, const Vertex& v,
                              int max_len, std::uint64_t node_budget = 50'000'000);

}  // namespace fpp

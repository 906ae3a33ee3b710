#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fpp/distribution.hpp"
#include "fpp/edge_field.hpp"
#include "fpp/lattice.hpp"

namespace fpp {

/// Self-avoiding nearest-neighbour path, stored as its vertex sequence.
class PathRecord {
 public:
  PathRecord() = default;
  /// Validates adjacency (NotAdjacent) and self-avoidance (NotSelfAvoiding).
  explicit PathRecord(std::vector<Vertex> vertices);

  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept {
    return vertices_.empty() ? 0 : vertices_.size() - 1;
  }
  bool empty() const noexcept { return vertices_.empty(); }
  const Vertex& front() const { return vertices_.front(); }
  const Vertex& back() const { return vertices_.back(); }
  const Vertex& operator[](std::size_t i) const { return vertices_[i]; }

  EdgeId edge(std::size_t i) const { return edge_between(vertices_[i], vertices_[i + 1]); }
  std::vector<EdgeId> edges() const;

  /// Sub-path over vertex positions [first, last].
  PathRecord slice(std::size_t first, std::size_t last) const;
  PathRecord reversed() const;
  std::optional<std::size_t> position_of(const Vertex& v) const;

  /// One `x1,...,xd` row per vertex, with header.
  void write_csv(std::ostream& out) const;

  friend bool operator==(const PathRecord&, const PathRecord&) = default;

 private:
  std::vector<Vertex> vertices_;
};

/// Sum of tau over the path's edges; EdgeOutOfBox if an edge leaves the field.
double path_time(const EdgeField& field, const PathRecord& path);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = true;

  bool contains(double x) const noexcept {
    return (lo_closed ? x >= lo : x > lo) && (hi_closed ? x <= hi : x < hi);
  }
};

/// Finite union of disjoint intervals; a Borel predicate on passage times.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> parts);

  /// (M, inf): the heavy-edge predicate tau(e) > M.
  static IntervalSet above(double m);
  static IntervalSet at_most(double m);
  static IntervalSet everything();
  /// Text form: intervals separated by ';', e.g. "[0,0.5);(2,inf)".
  static IntervalSet parse(const std::string& text);

  bool contains(double x) const noexcept;
  /// Mass that `spec` gives to the set.
  double probability(const DistributionSpec& spec) const;
  const std::vector<Interval>& parts() const noexcept { return parts_; }
  std::string to_string() const;

 private:
  std::vector<Interval> parts_;
};

/// Number of path edges whose weight lies in `predicate`.
std::size_t heavy_edge_count(const EdgeField& field, const PathRecord& path,
                             const IntervalSet& predicate);

}  // namespace fpp

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fpp/edge_field.hpp"
#include "fpp/lattice.hpp"
#include "fpp/path.hpp"

namespace fpp {

/// Index l of the N-cube S_l(N) = prod [N l^i, N l^i + N).
struct CubeIndex {
  Vertex l;
  int N = 1;

  friend bool operator==(const CubeIndex&, const CubeIndex&) = default;
  friend auto operator<=>(const CubeIndex&, const CubeIndex&) = default;
  std::string to_string() const;
};

CubeIndex cube_of(const Vertex& x, int N);

enum class RegionKind { kS, kT, kBPlus, kBMinus };

struct BoxRegion {
  RegionKind kind = RegionKind::kS;
  CubeIndex cube;
  int axis = 0;  // short axis of B-kinds, 0-based

  static BoxRegion s(const CubeIndex& c) { return {RegionKind::kS, c, 0}; }
  static BoxRegion t(const CubeIndex& c) { return {RegionKind::kT, c, 0}; }
  static BoxRegion b_plus(const CubeIndex& c, int axis) { return {RegionKind::kBPlus, c, axis}; }
  static BoxRegion b_minus(const CubeIndex& c, int axis) { return {RegionKind::kBMinus, c, axis}; }

  bool is_b_kind() const noexcept { return kind == RegionKind::kBPlus || kind == RegionKind::kBMinus; }
  friend bool operator==(const BoxRegion&, const BoxRegion&) = default;
  std::string to_string() const;
};

/// Closed vertex bounds of the region.
LatticeBox region_vertices(const BoxRegion& region);

/// T-boxes at the same scale are disjoint iff some index differs by >= 4.
bool are_separated(const Vertex& l, const Vertex& other);

struct BlackCubeParams {
  double M = 1.0;
  double r = 0.0;
  double delta = 0.1;
};

/// Direct evaluation without memoization. Throws RegionOutOfBox if T_l(N)
/// leaves the field's box, InvalidDelta if delta <= 0.
bool is_black(const EdgeField& field, const CubeIndex& cube, const BlackCubeParams& params);

/// Memoized is_black for one field at one scale. Safe for concurrent use; the
/// field must outlive the oracle.
class BlackCubeOracle {
 public:
  BlackCubeOracle(const EdgeField& field, int N, BlackCubeParams params);

  bool is_black(const Vertex& l) const;
  /// Whether T_l(N) fits in the field's box.
  bool evaluable(const Vertex& l) const;

  const EdgeField& field() const noexcept { return field_; }
  int scale() const noexcept { return N_; }
  const BlackCubeParams& params() const noexcept { return params_; }
  std::size_t evaluations() const;

 private:
  const EdgeField& field_;
  int N_;
  BlackCubeParams params_;
  mutable std::mutex mu_;
  mutable std::map<Vertex, bool> memo_;
};

/// pi_[u,v] with u = path[start], v = path[end].
struct StretchRecord {
  std::size_t start = 0;
  std::size_t end = 0;
  Vertex u;
  Vertex v;
  BoxRegion region;
  CubeIndex host;
  PathRecord stretch;
};

/// Crossings of a B-kind region along its short axis, in either direction.
std::vector<StretchRecord> find_crossings(const PathRecord& path, const BoxRegion& region);

enum class OutOfBoxPolicy { kThrow, kSkip };

/// Crossings of B-boxes whose host cube is black, ordered by path position.
std::vector<StretchRecord> shortcutable_stretches(const PathRecord& path, const BlackCubeOracle& oracle,
                                                  OutOfBoxPolicy policy = OutOfBoxPolicy::kThrow);
std::vector<StretchRecord> shortcutable_stretches(const EdgeField& field, const PathRecord& path, int N,
                                                  const BlackCubeParams& params,
                                                  OutOfBoxPolicy policy = OutOfBoxPolicy::kThrow);

/// Minimum l1 distance between the vertex sets of two stretches.
int stretch_distance(const StretchRecord& a, const StretchRecord& b);

/// Greedy scan in path order: keep a stretch when it starts after the last
/// kept one ends and lies at l1 distance >= spacing from every kept stretch.
std::vector<StretchRecord> select_disjoint_stretches(const std::vector<StretchRecord>& stretches,
                                                     int spacing);

/// Size of a greedy (path-order) pairwise separated family among the black
/// cubes whose S-cube the path meets.
std::size_t count_black_cubes_visited(const PathRecord& path, const BlackCubeOracle& oracle,
                                      OutOfBoxPolicy policy = OutOfBoxPolicy::kThrow);
std::size_t count_black_cubes_visited(const EdgeField& field, const PathRecord& path, int N,
                                      const BlackCubeParams& params,
                                      OutOfBoxPolicy policy = OutOfBoxPolicy::kThrow);

}  // namespace fpp

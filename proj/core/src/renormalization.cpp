#include "fpp/renormalization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "fpp/errors.hpp"
#include "fpp/geodesic.hpp"

namespace fpp {
namespace {

int floor_div(int a, int b) {
  const int q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

void require_scale(int N) {
  if (N < 1) fail(ErrorCode::kInvalidSpec, fmt::format("cube scale N must be >= 1, got {}", N));
}

// -1 / +1 for a vertex on the low / high face of the short axis whose other
// coordinates are strictly inside; 0 otherwise.
int face_side(const LatticeBox& b, int axis, const Vertex& x) {
  for (int i = 0; i < b.dim(); ++i) {
    if (i == axis) continue;
    if (x[i] <= b.lo()[i] || x[i] >= b.hi()[i]) return 0;
  }
  if (x[axis] == b.lo()[axis]) return -1;
  if (x[axis] == b.hi()[axis]) return 1;
  return 0;
}

}  // namespace

std::string CubeIndex::to_string() const { return fmt::format("S_{}({})", l.to_string(), N); }

CubeIndex cube_of(const Vertex& x, int N) {
  require_scale(N);
  CubeIndex c{x, N};
  for (int i = 0; i < x.dim(); ++i) c.l[i] = floor_div(x[i], N);
  return c;
}

std::string BoxRegion::to_string() const {
  switch (kind) {
    case RegionKind::kS: return fmt::format("S{}", cube.l.to_string());
    case RegionKind::kT: return fmt::format("T{}", cube.l.to_string());
    case RegionKind::kBPlus: return fmt::format("B+{}{}", axis + 1, cube.l.to_string());
    case RegionKind::kBMinus: return fmt::format("B-{}{}", axis + 1, cube.l.to_string());
  }
  return "?";
}

LatticeBox region_vertices(const BoxRegion& region) {
  const int N = region.cube.N;
  require_scale(N);
  const Vertex& l = region.cube.l;
  Vertex lo = l;
  Vertex hi = l;
  for (int i = 0; i < l.dim(); ++i) {
    if (region.kind == RegionKind::kS) {
      lo[i] = N * l[i];
      hi[i] = N * l[i] + N - 1;
    } else {
      lo[i] = N * l[i] - N;
      hi[i] = N * l[i] + 2 * N;
    }
  }
  if (region.is_b_kind()) {
    const int j = region.axis;
    if (j < 0 || j >= l.dim()) fail(ErrorCode::kInvalidSpec, "B-box axis out of range");
    if (region.kind == RegionKind::kBPlus) {
      lo[j] = N * l[j] + N;
    } else {
      hi[j] = N * l[j];
    }
  }
  return LatticeBox(lo, hi);
}

bool are_separated(const Vertex& l, const Vertex& other) {
  for (int i = 0; i < l.dim(); ++i) {
    if (std::abs(l[i] - other[i]) >= 4) return true;
  }
  return false;
}

bool is_black(const EdgeField& field, const CubeIndex& cube, const BlackCubeParams& params) {
  if (!(params.delta > 0)) fail(ErrorCode::kInvalidDelta, "delta must be > 0");
  const LatticeBox T = region_vertices(BoxRegion::t(cube));
  if (!field.box().contains(T)) {
    fail(ErrorCode::kRegionOutOfBox,
         fmt::format("{} needs {} outside field {}", cube.to_string(), T.to_string(),
                     field.box().to_string()));
  }
  const double rate = params.r + params.delta;
  const int d = T.dim();

  // Trimming an end edge of weight >= rate never repairs a violation while the
  // endpoints stay >= N/4 apart. So a violating pair either has an endpoint on
  // a cheap edge (weight < rate), or sits at the minimal distance D0 with its
  // minimizing path through a cheap-edge endpoint within time rate * D0.
  std::vector<std::size_t> sources;
  for (std::size_t i = 0; i < T.vertex_count(); ++i) {
    const Vertex x = T.vertex(i);
    for (int a = 0; a < d; ++a) {
      if (x[a] >= T.hi()[a]) continue;
      const double w = field.weight(EdgeId{x, a});
      if (w <= params.M && w < rate) {
        sources.push_back(i);
        sources.push_back(i + T.stride(a));
      }
    }
  }
  if (sources.empty()) return true;
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());

  const int d0 = (cube.N + 3) / 4;
  const double ball_radius = rate * d0;
  SearchLimits limits;
  limits.region = T;
  limits.max_weight = params.M;
  std::vector<std::pair<Vertex, double>> ball;
  for (std::size_t i : sources) {
    const Vertex c = T.vertex(i);
    int reach = 0;
    for (int a = 0; a < d; ++a) reach += std::max(c[a] - T.lo()[a], T.hi()[a] - c[a]);
    limits.time_cutoff = rate * reach;
    const ShortestTimeTree tree = shortest_time_tree(field, c, limits);
    const std::vector<double>& times = tree.raw_times();
    ball.clear();
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (!(times[k] < std::numeric_limits<double>::infinity())) continue;
      const Vertex x = T.vertex(k);
      const int dist = l1_distance(c, x);
      if (4 * dist >= cube.N && times[k] < rate * dist) return false;
      if (times[k] < ball_radius) ball.emplace_back(x, times[k]);
    }
    for (std::size_t a = 0; a < ball.size(); ++a) {
      for (std::size_t b = a + 1; b < ball.size(); ++b) {
        const int dist = l1_distance(ball[a].first, ball[b].first);
        if (4 * dist >= cube.N && ball[a].second + ball[b].second < rate * dist) return false;
      }
    }
  }
  return true;
}

BlackCubeOracle::BlackCubeOracle(const EdgeField& field, int N, BlackCubeParams params)
    : field_(field), N_(N), params_(params) {
  require_scale(N);
  if (!(params.delta > 0)) fail(ErrorCode::kInvalidDelta, "delta must be > 0");
}

bool BlackCubeOracle::evaluable(const Vertex& l) const {
  return field_.box().contains(region_vertices(BoxRegion::t({l, N_})));
}

bool BlackCubeOracle::is_black(const Vertex& l) const {
  {
    std::lock_guard lock(mu_);
    if (const auto it = memo_.find(l); it != memo_.end()) return it->second;
  }
  const bool black = fpp::is_black(field_, {l, N_}, params_);
  std::lock_guard lock(mu_);
  memo_.emplace(l, black);
  return black;
}

std::size_t BlackCubeOracle::evaluations() const {
  std::lock_guard lock(mu_);
  return memo_.size();
}

std::vector<StretchRecord> find_crossings(const PathRecord& path, const BoxRegion& region) {
  if (!region.is_b_kind()) fail(ErrorCode::kInvalidSpec, "crossings are defined for B-boxes only");
  const LatticeBox b = region_vertices(region);
  const int axis = region.axis;
  std::vector<StretchRecord> out;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t anchor = kNone;  // last face vertex with only interior vertices since
  for (std::size_t i = 0; i < path.vertex_count(); ++i) {
    const Vertex& x = path[i];
    if (b.is_interior(x)) continue;
    const int side = face_side(b, axis, x);
    if (side == 0) {
      anchor = kNone;
      continue;
    }
    if (anchor != kNone && face_side(b, axis, path[anchor]) == -side) {
      StretchRecord s;
      s.start = anchor;
      s.end = i;
      s.u = path[anchor];
      s.v = x;
      s.region = region;
      s.host = region.cube;
      s.stretch = path.slice(anchor, i);
      out.push_back(std::move(s));
    }
    anchor = i;
  }
  return out;
}

std::vector<StretchRecord> shortcutable_stretches(const PathRecord& path, const BlackCubeOracle& oracle,
                                                  OutOfBoxPolicy policy) {
  const int N = oracle.scale();
  std::set<Vertex> candidates;
  for (const Vertex& x : path.vertices()) {
    const int d = x.dim();
    Vertex lo = x;
    Vertex hi = x;
    for (int i = 0; i < d; ++i) {
      lo[i] = floor_div(x[i] + N - 1, N) - 2;  // ceil((x - 2N) / N)
      hi[i] = floor_div(x[i] + N, N);
    }
    const LatticeBox range(lo, hi);
    for (std::size_t k = 0; k < range.vertex_count(); ++k) candidates.insert(range.vertex(k));
  }

  using Key = std::tuple<std::size_t, std::size_t, Vertex, Vertex>;
  std::map<Key, StretchRecord> found;
  for (const Vertex& l : candidates) {
    for (int j = 0; j < l.dim(); ++j) {
      for (const BoxRegion& region : {BoxRegion::b_plus({l, N}, j), BoxRegion::b_minus({l, N}, j)}) {
        const LatticeBox bounds = region_vertices(region);
        for (StretchRecord& s : find_crossings(path, region)) {
          Key key{s.start, s.end, bounds.lo(), bounds.hi()};
          if (found.count(key)) continue;
          if (!oracle.evaluable(l)) {
            if (policy == OutOfBoxPolicy::kSkip) continue;
            fail(ErrorCode::kRegionOutOfBox,
                 fmt::format("T-box of {} leaves the field box", CubeIndex{l, N}.to_string()));
          }
          if (oracle.is_black(l)) found.emplace(std::move(key), std::move(s));
        }
      }
    }
  }
  std::vector<StretchRecord> out;
  out.reserve(found.size());
  for (auto& [key, s] : found) out.push_back(std::move(s));
  return out;
}

std::vector<StretchRecord> shortcutable_stretches(const EdgeField& field, const PathRecord& path, int N,
                                                  const BlackCubeParams& params, OutOfBoxPolicy policy) {
  const BlackCubeOracle oracle(field, N, params);
  return shortcutable_stretches(path, oracle, policy);
}

int stretch_distance(const StretchRecord& a, const StretchRecord& b) {
  int best = std::numeric_limits<int>::max();
  for (const Vertex& x : a.stretch.vertices()) {
    for (const Vertex& y : b.stretch.vertices()) best = std::min(best, l1_distance(x, y));
  }
  return best;
}

std::vector<StretchRecord> select_disjoint_stretches(const std::vector<StretchRecord>& stretches,
                                                     int spacing) {
  std::vector<StretchRecord> kept;
  for (const StretchRecord& s : stretches) {
    if (!kept.empty() && s.start < kept.back().end) continue;
    const bool far = std::all_of(kept.begin(), kept.end(),
                                 [&](const StretchRecord& k) { return stretch_distance(s, k) >= spacing; });
    if (far) kept.push_back(s);
  }
  return kept;
}

std::size_t count_black_cubes_visited(const PathRecord& path, const BlackCubeOracle& oracle,
                                      OutOfBoxPolicy policy) {
  std::set<Vertex> seen;
  std::vector<Vertex> kept;
  for (const Vertex& x : path.vertices()) {
    const Vertex l = cube_of(x, oracle.scale()).l;
    if (!seen.insert(l).second) continue;
    if (!oracle.evaluable(l)) {
      if (policy == OutOfBoxPolicy::kSkip) continue;
      fail(ErrorCode::kRegionOutOfBox,
           fmt::format("T-box of {} leaves the field box", CubeIndex{l, oracle.scale()}.to_string()));
    }
    if (!oracle.is_black(l)) continue;
    if (std::all_of(kept.begin(), kept.end(), [&](const Vertex& k) { return are_separated(l, k); })) {
      kept.push_back(l);
    }
  }
  return kept.size();
}

std::size_t count_black_cubes_visited(const EdgeField& field, const PathRecord& path, int N,
                                      const BlackCubeParams& params, OutOfBoxPolicy policy) {
  const BlackCubeOracle oracle(field, N, params);
  return count_black_cubes_visited(path, oracle, policy);
}

}  // namespace fpp

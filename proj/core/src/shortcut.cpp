#include "fpp/shortcut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>

#include "fpp/errors.hpp"

namespace fpp {
namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_rational exact(double x) { return cpp_rational(x); }

cpp_rational exact_time(const EdgeField& field, const PathRecord& path) {
  cpp_rational t = 0;
  for (std::size_t i = 0; i < path.edge_count(); ++i) t += exact(field.weight(path.edge(i)));
  return t;
}

[[noreturn]] void blocked(const Vertex& x, const LatticeBox& where) {
  fail(ErrorCode::kConstructionBlocked,
       fmt::format("detour reaches {} outside {}", x.to_string(), where.to_string()));
}

}  // namespace

std::int64_t min_K(double M, double r, double delta, int d) {
  if (!(delta > 0) || !std::isfinite(delta)) fail(ErrorCode::kInvalidDelta, "delta must be finite and > 0");
  if (!(M > 0) || !std::isfinite(M)) fail(ErrorCode::kInvalidSpec, "M must be finite and > 0");
  if (!(r >= 0) || !std::isfinite(r)) fail(ErrorCode::kInvalidSpec, "r must be finite and >= 0");
  if (d < 1) fail(ErrorCode::kInvalidSpec, "dimension must be >= 1");
  const cpp_rational dl = exact(delta);
  const cpp_rational lhs = 2 * exact(M) + 1 + exact(r) + dl / (24 * d);
  const cpp_rational bound = 2 * lhs / dl;
  const cpp_int k = numerator(bound) / denominator(bound) + 1;
  if (k > std::numeric_limits<std::int64_t>::max()) fail(ErrorCode::kInvalidSpec, "K does not fit in 64 bits");
  return static_cast<std::int64_t>(k);
}

char case_letter(ShortcutCase c) {
  switch (c) {
    case ShortcutCase::kA: return 'a';
    case ShortcutCase::kB: return 'b';
    case ShortcutCase::kC: return 'c';
  }
  return '?';
}

ShortcutProposal build_shortcut(const EdgeField& field, const PathRecord& path,
                                const StretchRecord& stretch, int K) {
  if (K < 1) fail(ErrorCode::kInvalidSpec, "K must be >= 1");
  if (!stretch.region.is_b_kind() || stretch.region.cube.N != 4 * K) {
    fail(ErrorCode::kInvalidSpec, fmt::format("stretch must cross a B-box at scale N = 4K = {}", 4 * K));
  }
  if (stretch.end >= path.vertex_count() || stretch.start >= stretch.end ||
      path.slice(stretch.start, stretch.end) != stretch.stretch) {
    fail(ErrorCode::kInvalidSpec, "stretch does not belong to this path");
  }
  const int d = path.front().dim();
  if (d < 2) fail(ErrorCode::kInvalidSpec, "shortcuts need d >= 2");

  ShortcutProposal out;
  out.stretch = stretch;
  out.K = K;
  const int s = stretch.region.axis;
  const int t = s == 0 ? 1 : 0;
  out.crossing_axis = s;
  out.lane_axis = t;
  const int sign = stretch.v[s] > stretch.u[s] ? 1 : -1;
  const int face = stretch.u[s];
  auto along = [&](const Vertex& x) { return sign * (x[s] - face); };

  // Lowest lane coordinate among stretch vertices in the middle half; ties go
  // to the one nearest u, then lexicographic.
  std::size_t zi = path.vertex_count();
  for (std::size_t i = stretch.start; i <= stretch.end; ++i) {
    const Vertex& x = path[i];
    const int a = along(x);
    if (a < K || a > 3 * K) continue;
    if (zi == path.vertex_count()) {
      zi = i;
      continue;
    }
    const Vertex& best = path[zi];
    const auto key = std::make_tuple(x[t], a, x);
    const auto best_key = std::make_tuple(best[t], along(best), best);
    if (key < best_key) zi = i;
  }
  if (zi == path.vertex_count()) fail(ErrorCode::kInvalidSpec, "stretch has no vertex in the middle half");
  out.z_index = zi;
  out.z = path[zi];
  out.mirrored = along(out.z) > 2 * K;
  const int step = sign * (out.mirrored ? -1 : 1);

  std::unordered_map<Vertex, std::size_t> on_path;
  on_path.reserve(path.vertex_count() * 2);
  for (std::size_t i = 0; i < path.vertex_count(); ++i) on_path.emplace(path[i], i);

  const LatticeBox region = region_vertices(stretch.region);
  std::vector<Vertex> detour{out.z};
  std::optional<std::size_t> hit;
  auto advance = [&](int axis, int delta) {
    const Vertex next = detour.back().shifted(axis, delta);
    if (!region.contains(next)) blocked(next, region);
    if (!field.box().contains(next)) blocked(next, field.box());
    detour.push_back(next);
    if (const auto it = on_path.find(next); it != on_path.end()) hit = it->second;
  };
  advance(t, -1);
  out.z_prime = detour.back();
  for (int k = 0; k < K && !hit; ++k) advance(s, step);
  while (!hit) advance(t, 1);

  out.w_index = *hit;
  out.w = path[*hit];
  out.detour = PathRecord(detour);
  out.detour_edges = out.detour.edges();
  out.substituted = path.slice(std::min(out.z_index, out.w_index), std::max(out.z_index, out.w_index));
  out.case_tag = out.w_index < stretch.start ? ShortcutCase::kB
                 : out.w_index > stretch.end ? ShortcutCase::kC
                                             : ShortcutCase::kA;

  const std::unordered_set<Vertex> in_detour(detour.begin(), detour.end());
  for (std::size_t i = 1; i + 1 < detour.size(); ++i) {
    for (int a = 0; a < d; ++a) {
      for (int dir : {-1, 1}) {
        const Vertex y = detour[i].shifted(a, dir);
        if (in_detour.count(y)) continue;
        const EdgeId e = edge_between(detour[i], y);
        if (!field.box().contains(e)) blocked(y, field.box());
        out.perimeter_edges.push_back(e);
      }
    }
  }
  std::sort(out.perimeter_edges.begin(), out.perimeter_edges.end());
  return out;
}

bool shortcut_is_successful(const EdgeField& field, const ShortcutProposal& proposal, double M) {
  return exact(M) + exact_time(field, proposal.detour) < exact_time(field, proposal.substituted);
}

bool event_F_holds(const EdgeField& field, const ShortcutProposal& proposal, double M, double r,
                   double delta, int d) {
  if (proposal.detour_edges.empty()) return false;
  const cpp_rational light_cap = exact(r) + exact(delta) / (24 * d);
  const cpp_rational first = exact(field.weight(proposal.detour_edges.front()));
  if (!(first > exact(M) && first <= exact(M) + 1)) return false;
  for (std::size_t i = 1; i < proposal.detour_edges.size(); ++i) {
    if (!(exact(field.weight(proposal.detour_edges[i])) < light_cap)) return false;
  }
  return std::all_of(proposal.perimeter_edges.begin(), proposal.perimeter_edges.end(),
                     [&](const EdgeId& e) { return field.weight(e) > M; });
}

PathRecord apply_shortcut(const PathRecord& path, const ShortcutProposal& proposal) {
  const std::size_t lo = std::min(proposal.z_index, proposal.w_index);
  const std::size_t hi = std::max(proposal.z_index, proposal.w_index);
  if (hi >= path.vertex_count() || path[proposal.z_index] != proposal.z || path[proposal.w_index] != proposal.w) {
    fail(ErrorCode::kInvalidSpec, "proposal was not built from this path");
  }
  const std::size_t first = std::max(lo, proposal.stretch.start);
  const std::size_t last = std::min(hi, proposal.stretch.end);
  if (first > last || l1_distance(path[first], path[last]) < proposal.K) {
    fail(ErrorCode::kInvariantViolated,
         fmt::format("replaced part keeps less than K = {} of the stretch", proposal.K));
  }

  const PathRecord bridge = proposal.z_index <= proposal.w_index ? proposal.detour : proposal.detour.reversed();
  std::vector<Vertex> out(path.vertices().begin(), path.vertices().begin() + static_cast<std::ptrdiff_t>(lo));
  out.insert(out.end(), bridge.vertices().begin(), bridge.vertices().end());
  out.insert(out.end(), path.vertices().begin() + static_cast<std::ptrdiff_t>(hi) + 1, path.vertices().end());
  return PathRecord(std::move(out));
}

}  // namespace fpp

#include "fpp/geodesic.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <utility>

#include <fmt/format.h>

#include "fpp/config.hpp"
#include "fpp/errors.hpp"

namespace fpp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_in(const LatticeBox& box, const Vertex& v) {
  if (!box.contains(v)) {
    fail(ErrorCode::kOutOfBox, fmt::format("{} outside {}", v.to_string(), box.to_string()));
  }
}

}  // namespace

double ExtendedTime::value() const {
  if (!finite_) fail(ErrorCode::kRuntimeFailure, "value() of an infinite passage time");
  return value_;
}

std::string ExtendedTime::to_string() const { return finite_ ? format_number(value_) : "inf"; }

bool ShortestTimeTree::reached(const Vertex& v) const {
  return domain_.contains(v) && dist_[domain_.index(v)] < kInf;
}

ExtendedTime ShortestTimeTree::time_to(const Vertex& v) const {
  require_in(domain_, v);
  const double t = dist_[domain_.index(v)];
  return t < kInf ? ExtendedTime(t) : ExtendedTime::infinite();
}

std::optional<Vertex> ShortestTimeTree::predecessor(const Vertex& v) const {
  require_in(domain_, v);
  const std::int64_t p = pred_[domain_.index(v)];
  if (p < 0) return std::nullopt;
  return domain_.vertex(static_cast<std::size_t>(p));
}

PathRecord ShortestTimeTree::path_to(const Vertex& v) const {
  require_in(domain_, v);
  std::size_t i = domain_.index(v);
  if (!(dist_[i] < kInf)) {
    fail(ErrorCode::kRuntimeFailure, fmt::format("{} unreachable from {}", v.to_string(), source_.to_string()));
  }
  std::vector<Vertex> rev{v};
  while (pred_[i] >= 0) {
    i = static_cast<std::size_t>(pred_[i]);
    rev.push_back(domain_.vertex(i));
  }
  std::reverse(rev.begin(), rev.end());
  return PathRecord(std::move(rev));
}

bool ShortestTimeTree::tie_on_path(const Vertex& v) const {
  require_in(domain_, v);
  std::int64_t i = static_cast<std::int64_t>(domain_.index(v));
  while (i >= 0) {
    if (tie_[static_cast<std::size_t>(i)]) return true;
    i = pred_[static_cast<std::size_t>(i)];
  }
  return false;
}

ShortestTimeTree shortest_time_tree(const EdgeField& field, const Vertex& source,
                                    const SearchLimits& limits, const std::optional<Vertex>& stop_at) {
  const LatticeBox& fbox = field.box();
  const LatticeBox domain = limits.region.value_or(fbox);
  if (!fbox.contains(domain)) {
    fail(ErrorCode::kRegionOutOfBox,
         fmt::format("search region {} outside field {}", domain.to_string(), fbox.to_string()));
  }
  require_in(domain, source);
  if (stop_at) require_in(domain, *stop_at);

  ShortestTimeTree tree;
  tree.domain_ = domain;
  tree.source_ = source;
  const std::size_t n = domain.vertex_count();
  tree.dist_.assign(n, kInf);
  tree.pred_.assign(n, -1);
  tree.tie_.assign(n, 0);
  std::vector<std::uint8_t> settled(n, 0);

  const int d = domain.dim();
  const double cap = limits.max_weight.value_or(kInf);
  const double cutoff = limits.time_cutoff.value_or(kInf);
  const std::int64_t target = stop_at ? static_cast<std::int64_t>(domain.index(*stop_at)) : -1;

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const std::size_t s = domain.index(source);
  tree.dist_[s] = 0.0;
  heap.emplace(0.0, s);

  auto relax = [&](std::size_t from, std::size_t to, double w) {
    if (settled[to] || !(w <= cap)) return;
    const double nd = tree.dist_[from] + w;
    double& cur = tree.dist_[to];
    if (nd < cur) {
      cur = nd;
      tree.pred_[to] = static_cast<std::int64_t>(from);
      tree.tie_[to] = 0;
      heap.emplace(nd, to);
    } else if (nd == cur) {
      tree.tie_[to] = 1;
      if (static_cast<std::int64_t>(from) < tree.pred_[to]) tree.pred_[to] = static_cast<std::int64_t>(from);
    }
  };

  while (!heap.empty()) {
    const auto [t, i] = heap.top();
    heap.pop();
    if (settled[i] || t > tree.dist_[i]) continue;
    if (t >= cutoff) break;
    settled[i] = 1;
    if (static_cast<std::int64_t>(i) == target) break;
    const Vertex x = domain.vertex(i);
    const std::size_t fi = fbox.index(x);
    for (int a = 0; a < d; ++a) {
      const std::size_t ds = domain.stride(a);
      if (x[a] < domain.hi()[a]) {
        relax(i, i + ds, field.weight_at_slot(fi * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)));
      }
      if (x[a] > domain.lo()[a]) {
        const std::size_t nf = fi - fbox.stride(a);
        relax(i, i - ds, field.weight_at_slot(nf * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)));
      }
    }
  }
  return tree;
}

double shortest_time(const EdgeField& field, const Vertex& u, const Vertex& v) {
  require_in(field.box(), u);
  require_in(field.box(), v);
  return shortest_time_tree(field, u, {}, v).time_to(v).value();
}

GeodesicResult extract_geodesic(const EdgeField& field, const Vertex& u, const Vertex& v) {
  require_in(field.box(), u);
  require_in(field.box(), v);
  const ShortestTimeTree tree = shortest_time_tree(field, u, {}, v);
  GeodesicResult out;
  out.path = tree.path_to(v);
  out.time = tree.time_to(v).value();
  out.unique = !tree.tie_on_path(v);
  return out;
}

RestrictedResult restricted_time(const EdgeField& field, double max_weight, const Vertex& u,
                                 const Vertex& v) {
  if (!(max_weight >= 0)) fail(ErrorCode::kInvalidSpec, "restriction level M must be >= 0");
  require_in(field.box(), u);
  require_in(field.box(), v);
  SearchLimits limits;
  limits.max_weight = max_weight;
  const ShortestTimeTree tree = shortest_time_tree(field, u, limits, v);
  RestrictedResult out;
  out.time = tree.time_to(v);
  if (out.time.is_finite()) {
    out.geodesic = GeodesicResult{tree.path_to(v), out.time.value(), !tree.tie_on_path(v)};
  }
  return out;
}

PathRecord finite_horizon_ray(const EdgeField& field, const Vertex& origin, int axis, int sign,
                              int length) {
  if (axis < 0 || axis >= origin.dim() || (sign != 1 && sign != -1) || length < 0) {
    fail(ErrorCode::kInvalidSpec, "ray direction must be a signed axis and length >= 0");
  }
  const Vertex end = origin.shifted(axis, sign * length);
  require_in(field.box(), origin);
  require_in(field.box(), end);
  return shortest_time_tree(field, origin, {}, end).path_to(end);
}

ExtendedTime brute_force_time(const EdgeField& field, const Vertex& u, const Vertex& v,
                              int max_len, std::uint64_t node_budget) {
  const LatticeBox& box = field.box();
  require_in(box, u);
  require_in(box, v);
  std::vector<std::uint8_t> on_path(box.vertex_count(), 0);
  double best = kInf;
  std::uint64_t expansions = 0;

  // Plain enumeration, no pruning: this is the reference the search is checked
  // against.
  auto dfs = [&](auto&& self, const Vertex& x, double acc, int depth) -> void {
    if (++expansions > node_budget) {
      fail(ErrorCode::kBudgetExceeded, fmt::format("enumeration exceeded {} expansions", node_budget));
    }
    if (x == v) {
      best = std::min(best, acc);
      return;
    }
    if (depth == max_len) return;
    for (const Vertex& y : box.neighbors(x)) {
      const std::size_t yi = box.index(y);
      if (on_path[yi]) continue;
      on_path[yi] = 1;
      self(self, y, acc + field.weight(x, y), depth + 1);
      on_path[yi] = 0;
    }
  };
  on_path[box.index(u)] = 1;
  dfs(dfs, u, 0.0, 0);
  return best < kInf ? ExtendedTime(best) : ExtendedTime::infinite();
}

}  // namespace fpp

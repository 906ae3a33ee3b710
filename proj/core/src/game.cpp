#include "fpp/game.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>

#include "fpp/errors.hpp"
#include "fpp/rng.hpp"

namespace fpp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Occupancy [from, to); an empty interval stands for the instant `from`.
struct Stay {
  Vertex v;
  double from = 0.0;
  double to = 0.0;
  std::size_t index = 0;  // route index, sigma only
};

std::optional<double> meet(const Stay& a, const Stay& b) {
  const bool pa = !(a.from < a.to);
  const bool pb = !(b.from < b.to);
  const double start = std::max(a.from, b.from);
  if (pa && pb) return a.from == b.from ? std::optional(start) : std::nullopt;
  if (pa) return (b.from <= a.from && a.from < b.to) ? std::optional(start) : std::nullopt;
  if (pb) return (a.from <= b.from && b.from < a.to) ? std::optional(start) : std::nullopt;
  return start < std::min(a.to, b.to) ? std::optional(start) : std::nullopt;
}

// Ray prefix times in the order the tree accumulated them.
std::vector<double> prefix_times(const EdgeField& field, const PathRecord& path) {
  std::vector<double> t(path.vertex_count(), 0.0);
  for (std::size_t i = 1; i < path.vertex_count(); ++i) t[i] = t[i - 1] + field.weight(path[i - 1], path[i]);
  return t;
}

// light_from[k]: every ray edge after position k is <= M.
std::vector<std::uint8_t> light_suffix(const EdgeField& field, const PathRecord& ray, double M) {
  std::vector<std::uint8_t> ok(ray.vertex_count(), 1);
  for (std::size_t k = ray.vertex_count() - 1; k-- > 0;) {
    ok[k] = ok[k + 1] && field.weight(ray[k], ray[k + 1]) <= M;
  }
  return ok;
}

}  // namespace

std::optional<EscapePlan> build_escape_plan(const EdgeField& field, const Vertex& x_lambda,
                                            const Vertex& x_sigma, double M, int horizon,
                                            const PlanOptions& options) {
  if (x_lambda == x_sigma) fail(ErrorCode::kSamePosition, "x_sigma and x_lambda coincide");
  if (!(M > 0)) fail(ErrorCode::kInvalidSpec, "M must be > 0");
  for (const Vertex& x : {x_lambda, x_sigma}) {
    if (!field.box().contains(x)) {
      fail(ErrorCode::kOutOfBox, fmt::format("{} outside {}", x.to_string(), field.box().to_string()));
    }
  }
  if (!options.restrict_to_light && field.max_weight() > M) {
    fail(ErrorCode::kUnboundedWeights,
         fmt::format("field has weight {} above M = {}", field.max_weight(), M));
  }

  const PathRecord ray = finite_horizon_ray(field, x_lambda, options.ray_axis, options.ray_sign, horizon);
  const std::vector<double> t_lambda = prefix_times(field, ray);
  const std::vector<std::uint8_t> light = light_suffix(field, ray, M);
  SearchLimits limits;
  if (options.restrict_to_light) limits.max_weight = M;
  const ShortestTimeTree from_sigma = shortest_time_tree(field, x_sigma, limits);

  auto admissible = [&](std::size_t k) {
    if (options.restrict_to_light && !light[k]) return false;
    const ExtendedTime ts = from_sigma.time_to(ray[k]);
    return ts.is_finite() && M + ts.value() < t_lambda[k];
  };

  std::optional<std::size_t> anchor;
  if (const auto on_ray = ray.position_of(x_sigma); on_ray && t_lambda[*on_ray] > M && admissible(*on_ray)) {
    anchor = on_ray;
  }
  for (std::size_t k = 0; !anchor && k < ray.vertex_count(); ++k) {
    if (admissible(k)) anchor = k;
  }
  if (!anchor) return std::nullopt;

  EscapePlan plan;
  plan.x_sigma = x_sigma;
  plan.x_lambda = x_lambda;
  plan.M = M;
  plan.anchor = ray[*anchor];
  plan.approach = from_sigma.path_to(plan.anchor);
  plan.ray = ray;
  plan.ray_tail = ray.slice(*anchor, ray.vertex_count() - 1);
  plan.degenerate = plan.ray_tail.vertex_count() == 1;
  plan.route = plan.approach.vertices();
  plan.route.insert(plan.route.end(), plan.ray_tail.vertices().begin() + 1, plan.ray_tail.vertices().end());
  plan.anchor_index = plan.approach.vertex_count() - 1;
  plan.arrival.assign(plan.route.size(), 0.0);
  for (std::size_t i = 1; i < plan.route.size(); ++i) {
    plan.arrival[i] = plan.arrival[i - 1] + field.weight(plan.route[i - 1], plan.route[i]);
  }
  plan.departure.assign(plan.route.size(), 0.0);
  for (std::size_t i = 0; i + 1 < plan.route.size(); ++i) plan.departure[i] = plan.arrival[i + 1];
  plan.departure.back() = plan.arrival.back() + M;
  plan.sigma_to_anchor = plan.arrival[plan.anchor_index];
  plan.lambda_to_anchor = t_lambda[*anchor];
  return plan;
}

CertificateCheck check_escape_certificate(const EdgeField& field, const EscapePlan& plan) {
  const std::size_t n = plan.route.size();
  auto malformed = [](const std::string& why) { fail(ErrorCode::kMalformedPlan, why); };
  if (n == 0 || plan.arrival.size() != n || plan.departure.size() != n) malformed("route and schedule sizes differ");
  if (plan.anchor_index >= n || plan.route[plan.anchor_index] != plan.anchor) malformed("anchor not on route");
  if (plan.route.front() != plan.x_sigma) malformed("route does not start at x_sigma");
  if (plan.arrival.front() != 0.0) malformed("route does not start at time 0");
  for (std::size_t i = 0; i < n; ++i) {
    if (!field.box().contains(plan.route[i])) malformed("route leaves the field box");
    if (i + 1 < n) {
      if (l1_distance(plan.route[i], plan.route[i + 1]) != 1) malformed("route step is not an edge");
      if (plan.arrival[i] + field.weight(plan.route[i], plan.route[i + 1]) != plan.arrival[i + 1]) {
        malformed(fmt::format("arrival times inconsistent at step {}", i));
      }
      if (plan.departure[i] != plan.arrival[i + 1]) malformed("departure differs from next arrival");
    }
  }
  if (plan.departure.back() != plan.arrival.back() + plan.M) malformed("final stay differs from M");

  const ShortestTimeTree from_lambda = shortest_time_tree(field, plan.x_lambda);
  CertificateCheck out;
  out.ok = true;
  out.degenerate = plan.anchor_index + 1 == n;
  out.min_slack = kInf;
  for (std::size_t i = plan.anchor_index; i < n; ++i) {
    const double slack = from_lambda.time_to(plan.route[i]).value() - plan.departure[i];
    out.min_slack = std::min(out.min_slack, slack);
    if (!(slack > 0) && out.ok) {
      out.ok = false;
      out.first_failure = i;
    }
  }
  return out;
}

bool verify_escape_certificate(const EdgeField& field, const EscapePlan& plan) {
  return check_escape_certificate(field, plan).ok;
}

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kGreedy: return "greedy";
    case PolicyKind::kIntercept: return "intercept";
    case PolicyKind::kRandomWalk: return "random_walk";
    case PolicyKind::kStationary: return "stationary";
  }
  return "?";
}

PolicyKind parse_policy(const std::string& name) {
  for (PolicyKind k : {PolicyKind::kGreedy, PolicyKind::kIntercept, PolicyKind::kRandomWalk,
                       PolicyKind::kStationary}) {
    if (policy_name(k) == name) return k;
  }
  if (name == "random-walk") return PolicyKind::kRandomWalk;
  fail(ErrorCode::kConfigInvalid, fmt::format("unknown pursuer policy '{}'", name));
}

GameTrace run_pursuit(const EdgeField& field, const EscapePlan& plan, const PursuerPolicy& policy,
                      double t_max) {
  GameTrace trace;
  trace.horizon = std::min(t_max, plan.arrival.back() + plan.M);
  const double horizon = trace.horizon;
  const std::size_t n = plan.route.size();

  std::vector<Stay> sigma_stays;
  std::unordered_map<Vertex, std::vector<std::size_t>> sigma_at;
  for (std::size_t i = 0; i < n && plan.arrival[i] < horizon; ++i) {
    sigma_stays.push_back({plan.route[i], plan.arrival[i], std::min(plan.departure[i], horizon), i});
    sigma_at[plan.route[i]].push_back(sigma_stays.size() - 1);
    if (i + 1 < n && plan.departure[i] < horizon) {
      trace.events.push_back({plan.arrival[i], Player::kSigma, EventKind::kKnock, plan.route[i], plan.route[i + 1]});
      trace.events.push_back({plan.departure[i], Player::kSigma, EventKind::kCross, plan.route[i], plan.route[i + 1]});
    }
  }
  auto sigma_index_at = [&](double t) {
    const auto it = std::upper_bound(plan.arrival.begin(), plan.arrival.end(), t);
    return static_cast<std::size_t>(it - plan.arrival.begin()) - 1;
  };

  // Trees rooted at the current pursuit target give lambda's next hop from
  // anywhere; sigma's target changes rarely, so one cached tree suffices.
  std::optional<Vertex> cached_root;
  std::optional<ShortestTimeTree> cached_tree;
  auto hop_towards = [&](const Vertex& from, const Vertex& target) -> std::optional<Vertex> {
    if (from == target) return std::nullopt;
    if (!cached_root || *cached_root != target) {
      cached_tree = shortest_time_tree(field, target);
      cached_root = target;
    }
    return cached_tree->predecessor(from);
  };

  const CounterStream walk_rng(hash_words(policy.seed, {0x7761'6c6bULL}));
  std::uint64_t walk_steps = 0;
  auto choose = [&](const Vertex& pos, double t) -> std::optional<Vertex> {
    const std::size_t si = sigma_index_at(t);
    switch (policy.kind) {
      case PolicyKind::kStationary: return std::nullopt;
      case PolicyKind::kGreedy: return hop_towards(pos, plan.route[si]);
      case PolicyKind::kIntercept: return hop_towards(pos, plan.route[std::min(si + 1, n - 1)]);
      case PolicyKind::kRandomWalk: {
        const std::vector<Vertex> nbrs = field.box().neighbors(pos);
        if (nbrs.empty()) return std::nullopt;
        return nbrs[static_cast<std::size_t>(walk_rng.bits_at(walk_steps++) % nbrs.size())];
      }
    }
    return std::nullopt;
  };

  std::vector<Stay> lambda_stays;
  Vertex pos = plan.x_lambda;
  double arrived = 0.0;
  double now = 0.0;
  while (true) {
    const std::optional<Vertex> next = choose(pos, now);
    if (next) {
      const double open = now + field.weight(pos, *next);
      trace.events.push_back({now, Player::kLambda, EventKind::kKnock, pos, *next});
      if (!(open < horizon)) break;
      lambda_stays.push_back({pos, arrived, open, 0});
      trace.events.push_back({open, Player::kLambda, EventKind::kCross, pos, *next});
      pos = *next;
      arrived = open;
      now = open;
      continue;
    }
    // Idle: wait for sigma's next crossing.
    const auto later = std::upper_bound(plan.arrival.begin(), plan.arrival.end(), now);
    if (later == plan.arrival.end() || !(*later < horizon)) break;
    now = *later;
  }
  lambda_stays.push_back({pos, arrived, horizon, 0});

  std::optional<double> caught_at;
  for (const Stay& ls : lambda_stays) {
    if (caught_at && ls.from > *caught_at) break;
    const auto it = sigma_at.find(ls.v);
    if (it == sigma_at.end()) continue;
    for (std::size_t si : it->second) {
      const Stay& ss = sigma_stays[si];
      const auto t = meet(ls, ss);
      if (t && (!caught_at || *t < *caught_at)) {
        caught_at = t;
        trace.capture_vertex = ls.v;
        trace.capture_phase = ss.index >= plan.anchor_index ? CapturePhase::kTail : CapturePhase::kApproach;
      }
    }
  }

  std::stable_sort(trace.events.begin(), trace.events.end(),
                   [](const GameEvent& a, const GameEvent& b) { return a.time < b.time; });
  if (caught_at) {
    trace.caught = true;
    trace.capture_time = *caught_at;
    std::erase_if(trace.events, [&](const GameEvent& e) { return e.time > *caught_at; });
    trace.events.push_back(
        {*caught_at, Player::kLambda, EventKind::kCapture, trace.capture_vertex, trace.capture_vertex});
  }
  return trace;
}

std::vector<Vertex> find_escape_positions(const EdgeField& field, const Vertex& x_lambda, double M,
                                          int horizon, const PlanOptions& options) {
  if (!options.restrict_to_light && field.max_weight() > M) {
    fail(ErrorCode::kUnboundedWeights,
         fmt::format("field has weight {} above M = {}", field.max_weight(), M));
  }
  const LatticeBox& box = field.box();
  const PathRecord ray = finite_horizon_ray(field, x_lambda, options.ray_axis, options.ray_sign, horizon);
  const std::vector<double> t_lambda = prefix_times(field, ray);
  const std::vector<std::uint8_t> light = light_suffix(field, ray, M);
  std::vector<std::uint8_t> good(box.vertex_count(), 0);
  for (std::size_t k = 1; k < ray.vertex_count(); ++k) {
    if (!(t_lambda[k] > M)) continue;
    if (options.restrict_to_light && !light[k]) continue;
    SearchLimits limits;
    limits.time_cutoff = t_lambda[k] - M;
    if (options.restrict_to_light) limits.max_weight = M;
    const ShortestTimeTree tree = shortest_time_tree(field, ray[k], limits);
    const std::vector<double>& times = tree.raw_times();
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (M + times[i] < t_lambda[k]) good[i] = 1;
    }
  }
  good[box.index(x_lambda)] = 0;
  std::vector<Vertex> out;
  for (std::size_t i = 0; i < good.size(); ++i) {
    if (good[i]) out.push_back(box.vertex(i));
  }
  return out;
}

}  // namespace fpp

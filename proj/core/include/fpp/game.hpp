#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpp/edge_field.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/path.hpp"

namespace fpp {

struct PlanOptions {
  int ray_axis = 0;
  int ray_sign = 1;
  /// Build the approach on the subgraph of edges <= M and require the tail to
  /// be light, instead of rejecting fields with weights above M.
  bool restrict_to_light = false;
};

/// sigma's route: geodesic x_sigma -> anchor, then the ray from x_lambda
/// beyond the anchor. sigma leaves route[i] at departure[i] = arrival[i+1];
/// it stays M at the last vertex.
struct EscapePlan {
  Vertex x_sigma;
  Vertex x_lambda;
  double M = 1.0;
  Vertex anchor;
  std::size_t anchor_index = 0;  // position of the anchor on `route`
  PathRecord approach;
  PathRecord ray;
  PathRecord ray_tail;
  std::vector<Vertex> route;  // may revisit a vertex where approach and tail meet
  std::vector<double> arrival;
  std::vector<double> departure;
  double sigma_to_anchor = 0.0;
  double lambda_to_anchor = 0.0;
  bool degenerate = false;  // tail is the anchor alone
};

/// Returns nullopt when no ray vertex within the horizon is an anchor.
/// Throws SamePosition, UnboundedWeights (unless restrict_to_light), OutOfBox.
std::optional<EscapePlan> build_escape_plan(const EdgeField& field, const Vertex& x_lambda,
                                            const Vertex& x_sigma, double M, int horizon,
                                            const PlanOptions& options = {});

struct CertificateCheck {
  bool ok = false;
  double min_slack = 0.0;  // min over tail of t(x_lambda, v) - departure(v)
  std::optional<std::size_t> first_failure;  // route index
  bool degenerate = false;
};

/// departure(v) < t(x_lambda, v) for every route vertex from the anchor on,
/// with t(x_lambda, .) from an independent search. Throws MalformedPlan.
CertificateCheck check_escape_certificate(const EdgeField& field, const EscapePlan& plan);
bool verify_escape_certificate(const EdgeField& field, const EscapePlan& plan);

enum class PolicyKind { kGreedy, kIntercept, kRandomWalk, kStationary };

std::string policy_name(PolicyKind kind);
/// Throws ConfigInvalid for unknown names.
PolicyKind parse_policy(const std::string& name);

struct PursuerPolicy {
  PolicyKind kind = PolicyKind::kGreedy;
  std::uint64_t seed = 0;  // random walk only
};

enum class Player { kSigma, kLambda };
enum class EventKind { kKnock, kCross, kCapture };

struct GameEvent {
  double time = 0.0;
  Player player = Player::kSigma;
  EventKind kind = EventKind::kKnock;
  Vertex from;
  Vertex to;
};

enum class CapturePhase { kNone, kApproach, kTail };

struct GameTrace {
  std::vector<GameEvent> events;  // time-ordered
  bool caught = false;
  double capture_time = 0.0;
  Vertex capture_vertex;
  CapturePhase capture_phase = CapturePhase::kNone;
  double horizon = 0.0;
};

/// Event-driven game. Occupancy of a vertex is [arrival, departure); a zero
/// stay is the single instant. Capture is co-occupation at some instant. The
/// run ends at min(t_max, final arrival + M). lambda's knocks are committed;
/// it decides at t = 0, after each of its crossings, and while idle whenever
/// sigma crosses.
GameTrace run_pursuit(const EdgeField& field, const EscapePlan& plan, const PursuerPolicy& policy,
                      double t_max);

/// Vertices x_sigma != x_lambda with M + t(x, x_sigma) < t(x_lambda, x) for
/// some x on the ray of length `horizon`; sorted.
std::vector<Vertex> find_escape_positions(const EdgeField& field, const Vertex& x_lambda, double M,
                                          int horizon, const PlanOptions& options = {});

}  // namespace fpp

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpp/config.hpp"
#include "fpp/distribution.hpp"
#include "fpp/game.hpp"
#include "fpp/lattice.hpp"
#include "fpp/path.hpp"
#include "fpp/usefulness.hpp"

namespace fpp {

enum class TargetMode { kAxis, kSphere };

/// Everything a campaign needs. `threads` only affects wall time and is left
/// out of the echo and the hash.
struct ExperimentConfig {
  std::string experiment;
  int d = 2;
  int L = 0;  // vertices per side; 0 picks a default from the n-list
  DistributionSpec spec = DistributionSpec::exponential(1.0);
  double M = 1.0;
  std::optional<IntervalSet> A;  // heavy-edge predicate; (M, inf) when absent
  std::vector<int> n_list;
  int replicas = 100;
  std::uint64_t seed = 1;
  double alpha = 0.0;
  std::vector<double> alpha_grid{0.05, 0.1, 0.2, 0.3, 0.5};
  int N = 4;
  double delta = 0.1;
  std::optional<double> r;  // defaults to the support minimum
  TargetMode target = TargetMode::kAxis;
  bool allow_any_spec = false;
  std::vector<PolicyKind> policies{PolicyKind::kGreedy, PolicyKind::kIntercept,
                                   PolicyKind::kRandomWalk, PolicyKind::kStationary};
  double t_max = 1e9;
  int sigma_per_field = 1;
  bool restrict_to_light = false;
  bool continuity_correction = false;
  PcTable pc = PcTable::defaults();
  int threads = 1;

  /// Keys: experiment, d, L, n, replicas, seed, M, A, alpha, alpha_grid, N,
  /// delta, r, target, allow_any_spec, policies, t_max,
  /// sigma_per_field, restrict_to_light, continuity_correction, threads,
  /// dist.*, pc.<d> = "bond,oriented". Throws ConfigInvalid.
  static ExperimentConfig from_config(const KeyValueConfig& cfg);
  /// Canonical echo; from_config(to_config()) reproduces the run.
  KeyValueConfig to_config() const;

  int side() const;
  /// Box holding every replica field.
  LatticeBox box() const;
  /// Throws ConfigInvalid.
  void validate() const;
};

const std::vector<std::string>& experiment_names();

struct EstimateRow {
  int n = 0;
  std::int64_t replicas = 0;
  double estimate = 0.0;
  double std_error = 0.0;
};

struct ReplicaRecord {
  int n = 0;
  int replica = 0;
  std::uint64_t field_seed = 0;
  std::vector<double> values;  // aligned with ExperimentResult::detail_columns
};

struct AuxMetric {
  std::string name;
  std::optional<int> n;
  double value = 0.0;
};

struct RatePoint {
  double n = 0.0;
  double probability = 0.0;
  std::int64_t trials = 0;  // needed by the continuity correction
};

struct RateFit {
  double rate = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
  std::vector<double> used_n;
};

/// Least squares of log q(n) = intercept - rate * n. Rows at 0 or 1 are
/// dropped, or pulled inside with (k + 1/2) / (trials + 1) when
/// `continuity_correction`. Throws InsufficientData with fewer than 3 rows.
RateFit fit_rate(std::span<const RatePoint> points, bool continuity_correction = false);

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;
};

SampleSummary summarize(std::span<const double> values);
/// sqrt(p (1 - p) / trials).
double binomial_std_error(double p, std::int64_t trials);

struct ExperimentResult {
  std::string experiment;
  std::vector<EstimateRow> rows;  // sorted by n
  std::vector<std::string> detail_columns;
  std::vector<ReplicaRecord> details;  // sorted by (n, replica)
  std::vector<AuxMetric> metrics;
  std::optional<RateFit> fit;
  std::vector<std::string> flags;
  KeyValueConfig config_echo;
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// Seed of the field for replica `replica` at radius `n`; shared by every
/// experiment so indicators can be compared per replica.
std::uint64_t replica_seed(std::uint64_t master, int n, int replica);

/// Target of replica `replica` at radius n: n e_1, or a uniform point of the
/// l1 sphere in sphere mode.
Vertex replica_target(const ExperimentConfig& config, int n, int replica);

ExperimentResult run_prop31(const ExperimentConfig& config);
ExperimentResult run_margin(const ExperimentConfig& config, double alpha);
ExperimentResult run_heavy_edges(const ExperimentConfig& config);
ExperimentResult run_all_light(const ExperimentConfig& config);
ExperimentResult run_black_visits(const ExperimentConfig& config);
ExperimentResult run_time_constant(const ExperimentConfig& config);
ExperimentResult run_game_batch(const ExperimentConfig& config);

/// Dispatches on `config.experiment`.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct OutputFiles {
  std::string summary;   // experiment,n,replicas,estimate,stderr
  std::string details;   // n,replica,field_seed,<detail columns>
  std::string metrics;   // name,n,value
  std::string metadata;  // JSON
  std::string config;    // key = value echo
};

std::string summary_csv(const ExperimentResult& result);
std::string details_csv(const ExperimentResult& result);
std::string metrics_csv(const ExperimentResult& result);
std::string metadata_json(const ExperimentResult& result);

/// Writes the five files as `<experiment>*.{csv,json,cfg}` under `dir`
/// (created if needed) and returns their paths. Throws RuntimeFailure.
OutputFiles write_results(const ExperimentResult& result, const std::string& dir);

/// Runs task(i) for i in [0, count) on `threads` workers. Exceptions are
/// rethrown on the caller (the lowest failing index wins).
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

std::string library_version();

}  // namespace fpp

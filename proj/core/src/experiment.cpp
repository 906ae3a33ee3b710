#include "fpp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <variant>

#include <fmt/format.h>
#include <json.hpp>

#include "fpp/edge_field.hpp"
#include "fpp/errors.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/renormalization.hpp"
#include "fpp/rng.hpp"

#ifndef FPP_VERSION
#define FPP_VERSION "0.0.0"
#endif

namespace fpp {
namespace {

constexpr std::uint64_t kSphereStream = 0x7370'6865'7265ULL;
constexpr std::uint64_t kSigmaStream = 0x7369'676d'61ULL;

std::string join_numbers(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_number(xs[i]);
  return out;
}

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

std::string target_name(TargetMode t) { return t == TargetMode::kAxis ? "axis" : "sphere"; }

bool has_atoms(const DistributionSpec& spec) {
  if (const auto* m = std::get_if<AtomMixture>(&spec.family())) {
    if (!m->atoms.empty()) return true;
    return m->continuous && has_atoms(*m->continuous);
  }
  if (const auto* s = std::get_if<Shifted>(&spec.family())) return has_atoms(*s->inner);
  return false;
}

/// l1-sphere point counts C(k, m) for k <= d, m <= n.
std::vector<std::vector<double>> sphere_counts(int d, int n) {
  std::vector<std::vector<double>> c(static_cast<std::size_t>(d) + 1,
                                     std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
  c[0][0] = 1.0;
  for (int k = 1; k <= d; ++k) {
    for (int m = 0; m <= n; ++m) {
      double total = c[k - 1][m];
      for (int j = 1; j <= m; ++j) total += 2.0 * c[k - 1][m - j];
      c[k][m] = total;
    }
  }
  return c;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"prop31",      "margin",        "heavy_edges",
                                              "all_light",   "black_visits",  "time_constant",
                                              "game_batch"};
  return names;
}

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& cfg) {
  static const std::set<std::string> known{
      "experiment", "d",       "L",         "n",        "replicas",       "seed",
      "M",          "A",       "alpha",     "alpha_grid", "N",            "delta",
      "r",          "target",    "allow_any_spec", "policies", "t_max",
      "sigma_per_field", "restrict_to_light", "continuity_correction", "threads"};
  for (const auto& [key, value] : cfg.entries()) {
    if (known.count(key) || key.rfind("dist.", 0) == 0 || key.rfind("pc.", 0) == 0) continue;
    fail(ErrorCode::kConfigInvalid, fmt::format("unknown config key '{}'", key));
  }
  ExperimentConfig c;
  c.experiment = cfg.get("experiment");
  c.d = static_cast<int>(cfg.get_int("d", 2));
  c.L = static_cast<int>(cfg.get_int("L", 0));
  try {
    if (!cfg.subtree("dist.").entries().empty()) c.spec = DistributionSpec::from_config(cfg.subtree("dist."));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigInvalid) throw;
    fail(ErrorCode::kConfigInvalid, fmt::format("dist: {}", e.what()));
  }
  c.M = cfg.get_double("M", c.M);
  if (auto a = cfg.find("A")) {
    try {
      c.A = IntervalSet::parse(*a);
    } catch (const Error& e) {
      fail(ErrorCode::kConfigInvalid, fmt::format("A: {}", e.what()));
    }
  }
  if (cfg.has("n")) {
    for (std::int64_t n : cfg.get_int_list("n")) c.n_list.push_back(static_cast<int>(n));
  }
  c.replicas = static_cast<int>(cfg.get_int("replicas", c.replicas));
  if (cfg.has("seed")) c.seed = cfg.get_u64("seed");
  c.alpha = cfg.get_double("alpha", c.alpha);
  if (cfg.has("alpha_grid")) c.alpha_grid = cfg.get_double_list("alpha_grid");
  c.N = static_cast<int>(cfg.get_int("N", c.N));
  c.delta = cfg.get_double("delta", c.delta);
  if (cfg.has("r")) c.r = cfg.get_double("r");
  if (auto t = cfg.find("target")) {
    if (*t == "axis") {
      c.target = TargetMode::kAxis;
    } else if (*t == "sphere") {
      c.target = TargetMode::kSphere;
    } else {
      fail(ErrorCode::kConfigInvalid, fmt::format("target must be 'axis' or 'sphere', got '{}'", *t));
    }
  }
  c.allow_any_spec = cfg.get_bool("allow_any_spec", false);
  if (cfg.has("policies")) {
    c.policies.clear();
    for (const std::string& p : cfg.get_string_list("policies")) c.policies.push_back(parse_policy(p));
  }
  c.t_max = cfg.get_double("t_max", c.t_max);
  c.sigma_per_field = static_cast<int>(cfg.get_int("sigma_per_field", c.sigma_per_field));
  c.restrict_to_light = cfg.get_bool("restrict_to_light", false);
  c.continuity_correction = cfg.get_bool("continuity_correction", false);
  c.threads = static_cast<int>(cfg.get_int("threads", 1));
  const KeyValueConfig pc_entries = cfg.subtree("pc.");
  for (const auto& [key, value] : pc_entries.entries()) {
    int dim = 0;
    try {
      dim = std::stoi(key);
    } catch (const std::exception&) {
      fail(ErrorCode::kConfigInvalid, fmt::format("pc.{}: dimension must be an integer", key));
    }
    KeyValueConfig one;
    one.set("v", value);
    const std::vector<double> pair = one.get_double_list("v");
    if (pair.size() != 2) fail(ErrorCode::kConfigInvalid, fmt::format("pc.{}: expected 'bond,oriented'", key));
    try {
      c.pc.set(dim, {pair[0], pair[1], "config override"});
    } catch (const Error& e) {
      fail(ErrorCode::kConfigInvalid, e.what());
    }
  }
  c.validate();
  return c;
}

KeyValueConfig ExperimentConfig::to_config() const {
  KeyValueConfig out;
  out.set("experiment", experiment);
  out.set("d", std::to_string(d));
  out.set("L", std::to_string(side()));
  out.merge(spec.to_config(), "dist.");
  out.set_number("M", M);
  if (A) out.set("A", A->to_string());
  out.set("n", join_ints(n_list));
  out.set("replicas", std::to_string(replicas));
  out.set("seed", std::to_string(seed));
  out.set_number("alpha", alpha);
  out.set("alpha_grid", join_numbers(alpha_grid));
  out.set("N", std::to_string(N));
  out.set_number("delta", delta);
  if (r) out.set_number("r", *r);
  out.set("target", target_name(target));
  out.set("allow_any_spec", allow_any_spec ? "true" : "false");
  std::string names;
  for (std::size_t i = 0; i < policies.size(); ++i) names += (i ? "," : "") + policy_name(policies[i]);
  out.set("policies", names);
  out.set_number("t_max", t_max);
  out.set("sigma_per_field", std::to_string(sigma_per_field));
  out.set("restrict_to_light", restrict_to_light ? "true" : "false");
  out.set("continuity_correction", continuity_correction ? "true" : "false");
  for (const auto& [dim, entry] : pc.entries()) {
    out.set(fmt::format("pc.{}", dim), format_number(entry.bond) + "," + format_number(entry.oriented_bond));
  }
  return out;
}

int ExperimentConfig::side() const {
  if (L > 0) return L;
  const int n_max = n_list.empty() ? 0 : *std::max_element(n_list.begin(), n_list.end());
  if (experiment == "game_batch") return 100;
  return target == TargetMode::kAxis ? 3 * n_max : 4 * n_max + 2;
}

LatticeBox ExperimentConfig::box() const {
  const int s = side();
  Vertex lo = Vertex(d);
  Vertex hi = Vertex(d);
  for (int a = 0; a < d; ++a) {
    const bool shifted = a == 0 && target == TargetMode::kAxis && experiment != "game_batch";
    lo[a] = shifted ? -(s / 3) : -(s / 2);
    hi[a] = lo[a] + s - 1;
  }
  return LatticeBox(lo, hi);
}

void ExperimentConfig::validate() const {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end()) {
    fail(ErrorCode::kConfigInvalid, fmt::format("unknown experiment '{}'", experiment));
  }
  if (d < 1 || d > kMaxDim) {
    fail(ErrorCode::kConfigInvalid, fmt::format("d must be in [1, {}]", kMaxDim));
  }
  if (n_list.empty()) fail(ErrorCode::kConfigInvalid, "n-list is empty");
  if (replicas < 1) fail(ErrorCode::kConfigInvalid, "replicas must be >= 1");
  if (threads < 0) fail(ErrorCode::kConfigInvalid, "threads must be >= 0");
  if (!(M >= 0) || !std::isfinite(M)) fail(ErrorCode::kConfigInvalid, "M must be finite and >= 0");
  if (sigma_per_field < 1) fail(ErrorCode::kConfigInvalid, "sigma_per_field must be >= 1");
  if (N < 1) fail(ErrorCode::kConfigInvalid, "N must be >= 1");
  if (!(delta > 0)) fail(ErrorCode::kConfigInvalid, "delta must be > 0");
  const LatticeBox b = box();
  const int margin = side() / 4;
  for (int n : n_list) {
    if (n < 1) fail(ErrorCode::kConfigInvalid, "every n must be >= 1");
    if (experiment == "game_batch") {
      if (n >= b.hi()[0]) {
        fail(ErrorCode::kConfigInvalid, fmt::format("horizon {} does not fit in a box of side {}", n, side()));
      }
      continue;
    }
    for (int a = 0; a < d; ++a) {
      const bool sphere = target == TargetMode::kSphere;
      const int low = sphere ? -n : 0;
      const int high = sphere || a == 0 ? n : 0;
      if (low - b.lo()[a] < margin || b.hi()[a] - high < margin) {
        fail(ErrorCode::kConfigInvalid,
             fmt::format("n = {} is closer than L/4 to the boundary of a box of side {}", n, side()));
      }
    }
  }
}

double binomial_std_error(double p, std::int64_t trials) {
  if (trials <= 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

SampleSummary summarize(std::span<const double> values) {
  SampleSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(s.count - 1);
    s.std_error = std::sqrt(s.variance / static_cast<double>(s.count));
  }
  return s;
}

RateFit fit_rate(std::span<const RatePoint> points, bool continuity_correction) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const RatePoint& p : points) {
    double q = p.probability;
    if (!(q >= 0 && q <= 1)) fail(ErrorCode::kInsufficientData, "probabilities must lie in [0, 1]");
    if (q <= 0.0 || q >= 1.0) {
      if (!continuity_correction || p.trials <= 0) continue;
      q = (q * static_cast<double>(p.trials) + 0.5) / static_cast<double>(p.trials + 1);
    }
    xs.push_back(p.n);
    ys.push_back(std::log(q));
  }
  if (xs.size() < 3) {
    fail(ErrorCode::kInsufficientData, fmt::format("rate fit needs 3 usable rows, got {}", xs.size()));
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) fail(ErrorCode::kInsufficientData, "rate fit needs at least two distinct n");
  const double slope = sxy / sxx;
  RateFit fit;
  fit.rate = -slope;
  fit.intercept = my - slope * mx;
  fit.used_n = xs;
  for (std::size_t i = 0; i < xs.size(); ++i) fit.residuals.push_back(ys[i] - (fit.intercept + slope * xs[i]));
  return fit;
}

std::uint64_t replica_seed(std::uint64_t master, int n, int replica) {
  return hash_words(master, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replica)});
}

Vertex replica_target(const ExperimentConfig& config, int n, int replica) {
  Vertex x = Vertex(config.d);
  if (config.target == TargetMode::kAxis) {
    x[0] = n;
    return x;
  }
  const auto counts = sphere_counts(config.d, n);
  CounterStream stream(hash_words(replica_seed(config.seed, n, replica), {kSphereStream}));
  std::uint64_t index = stream.below(static_cast<std::uint64_t>(counts[config.d][n]));
  int remaining = n;
  for (int a = 0; a < config.d; ++a) {
    const int k = config.d - a - 1;
    const auto here = static_cast<std::uint64_t>(counts[k][remaining]);
    if (index < here) {
      x[a] = 0;
      continue;
    }
    index -= here;
    for (int j = 1; j <= remaining; ++j) {
      const auto block = static_cast<std::uint64_t>(counts[k][remaining - j]);
      if (index < 2 * block) {
        x[a] = index < block ? j : -j;
        if (index >= block) index -= block;
        remaining -= j;
        break;
      }
      index -= 2 * block;
    }
  }
  return x;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string library_version() { return FPP_VERSION; }

namespace {

using ReplicaFn = std::function<std::vector<double>(const EdgeField&, int n, int replica, std::uint64_t seed)>;

std::vector<int> sorted_n(const ExperimentConfig& config) {
  std::vector<int> ns = config.n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  return ns;
}

ExperimentResult start(const ExperimentConfig& config, const std::string& name,
                       std::vector<std::string> columns) {
  ExperimentConfig echo_src = config;
  echo_src.experiment = name;
  echo_src.validate();
  ExperimentResult res;
  res.experiment = name;
  res.detail_columns = std::move(columns);
  res.config_echo = echo_src.to_config();
  res.config_hash = fmt::format("{:016x}", fnv1a64(res.config_echo.to_text()));
  res.seed = config.seed;
  return res;
}

void run_replicas(const ExperimentConfig& config, ExperimentResult& res, const ReplicaFn& fn) {
  const std::vector<int> ns = sorted_n(config);
  const auto R = static_cast<std::size_t>(config.replicas);
  const LatticeBox box = config.box();
  std::vector<ReplicaRecord> records(ns.size() * R);
  parallel_for(records.size(), config.threads, [&](std::size_t i) {
    ReplicaRecord& rec = records[i];
    rec.n = ns[i / R];
    rec.replica = static_cast<int>(i % R);
    rec.field_seed = replica_seed(config.seed, rec.n, rec.replica);
    const EdgeField field = EdgeField::sample(box, config.spec, rec.field_seed);
    rec.values = fn(field, rec.n, rec.replica, rec.field_seed);
  });
  res.details = std::move(records);
}

std::size_t column(const ExperimentResult& res, const std::string& name) {
  const auto it = std::find(res.detail_columns.begin(), res.detail_columns.end(), name);
  if (it == res.detail_columns.end()) fail(ErrorCode::kRuntimeFailure, fmt::format("no column '{}'", name));
  return static_cast<std::size_t>(it - res.detail_columns.begin());
}

std::map<int, std::vector<double>> by_n(const ExperimentResult& res, const std::string& name) {
  const std::size_t c = column(res, name);
  std::map<int, std::vector<double>> out;
  for (const ReplicaRecord& rec : res.details) out[rec.n].push_back(rec.values[c]);
  return out;
}

void proportion_rows(ExperimentResult& res, const std::string& name) {
  for (const auto& [n, xs] : by_n(res, name)) {
    const SampleSummary s = summarize(xs);
    const auto trials = static_cast<std::int64_t>(s.count);
    res.rows.push_back({n, trials, s.mean, binomial_std_error(s.mean, trials)});
  }
}

void mean_rows(ExperimentResult& res, const std::string& name) {
  for (const auto& [n, xs] : by_n(res, name)) {
    const SampleSummary s = summarize(xs);
    res.rows.push_back({n, static_cast<std::int64_t>(s.count), s.mean, s.std_error});
  }
}

/// Fits the decaying probability q(n); `complement` selects q = 1 - estimate.
void attach_fit(const ExperimentConfig& config, ExperimentResult& res, bool complement) {
  std::vector<RatePoint> pts;
  for (const EstimateRow& row : res.rows) {
    pts.push_back({static_cast<double>(row.n), complement ? 1.0 - row.estimate : row.estimate, row.replicas});
  }
  try {
    res.fit = fit_rate(pts, config.continuity_correction);
    res.metrics.push_back({"rate", std::nullopt, res.fit->rate});
    res.metrics.push_back({"intercept", std::nullopt, res.fit->intercept});
    res.metrics.push_back({"fit_points", std::nullopt, static_cast<double>(res.fit->used_n.size())});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientData) throw;
    res.flags.push_back("rate_fit_unavailable");
  }
}

void require_dimension_known(const ExperimentConfig& config) {
  if (!config.pc.has(config.d)) {
    fail(ErrorCode::kConfigInvalid,
         fmt::format("no critical probabilities for d = {}; set pc.{} or allow_any_spec", config.d, config.d));
  }
}

void require_useful(const ExperimentConfig& config) {
  if (config.allow_any_spec) return;
  require_dimension_known(config);
  const UsefulnessReport rep = check_useful(config.spec, config.d, config.pc);
  if (!rep.useful) {
    fail(ErrorCode::kConfigInvalid,
         fmt::format("{} is not useful in d = {} (F(r) = {} vs threshold {}); set allow_any_spec to override",
                     config.spec.describe(), config.d, rep.mass_at_min, rep.threshold));
  }
}

void require_unbounded(const ExperimentConfig& config) {
  if (config.allow_any_spec) return;
  if (config.spec.has_bounded_support()) {
    fail(ErrorCode::kConfigInvalid,
         fmt::format("{} has bounded support; set allow_any_spec to override", config.spec.describe()));
  }
}

double finite_or_inf(const ExtendedTime& t) {
  return t.is_finite() ? t.value() : std::numeric_limits<double>::infinity();
}

double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  if (std::isinf(xs[lo]) || std::isinf(xs[hi])) return xs[std::isinf(xs[lo]) ? lo : hi];
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

std::string alpha_label(double a) { return fmt::format("{:g}", a); }

}  // namespace

ExperimentResult run_prop31(const ExperimentConfig& config) {
  require_useful(config);
  require_unbounded(config);
  ExperimentResult res = start(config, "prop31", {"t", "t_bar", "indicator"});
  const Vertex origin = Vertex(config.d);
  run_replicas(config, res, [&](const EdgeField& f, int n, int replica, std::uint64_t) {
    const Vertex x = replica_target(config, n, replica);
    const double t = shortest_time(f, origin, x);
    const double t_bar = finite_or_inf(restricted_time(f, config.M, origin, x).time);
    return std::vector<double>{t, t_bar, config.M + t < t_bar ? 1.0 : 0.0};
  });
  proportion_rows(res, "indicator");
  attach_fit(config, res, true);
  return res;
}

ExperimentResult run_margin(const ExperimentConfig& config, double alpha) {
  if (!(alpha >= 0) || !std::isfinite(alpha)) fail(ErrorCode::kConfigInvalid, "alpha must be finite and >= 0");
  require_useful(config);
  require_unbounded(config);
  ExperimentConfig c = config;
  c.alpha = alpha;
  ExperimentResult res = start(c, "margin", {"t", "t_bar", "margin", "indicator", "prop31_indicator"});
  const Vertex origin = Vertex(config.d);
  run_replicas(c, res, [&](const EdgeField& f, int n, int replica, std::uint64_t) {
    const Vertex x = replica_target(c, n, replica);
    const double t = shortest_time(f, origin, x);
    const double t_bar = finite_or_inf(restricted_time(f, c.M, origin, x).time);
    const double dn = static_cast<double>(n);
    return std::vector<double>{t, t_bar, (t_bar - t) / dn, t + alpha * dn < t_bar ? 1.0 : 0.0,
                               c.M + t < t_bar ? 1.0 : 0.0};
  });
  proportion_rows(res, "indicator");
  res.metrics.push_back({"alpha", std::nullopt, alpha});
  for (const auto& [n, xs] : by_n(res, "margin")) {
    const double inf_share = static_cast<double>(std::count_if(xs.begin(), xs.end(), [](double v) {
                               return std::isinf(v);
                             })) / static_cast<double>(xs.size());
    res.metrics.push_back({"margin_infinite_share", n, inf_share});
    for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      res.metrics.push_back({fmt::format("margin_q{:g}", q), n, quantile(xs, q)});
    }
  }
  attach_fit(c, res, true);
  return res;
}

ExperimentResult run_heavy_edges(const ExperimentConfig& config) {
  require_useful(config);
  if (config.A) {
    if (!config.allow_any_spec && !(config.A->probability(config.spec) > 0)) {
      fail(ErrorCode::kConfigInvalid, fmt::format("A = {} has zero mass under {}", config.A->to_string(),
                                                  config.spec.describe()));
    }
  } else {
    require_unbounded(config);
  }
  const IntervalSet predicate = config.A ? *config.A : IntervalSet::above(config.M);
  ExperimentResult res =
      start(config, "heavy_edges", {"t", "edges", "heavy", "fraction", "edge_fraction", "unique"});
  const Vertex origin = Vertex(config.d);
  run_replicas(config, res, [&](const EdgeField& f, int n, int replica, std::uint64_t) {
    const GeodesicResult g = extract_geodesic(f, origin, replica_target(config, n, replica));
    const auto heavy = static_cast<double>(heavy_edge_count(f, g.path, predicate));
    const auto edges = static_cast<double>(g.path.edge_count());
    return std::vector<double>{g.time, edges, heavy, heavy / static_cast<double>(n),
                               edges > 0 ? heavy / edges : 0.0, g.unique ? 1.0 : 0.0};
  });
  mean_rows(res, "fraction");
  const auto fractions = by_n(res, "fraction");
  const auto unique = by_n(res, "unique");
  for (const EstimateRow& row : res.rows) {
    res.metrics.push_back({"ci95_low", row.n, row.estimate - 1.96 * row.std_error});
    res.metrics.push_back({"ci95_high", row.n, row.estimate + 1.96 * row.std_error});
    const auto& xs = fractions.at(row.n);
    for (double a : config.alpha_grid) {
      const auto hits = std::count_if(xs.begin(), xs.end(), [a](double v) { return v <= a; });
      res.metrics.push_back({"p_fraction_le_" + alpha_label(a), row.n,
                             static_cast<double>(hits) / static_cast<double>(xs.size())});
    }
    const auto& us = unique.at(row.n);
    res.metrics.push_back(
        {"nonunique_geodesics", row.n, static_cast<double>(std::count(us.begin(), us.end(), 0.0))});
  }
  return res;
}

ExperimentResult run_all_light(const ExperimentConfig& config) {
  require_useful(config);
  require_unbounded(config);
  ExperimentResult res = start(config, "all_light", {"t", "edges", "max_weight", "indicator", "unique"});
  const Vertex origin = Vertex(config.d);
  run_replicas(config, res, [&](const EdgeField& f, int n, int replica, std::uint64_t) {
    const GeodesicResult g = extract_geodesic(f, origin, replica_target(config, n, replica));
    double heaviest = 0.0;
    for (const EdgeId& e : g.path.edges()) heaviest = std::max(heaviest, f.weight(e));
    return std::vector<double>{g.time, static_cast<double>(g.path.edge_count()), heaviest,
                               heaviest <= config.M ? 1.0 : 0.0, g.unique ? 1.0 : 0.0};
  });
  proportion_rows(res, "indicator");
  if (has_atoms(config.spec)) res.flags.push_back("atomic_law_representative_geodesic");
  for (const auto& [n, us] : by_n(res, "unique")) {
    res.metrics.push_back({"nonunique_geodesics", n, static_cast<double>(std::count(us.begin(), us.end(), 0.0))});
  }
  attach_fit(config, res, false);
  return res;
}

ExperimentResult run_black_visits(const ExperimentConfig& config) {
  const BlackCubeParams params{config.M, config.r.value_or(config.spec.support_min()), config.delta};
  ExperimentResult res = start(config, "black_visits", {"count", "count_over_n", "edges"});
  const Vertex origin = Vertex(config.d);
  run_replicas(config, res, [&](const EdgeField& f, int n, int replica, std::uint64_t) {
    const GeodesicResult g = extract_geodesic(f, origin, replica_target(config, n, replica));
    const BlackCubeOracle oracle(f, config.N, params);
    const auto count = static_cast<double>(count_black_cubes_visited(g.path, oracle, OutOfBoxPolicy::kSkip));
    return std::vector<double>{count, count / static_cast<double>(n), static_cast<double>(g.path.edge_count())};
  });
  mean_rows(res, "count_over_n");
  return res;
}

ExperimentResult run_time_constant(const ExperimentConfig& config) {
  ExperimentResult res = start(config, "time_constant", {"t", "t_over_n"});
  const Vertex origin = Vertex(config.d);
  run_replicas(config, res, [&](const EdgeField& f, int n, int replica, std::uint64_t) {
    const double t = shortest_time(f, origin, replica_target(config, n, replica));
    return std::vector<double>{t, t / static_cast<double>(n)};
  });
  mean_rows(res, "t_over_n");
  for (const auto& [n, xs] : by_n(res, "t_over_n")) {
    res.metrics.push_back({"variance", n, summarize(xs).variance});
  }
  const EstimateRow& last = res.rows.back();
  res.metrics.push_back({"mu_hat", std::nullopt, last.estimate});
  res.metrics.push_back({"mu_ci95_low", std::nullopt, last.estimate - 1.96 * last.std_error});
  res.metrics.push_back({"mu_ci95_high", std::nullopt, last.estimate + 1.96 * last.std_error});
  return res;
}

ExperimentResult run_game_batch(const ExperimentConfig& config) {
  if (!(config.M > 0)) fail(ErrorCode::kConfigInvalid, "M must be > 0 for the game");
  if (!config.spec.has_bounded_support() && !config.restrict_to_light) {
    fail(ErrorCode::kConfigInvalid,
         fmt::format("{} is unbounded; the game needs bounded weights or restrict_to_light",
                     config.spec.describe()));
  }
  std::vector<std::string> columns{"candidates", "trials", "plans", "certified", "degenerate"};
  for (PolicyKind k : config.policies) {
    for (const char* what : {"survived", "approach_captures", "tail_captures"}) {
      columns.push_back(fmt::format("{}_{}", policy_name(k), what));
    }
  }
  ExperimentResult res = start(config, "game_batch", columns);
  PlanOptions options;
  options.restrict_to_light = config.restrict_to_light;
  const Vertex x_lambda = Vertex(config.d);
  run_replicas(config, res, [&](const EdgeField& f, int n, int, std::uint64_t field_seed) {
    std::vector<double> v(columns.size(), 0.0);
    const std::vector<Vertex> candidates = find_escape_positions(f, x_lambda, config.M, n, options);
    v[0] = static_cast<double>(candidates.size());
    v[1] = static_cast<double>(config.sigma_per_field);
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    CounterStream pick(hash_words(field_seed, {kSigmaStream}));
    const std::size_t draws = std::min(order.size(), static_cast<std::size_t>(config.sigma_per_field));
    for (std::size_t k = 0; k < draws; ++k) {
      std::swap(order[k], order[k + pick.below(order.size() - k)]);
      const auto plan = build_escape_plan(f, x_lambda, candidates[order[k]], config.M, n, options);
      if (!plan) continue;
      v[2] += 1;
      if (!verify_escape_certificate(f, *plan)) continue;
      v[3] += 1;
      if (plan->degenerate) v[4] += 1;
      for (std::size_t p = 0; p < config.policies.size(); ++p) {
        const PursuerPolicy policy{config.policies[p], hash_words(field_seed, {k, p})};
        const GameTrace trace = run_pursuit(f, *plan, policy, config.t_max);
        const std::size_t base = 5 + 3 * p;
        if (!trace.caught) {
          v[base] += 1;
        } else if (trace.capture_phase == CapturePhase::kTail) {
          v[base + 2] += 1;
        } else {
          v[base + 1] += 1;
        }
      }
    }
    return v;
  });
  std::map<int, std::vector<double>> totals;
  for (const ReplicaRecord& rec : res.details) {
    auto& t = totals[rec.n];
    t.resize(columns.size(), 0.0);
    for (std::size_t i = 0; i < columns.size(); ++i) t[i] += rec.values[i];
  }
  for (const auto& [n, t] : totals) {
    const auto trials = static_cast<std::int64_t>(t[1]);
    const double rate = trials > 0 ? t[3] / static_cast<double>(trials) : 0.0;
    res.rows.push_back({n, trials, rate, binomial_std_error(rate, trials)});
    res.metrics.push_back({"plans", n, t[2]});
    res.metrics.push_back({"certified", n, t[3]});
    res.metrics.push_back({"uncertified_plans", n, t[2] - t[3]});
    res.metrics.push_back({"degenerate", n, t[4]});
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
      const std::string name = policy_name(config.policies[p]);
      const std::size_t base = 5 + 3 * p;
      const double certified = t[3];
      res.metrics.push_back({name + "_survival_rate", n, certified > 0 ? t[base] / certified : 0.0});
      res.metrics.push_back({name + "_approach_captures", n, t[base + 1]});
      res.metrics.push_back({name + "_tail_captures", n, t[base + 2]});
    }
  }
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::string& e = config.experiment;
  if (e == "prop31") return run_prop31(config);
  if (e == "margin") return run_margin(config, config.alpha);
  if (e == "heavy_edges") return run_heavy_edges(config);
  if (e == "all_light") return run_all_light(config);
  if (e == "black_visits") return run_black_visits(config);
  if (e == "time_constant") return run_time_constant(config);
  return run_game_batch(config);
}

std::string summary_csv(const ExperimentResult& result) {
  std::string out = "experiment,n,replicas,estimate,stderr\n";
  for (const EstimateRow& row : result.rows) {
    out += fmt::format("{},{},{},{},{}\n", result.experiment, row.n, row.replicas, format_number(row.estimate),
                       format_number(row.std_error));
  }
  return out;
}

std::string details_csv(const ExperimentResult& result) {
  std::string out = "n,replica,field_seed";
  for (const std::string& c : result.detail_columns) out += "," + c;
  out += "\n";
  for (const ReplicaRecord& rec : result.details) {
    out += fmt::format("{},{},{}", rec.n, rec.replica, rec.field_seed);
    for (double v : rec.values) out += "," + format_number(v);
    out += "\n";
  }
  return out;
}

std::string metrics_csv(const ExperimentResult& result) {
  std::string out = "name,n,value\n";
  for (const AuxMetric& m : result.metrics) {
    out += fmt::format("{},{},{}\n", m.name, m.n ? std::to_string(*m.n) : "", format_number(m.value));
  }
  return out;
}

std::string metadata_json(const ExperimentResult& result) {
  nlohmann::ordered_json j;
  j["experiment"] = result.experiment;
  j["seed"] = result.seed;
  j["config_hash"] = result.config_hash;
  j["version"] = library_version();
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : result.config_echo.entries()) j["config"][k] = v;
  j["detail_columns"] = result.detail_columns;
  j["flags"] = result.flags;
  if (result.fit) {
    j["fit"]["rate"] = format_number(result.fit->rate);
    j["fit"]["intercept"] = format_number(result.fit->intercept);
    std::vector<std::string> used;
    std::vector<std::string> residuals;
    for (double x : result.fit->used_n) used.push_back(format_number(x));
    for (double x : result.fit->residuals) residuals.push_back(format_number(x));
    j["fit"]["n"] = used;
    j["fit"]["residuals"] = residuals;
  }
  return j.dump(2) + "\n";
}

OutputFiles write_results(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kRuntimeFailure, fmt::format("cannot create '{}': {}", dir, ec.message()));
  const fs::path base = fs::path(dir) / result.experiment;
  OutputFiles files{base.string() + ".csv", base.string() + "_details.csv", base.string() + "_metrics.csv",
                    base.string() + "_meta.json", base.string() + ".cfg"};
  auto put = [](const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) fail(ErrorCode::kRuntimeFailure, fmt::format("cannot write '{}'", path));
  };
  put(files.summary, summary_csv(result));
  put(files.details, details_csv(result));
  put(files.metrics, metrics_csv(result));
  put(files.metadata, metadata_json(result));
  put(files.config, result.config_echo.to_text());
  return files;
}

}  // namespace fpp

#include "fpplab/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>

#include "fpp/config.hpp"
#include "fpp/experiment.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/renormalization.hpp"
#include "fpp/shortcut.hpp"

namespace fpplab {

using fpp::ErrorCode;
using fpp::KeyValueConfig;
using Json = nlohmann::ordered_json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigInvalid:
    case ErrorCode::kInvalidSpec:
    case ErrorCode::kInvalidDelta:
    case ErrorCode::kUnknownDimension:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

namespace {

struct Invocation {
  std::string subcommand;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  int threads = 1;
  bool quiet = false;
};

class Session {
 public:
  Session(Invocation inv, std::ostream& out) : inv_(std::move(inv)), out_(out) {}

  const Invocation& invocation() const { return inv_; }
  KeyValueConfig& config() { return cfg_; }

  void load() {
    cfg_ = inv_.config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(inv_.config_path);
    if (inv_.seed) cfg_.set("seed", std::to_string(*inv_.seed));
    std::error_code ec;
    std::filesystem::create_directories(inv_.out_dir, ec);
    if (ec) fpp::fail(ErrorCode::kRuntimeFailure, fmt::format("cannot create '{}'", inv_.out_dir));
  }

  std::string path(const std::string& name) const {
    return (std::filesystem::path(inv_.out_dir) / name).string();
  }

  void write(const std::string& name, const std::string& text) {
    std::ofstream f(path(name), std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) fpp::fail(ErrorCode::kRuntimeFailure, fmt::format("cannot write '{}'", path(name)));
    outputs_.push_back(name);
  }

  void note(const std::string& line) {
    if (!inv_.quiet) out_ << line << "\n";
  }

  /// Deterministic echo plus the per-run record with the timestamp.
  void finish(const KeyValueConfig& echo) {
    write("config.echo.cfg", echo.to_text());
    Json j;
    j["subcommand"] = inv_.subcommand;
    j["version"] = fpp::library_version();
    j["seed"] = echo.find("seed").value_or("");
    j["seed_override"] = inv_.seed.has_value();
    j["threads"] = inv_.threads;
    j["timestamp"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)));
    j["config"] = Json::object();
    for (const auto& [k, v] : echo.entries()) j["config"][k] = v;
    j["outputs"] = outputs_;
    std::ofstream f(path("run.json"), std::ios::trunc);
    f << j.dump(2) << "\n";
  }

 private:
  Invocation inv_;
  std::ostream& out_;
  KeyValueConfig cfg_;
  std::vector<std::string> outputs_;
};

Json number(double x) {
  if (std::isfinite(x)) return fpp::format_number(x);
  return x > 0 ? "inf" : "-inf";
}

Json vertex_json(const fpp::Vertex& v) {
  Json a = Json::array();
  for (int c : v.coords()) a.push_back(c);
  return a;
}

std::string path_csv(const fpp::PathRecord& p) {
  std::ostringstream s;
  p.write_csv(s);
  return s.str();
}

fpp::Vertex vertex_key(const KeyValueConfig& cfg, const std::string& key, int d) {
  const auto xs = cfg.get_int_list(key);
  if (static_cast<int>(xs.size()) != d) {
    fpp::fail(ErrorCode::kConfigInvalid, fmt::format("'{}' needs {} coordinates", key, d));
  }
  fpp::Vertex v(d);
  for (int i = 0; i < d; ++i) v[i] = static_cast<int>(xs[static_cast<std::size_t>(i)]);
  return v;
}

void cmd_sample(Session& s) {
  const KeyValueConfig& cfg = s.config();
  const fpp::EdgeField field = field_from_config(cfg, s.invocation().threads);
  const std::string format = cfg.find("format").value_or("csv");
  if (format == "csv") {
    std::ostringstream o;
    field.write_csv(o);
    s.write("field.csv", o.str());
  } else if (format == "binary") {
    std::ostringstream o(std::ios::binary);
    field.write_binary(o);
    s.write("field.bin", o.str());
  } else {
    fpp::fail(ErrorCode::kConfigInvalid, fmt::format("format must be csv or binary, got '{}'", format));
  }
  s.note(fmt::format("sampled {} edges in {}", field.box().edge_count(), field.box().to_string()));
}

void cmd_geodesic(Session& s) {
  const KeyValueConfig& cfg = s.config();
  const fpp::EdgeField field = field_from_config(cfg, s.invocation().threads);
  const int d = field.box().dim();
  const fpp::GeodesicResult g = fpp::extract_geodesic(field, vertex_key(cfg, "u", d), vertex_key(cfg, "v", d));
  s.write("geodesic.csv", path_csv(g.path));
  Json j;
  j["time"] = number(g.time);
  j["edges"] = g.path.edge_count();
  j["unique"] = g.unique;
  s.write("geodesic.json", j.dump(2) + "\n");
  s.note(fmt::format("t = {}", fpp::format_number(g.time)));
}

void cmd_restricted(Session& s) {
  const KeyValueConfig& cfg = s.config();
  const fpp::EdgeField field = field_from_config(cfg, s.invocation().threads);
  const int d = field.box().dim();
  const double M = cfg.get_double("M");
  const fpp::RestrictedResult r =
      fpp::restricted_time(field, M, vertex_key(cfg, "u", d), vertex_key(cfg, "v", d));
  Json j;
  j["M"] = number(M);
  j["finite"] = r.time.is_finite();
  j["time"] = r.time.is_finite() ? number(r.time.value()) : Json("inf");
  if (r.geodesic) {
    j["edges"] = r.geodesic->path.edge_count();
    j["unique"] = r.geodesic->unique;
    s.write("restricted.csv", path_csv(r.geodesic->path));
  }
  s.write("restricted.json", j.dump(2) + "\n");
  s.note(fmt::format("t_bar = {}", r.time.to_string()));
}

fpp::BlackCubeParams black_params(const KeyValueConfig& cfg, const fpp::EdgeField& field) {
  fpp::BlackCubeParams p;
  p.M = cfg.get_double("M", p.M);
  p.delta = cfg.get_double("delta", p.delta);
  p.r = cfg.has("r") ? cfg.get_double("r") : field.provenance() ? field.provenance()->spec.support_min() : 0.0;
  return p;
}

void cmd_blackcube(Session& s) {
  const KeyValueConfig& cfg = s.config();
  const fpp::EdgeField field = field_from_config(cfg, s.invocation().threads);
  const int d = field.box().dim();
  const int N = static_cast<int>(cfg.get_int("N"));
  const fpp::BlackCubeParams params = black_params(cfg, field);
  const fpp::BlackCubeOracle oracle(field, N, params);
  if (cfg.has("cube")) {
    const fpp::Vertex l = vertex_key(cfg, "cube", d);
    Json j;
    j["cube"] = vertex_json(l);
    j["N"] = N;
    j["black"] = oracle.is_black(l);
    j["T"] = fpp::region_vertices(fpp::BoxRegion::t({l, N})).to_string();
    s.write("blackcube.json", j.dump(2) + "\n");
    s.note(fmt::format("cube {} black = {}", l.to_string(), j["black"].get<bool>()));
    return;
  }
  std::string csv;
  for (int i = 0; i < d; ++i) csv += fmt::format("l{},", i + 1);
  csv += "black\n";
  std::size_t blacks = 0;
  std::size_t total = 0;
  fpp::Vertex lo(d);
  fpp::Vertex hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = fpp::cube_of(field.box().lo(), N).l[a];
    hi[a] = fpp::cube_of(field.box().hi(), N).l[a];
  }
  const fpp::LatticeBox cubes(lo, hi);
  for (std::size_t i = 0; i < cubes.vertex_count(); ++i) {
    const fpp::Vertex l = cubes.vertex(i);
    if (!oracle.evaluable(l)) continue;
    const bool black = oracle.is_black(l);
    for (int c : l.coords()) csv += fmt::format("{},", c);
    csv += black ? "1\n" : "0\n";
    blacks += black;
    ++total;
  }
  s.write("blackcubes.csv", csv);
  s.note(fmt::format("{} of {} evaluable cubes are black", blacks, total));
}

void cmd_shortcut(Session& s) {
  const KeyValueConfig& cfg = s.config();
  const fpp::EdgeField field = field_from_config(cfg, s.invocation().threads);
  const int d = field.box().dim();
  fpp::BlackCubeParams params = black_params(cfg, field);
  const int K = cfg.has("K") ? static_cast<int>(cfg.get_int("K"))
                             : static_cast<int>(fpp::min_K(params.M, params.r, params.delta, d));
  const int N = 4 * K;
  const fpp::Vertex u = vertex_key(cfg, "u", d);
  const fpp::Vertex v = vertex_key(cfg, "v", d);
  const std::string which = cfg.find("path").value_or("geodesic");
  fpp::PathRecord path;
  if (which == "geodesic") {
    path = fpp::extract_geodesic(field, u, v).path;
  } else if (which == "restricted") {
    const auto r = fpp::restricted_time(field, params.M, u, v);
    if (!r.geodesic) fpp::fail(ErrorCode::kRuntimeFailure, "no path of edges <= M joins u and v");
    path = r.geodesic->path;
  } else {
    fpp::fail(ErrorCode::kConfigInvalid, fmt::format("path must be geodesic or restricted, got '{}'", which));
  }
  const fpp::BlackCubeOracle oracle(field, N, params);
  const auto stretches = fpp::shortcutable_stretches(path, oracle, fpp::OutOfBoxPolicy::kSkip);
  std::string csv = "start,end,region,status,case,z,w,detour_edges,substituted_edges,successful,event_F\n";
  std::size_t built = 0;
  for (const fpp::StretchRecord& st : stretches) {
    csv += fmt::format("{},{},\"{}\",", st.start, st.end, st.region.to_string());
    try {
      const fpp::ShortcutProposal p = fpp::build_shortcut(field, path, st, K);
      ++built;
      csv += fmt::format("built,{},\"{}\",\"{}\",{},{},{},{}\n", fpp::case_letter(p.case_tag), p.z.to_string(),
                         p.w.to_string(), p.detour.edge_count(), p.substituted.edge_count(),
                         fpp::shortcut_is_successful(field, p, params.M) ? 1 : 0,
                         fpp::event_F_holds(field, p, params.M, params.r, params.delta, d) ? 1 : 0);
    } catch (const fpp::Error& e) {
      if (e.code() != ErrorCode::kConstructionBlocked) throw;
      csv += "blocked,,,,,,,\n";
    }
  }
  s.write("shortcuts.csv", csv);
  s.write("path.csv", path_csv(path));
  s.note(fmt::format("K = {}, N = {}: {} shortcutable stretches, {} built", K, N, stretches.size(), built));
}

void cmd_game(Session& s) {
  const KeyValueConfig& cfg = s.config();
  const fpp::EdgeField field = field_from_config(cfg, s.invocation().threads);
  const int d = field.box().dim();
  const double M = cfg.get_double("M");
  const int horizon = static_cast<int>(cfg.get_int("horizon"));
  fpp::PlanOptions options;
  options.restrict_to_light = cfg.get_bool("restrict_to_light", false);
  const fpp::Vertex x_lambda = vertex_key(cfg, "x_lambda", d);
  std::vector<fpp::Vertex> sigmas;
  if (cfg.has("x_sigma")) {
    sigmas.push_back(vertex_key(cfg, "x_sigma", d));
  } else {
    sigmas = fpp::find_escape_positions(field, x_lambda, M, horizon, options);
    if (!sigmas.empty()) sigmas.resize(1);
  }
  Json j;
  j["x_lambda"] = vertex_json(x_lambda);
  j["M"] = number(M);
  j["horizon"] = horizon;
  const auto plan = sigmas.empty() ? std::nullopt
                                   : fpp::build_escape_plan(field, x_lambda, sigmas.front(), M, horizon, options);
  j["plan_found"] = plan.has_value();
  if (!plan) {
    s.write("game.json", j.dump(2) + "\n");
    s.note("no escape plan");
    return;
  }
  const fpp::CertificateCheck check = fpp::check_escape_certificate(field, *plan);
  j["plan"] = plan_to_json(*plan);
  j["certificate"]["ok"] = check.ok;
  j["certificate"]["min_slack"] = number(check.min_slack);
  j["certificate"]["degenerate"] = check.degenerate;
  const double t_max = cfg.get_double("t_max", 1e9);
  const std::uint64_t seed = cfg.has("seed") ? cfg.get_u64("seed") : 0;
  const std::vector<std::string> names =
      cfg.has("policies") ? cfg.get_string_list("policies")
                          : std::vector<std::string>{"greedy", "intercept", "random_walk", "stationary"};
  j["games"] = Json::array();
  for (const std::string& name : names) {
    const fpp::PolicyKind kind = fpp::parse_policy(name);
    const fpp::GameTrace trace = fpp::run_pursuit(field, *plan, {kind, seed}, t_max);
    Json g = trace_to_json(trace);
    g["policy"] = fpp::policy_name(kind);
    j["games"].push_back(std::move(g));
    s.note(fmt::format("{}: {}", fpp::policy_name(kind), trace.caught ? "caught" : "escaped"));
  }
  s.write("game.json", j.dump(2) + "\n");
}

void cmd_experiment(Session& s) {
  KeyValueConfig& cfg = s.config();
  fpp::ExperimentConfig ec = fpp::ExperimentConfig::from_config(cfg);
  ec.threads = s.invocation().threads;
  const fpp::ExperimentResult r = fpp::run_experiment(ec);
  const fpp::OutputFiles files = fpp::write_results(r, s.invocation().out_dir);
  for (const std::string& p : {files.summary, files.details, files.metrics, files.metadata, files.config}) {
    s.note(p);
  }
  s.finish(r.config_echo);
}

void dispatch(Session& s) {
  const std::string& sub = s.invocation().subcommand;
  s.load();
  if (sub == "experiment") return cmd_experiment(s);
  if (sub == "sample") cmd_sample(s);
  if (sub == "geodesic") cmd_geodesic(s);
  if (sub == "restricted") cmd_restricted(s);
  if (sub == "blackcube") cmd_blackcube(s);
  if (sub == "shortcut") cmd_shortcut(s);
  if (sub == "game") cmd_game(s);
  s.finish(s.config());
}

void report_error(std::ostream& err, const std::string& out_dir, const std::string& kind, const std::string& msg,
                  int code) {
  Json j;
  j["error"] = kind;
  j["message"] = msg;
  j["exit_code"] = code;
  err << j.dump() << "\n";
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) return;
  std::ofstream f((std::filesystem::path(out_dir) / "error.json").string(), std::ios::trunc);
  f << j.dump(2) << "\n";
}

}  // namespace

fpp::EdgeField field_from_config(const KeyValueConfig& cfg, int threads) {
  fpp::LatticeBox box;
  if (cfg.has("box.lo") || cfg.has("box.hi")) {
    const auto lo = cfg.get_int_list("box.lo");
    const auto hi = cfg.get_int_list("box.hi");
    if (lo.size() != hi.size() || lo.empty()) fpp::fail(ErrorCode::kConfigInvalid, "box.lo and box.hi differ in size");
    fpp::Vertex a(static_cast<int>(lo.size()));
    fpp::Vertex b(static_cast<int>(lo.size()));
    for (std::size_t i = 0; i < lo.size(); ++i) {
      a[static_cast<int>(i)] = static_cast<int>(lo[i]);
      b[static_cast<int>(i)] = static_cast<int>(hi[i]);
    }
    box = fpp::LatticeBox(a, b);
  } else {
    const int d = static_cast<int>(cfg.get_int("d", 2));
    const int L = static_cast<int>(cfg.get_int("L"));
    if (L < 2) fpp::fail(ErrorCode::kConfigInvalid, "L must be >= 2");
    box = fpp::LatticeBox::cube(d, -(L / 2), L - 1);
  }
  const fpp::DistributionSpec spec = fpp::DistributionSpec::from_config(cfg.subtree("dist."));
  return fpp::EdgeField::sample(box, spec, cfg.has("seed") ? cfg.get_u64("seed") : 1, threads);
}

Json plan_to_json(const fpp::EscapePlan& plan) {
  Json j;
  j["x_sigma"] = vertex_json(plan.x_sigma);
  j["x_lambda"] = vertex_json(plan.x_lambda);
  j["M"] = number(plan.M);
  j["anchor"] = vertex_json(plan.anchor);
  j["anchor_index"] = plan.anchor_index;
  j["sigma_to_anchor"] = number(plan.sigma_to_anchor);
  j["lambda_to_anchor"] = number(plan.lambda_to_anchor);
  j["degenerate"] = plan.degenerate;
  j["route"] = Json::array();
  for (std::size_t i = 0; i < plan.route.size(); ++i) {
    Json step;
    step["vertex"] = vertex_json(plan.route[i]);
    step["arrival"] = number(plan.arrival[i]);
    step["departure"] = number(plan.departure[i]);
    j["route"].push_back(std::move(step));
  }
  return j;
}

Json trace_to_json(const fpp::GameTrace& trace) {
  static const char* kPhase[] = {"none", "approach", "tail"};
  static const char* kKind[] = {"knock", "cross", "capture"};
  Json j;
  j["caught"] = trace.caught;
  j["horizon"] = number(trace.horizon);
  if (trace.caught) {
    j["capture_time"] = number(trace.capture_time);
    j["capture_vertex"] = vertex_json(trace.capture_vertex);
  }
  j["capture_phase"] = kPhase[static_cast<int>(trace.capture_phase)];
  j["events"] = Json::array();
  for (const fpp::GameEvent& e : trace.events) {
    Json ev;
    ev["time"] = number(e.time);
    ev["player"] = e.player == fpp::Player::kSigma ? "sigma" : "lambda";
    ev["kind"] = kKind[static_cast<int>(e.kind)];
    ev["from"] = vertex_json(e.from);
    ev["to"] = vertex_json(e.to);
    j["events"].push_back(std::move(ev));
  }
  return j;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"First-passage percolation lab", "fpplab"};
  app.require_subcommand(1);
  Invocation inv;
  const std::map<std::string, std::string> subcommands{
      {"sample", "Sample an edge field"},
      {"geodesic", "Passage time and geodesic between two vertices"},
      {"restricted", "Passage time over edges <= M"},
      {"blackcube", "Classify one cube or every evaluable cube"},
      {"shortcut", "Build shortcuts along a path"},
      {"game", "Escape plan, certificate and pursuit games"},
      {"experiment", "Monte Carlo campaign"},
  };
  for (const auto& [name, help] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", inv.config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", inv.seed, "overrides the config seed");
    sub->add_option("--out", inv.out_dir, "output directory");
    sub->add_option("--threads", inv.threads, "worker threads (results do not depend on it)")
        ->check(CLI::Range(0, 1024));
    sub->add_flag("--quiet", inv.quiet, "no progress output");
    sub->callback([&inv, name = name] { inv.subcommand = name; });
  }
  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    Json j;
    j["error"] = "ConfigInvalid";
    j["message"] = e.what();
    j["exit_code"] = kExitConfig;
    err << j.dump() << "\n";
    return kExitConfig;
  }
  Session session(inv, out);
  try {
    dispatch(session);
  } catch (const fpp::Error& e) {
    const int code = exit_code_for(e.code());
    report_error(err, inv.out_dir, std::string(fpp::error_name(e.code())), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report_error(err, inv.out_dir, "RuntimeFailure", e.what(), kExitRuntime);
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace fpplab

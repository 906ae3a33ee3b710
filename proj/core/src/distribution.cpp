#include "fpp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fpp/errors.hpp"

namespace fpp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTolerance = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::kInvalidSpec, what);
}

std::vector<Atom> parse_atoms(const std::string& text) {
  std::vector<Atom> atoms;
  std::size_t start = 0;
  while (start < text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string piece = text.substr(start, comma - start);
    const auto colon = piece.find(':');
    if (colon == std::string::npos) {
      fail(ErrorCode::kConfigInvalid, fmt::format("atom '{}' must read value:prob", piece));
    }
    atoms.push_back({parse_number(piece.substr(0, colon), "atoms"),
                     parse_number(piece.substr(colon + 1), "atoms")});
    start = comma + 1;
  }
  return atoms;
}

}  // namespace

DistributionSpec::DistributionSpec(Family f) : family_(std::move(f)) { validate(); }

DistributionSpec DistributionSpec::exponential(double rate) {
  return DistributionSpec(Exponential{rate});
}

DistributionSpec DistributionSpec::uniform(double a, double b) {
  return DistributionSpec(Uniform{a, b});
}

DistributionSpec DistributionSpec::pareto(double shape, double scale) {
  return DistributionSpec(Pareto{shape, scale});
}

DistributionSpec DistributionSpec::shifted(double offset, DistributionSpec inner) {
  return DistributionSpec(
      Shifted{offset, std::make_shared<const DistributionSpec>(std::move(inner))});
}

DistributionSpec DistributionSpec::point_mass(double value) {
  return atoms({{value, 1.0}});
}

DistributionSpec DistributionSpec::atoms(std::vector<Atom> atoms) {
  return DistributionSpec(AtomMixture{std::move(atoms), 0.0, nullptr});
}

DistributionSpec DistributionSpec::mixture(std::vector<Atom> atoms, double continuous_weight,
                                           DistributionSpec continuous) {
  return DistributionSpec(
      AtomMixture{std::move(atoms), continuous_weight,
                  std::make_shared<const DistributionSpec>(std::move(continuous))});
}

void DistributionSpec::validate() const {
  std::visit(
      overloaded{
          [](const Exponential& e) {
            require(std::isfinite(e.rate) && e.rate > 0, "exponential rate must be finite and > 0");
          },
          [](const Uniform& u) {
            require(std::isfinite(u.a) && std::isfinite(u.b) && u.a >= 0 && u.a < u.b,
                    "uniform needs 0 <= a < b, both finite");
          },
          [](const Pareto& p) {
            require(std::isfinite(p.shape) && p.shape > 0 && std::isfinite(p.scale) && p.scale > 0,
                    "pareto shape and scale must be finite and > 0");
          },
          [](const Shifted& s) {
            require(s.inner != nullptr, "shifted needs an inner spec");
            require(std::isfinite(s.offset), "shift offset must be finite");
            require(s.offset + s.inner->support_min() >= 0, "shifted support must stay in [0, inf)");
          },
          [](const AtomMixture& m) {
            double total = m.continuous_weight;
            require(std::isfinite(m.continuous_weight) && m.continuous_weight >= 0 &&
                        m.continuous_weight <= 1,
                    "continuous weight must lie in [0, 1]");
            require((m.continuous_weight > 0) == (m.continuous != nullptr),
                    "continuous part present iff its weight is positive");
            for (const Atom& a : m.atoms) {
              require(std::isfinite(a.value) && a.value >= 0, "atom values must be finite and >= 0");
              require(std::isfinite(a.prob) && a.prob >= 0, "atom probabilities must be >= 0");
              total += a.prob;
            }
            require(std::abs(total - 1.0) <= kMassTolerance, "masses must sum to 1");
          },
      },
      family_);
}

std::string DistributionSpec::family_name() const {
  return std::visit(overloaded{
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const Uniform&) { return std::string("uniform"); },
                        [](const Pareto&) { return std::string("pareto"); },
                        [](const Shifted&) { return std::string("shifted"); },
                        [](const AtomMixture&) { return std::string("atoms"); },
                    },
                    family_);
}

double DistributionSpec::cdf(double x) const {
  return std::visit(
      overloaded{
          [x](const Exponential& e) { return x <= 0 ? 0.0 : -std::expm1(-e.rate * x); },
          [x](const Uniform& u) {
            if (x <= u.a) return 0.0;
            if (x >= u.b) return 1.0;
            return (x - u.a) / (u.b - u.a);
          },
          [x](const Pareto& p) { return x <= p.scale ? 0.0 : 1.0 - std::pow(p.scale / x, p.shape); },
          [x](const Shifted& s) { return s.inner->cdf(x - s.offset); },
          [x](const AtomMixture& m) {
            double f = 0.0;
            for (const Atom& a : m.atoms) {
              if (a.value <= x) f += a.prob;
            }
            if (m.continuous) f += m.continuous_weight * m.continuous->cdf(x);
            return std::min(f, 1.0);
          },
      },
      family_);
}

double DistributionSpec::cdf_below(double x) const {
  return std::visit(overloaded{
                        [this, x](const Exponential&) { return cdf(x); },
                        [this, x](const Uniform&) { return cdf(x); },
                        [this, x](const Pareto&) { return cdf(x); },
                        [x](const Shifted& s) { return s.inner->cdf_below(x - s.offset); },
                        [x](const AtomMixture& m) {
                          double f = 0.0;
                          for (const Atom& a : m.atoms) {
                            if (a.value < x) f += a.prob;
                          }
                          if (m.continuous) f += m.continuous_weight * m.continuous->cdf_below(x);
                          return std::min(f, 1.0);
                        },
                    },
                    family_);
}

double DistributionSpec::support_min() const {
  return std::visit(overloaded{
                        [](const Exponential&) { return 0.0; },
                        [](const Uniform& u) { return u.a; },
                        [](const Pareto& p) { return p.scale; },
                        [](const Shifted& s) { return s.offset + s.inner->support_min(); },
                        [](const AtomMixture& m) {
                          double r = kInf;
                          for (const Atom& a : m.atoms) {
                            if (a.prob > 0) r = std::min(r, a.value);
                          }
                          if (m.continuous) r = std::min(r, m.continuous->support_min());
                          return r;
                        },
                    },
                    family_);
}

double DistributionSpec::support_max() const {
  return std::visit(overloaded{
                        [](const Exponential&) { return kInf; },
                        [](const Uniform& u) { return u.b; },
                        [](const Pareto&) { return kInf; },
                        [](const Shifted& s) { return s.offset + s.inner->support_max(); },
                        [](const AtomMixture& m) {
                          double r = -kInf;
                          for (const Atom& a : m.atoms) {
                            if (a.prob > 0) r = std::max(r, a.value);
                          }
                          if (m.continuous) r = std::max(r, m.continuous->support_max());
                          return r;
                        },
                    },
                    family_);
}

bool DistributionSpec::has_bounded_support() const { return std::isfinite(support_max()); }

double DistributionSpec::sample(double pick, double u) const {
  return std::visit(
      overloaded{
          [u](const Exponential& e) { return -std::log1p(-u) / e.rate; },
          [u](const Uniform& d) { return d.a + (d.b - d.a) * u; },
          [u](const Pareto& p) { return p.scale * std::pow(1.0 - u, -1.0 / p.shape); },
          [pick, u](const Shifted& s) { return s.offset + s.inner->sample(pick, u); },
          [pick, u](const AtomMixture& m) {
            double acc = 0.0;
            for (const Atom& a : m.atoms) {
              acc += a.prob;
              if (pick < acc) return a.value;
            }
            if (!m.continuous) {
              // Rounding left pick just above the total atom mass.
              for (auto it = m.atoms.rbegin(); it != m.atoms.rend(); ++it) {
                if (it->prob > 0) return it->value;
              }
            }
            const double rescaled = std::clamp((pick - acc) / m.continuous_weight, 0.0,
                                               std::nextafter(1.0, 0.0));
            return m.continuous->sample(rescaled, u);
          },
      },
      family_);
}

KeyValueConfig DistributionSpec::to_config() const {
  KeyValueConfig cfg;
  cfg.set("family", family_name());
  std::visit(overloaded{
                 [&](const Exponential& e) { cfg.set_number("rate", e.rate); },
                 [&](const Uniform& u) {
                   cfg.set_number("a", u.a);
                   cfg.set_number("b", u.b);
                 },
                 [&](const Pareto& p) {
                   cfg.set_number("shape", p.shape);
                   cfg.set_number("scale", p.scale);
                 },
                 [&](const Shifted& s) {
                   cfg.set_number("offset", s.offset);
                   cfg.merge(s.inner->to_config(), "inner.");
                 },
                 [&](const AtomMixture& m) {
                   std::string atoms;
                   for (const Atom& a : m.atoms) {
                     if (!atoms.empty()) atoms += ",";
                     atoms += format_number(a.value) + ":" + format_number(a.prob);
                   }
                   cfg.set("atoms", atoms);
                   if (m.continuous) {
                     cfg.set_number("continuous_weight", m.continuous_weight);
                     cfg.merge(m.continuous->to_config(), "continuous.");
                   }
                 },
             },
             family_);
  return cfg;
}

DistributionSpec DistributionSpec::from_config(const KeyValueConfig& cfg) {
  const std::string& family = cfg.get("family");
  if (family == "exponential") return exponential(cfg.get_double("rate"));
  if (family == "uniform") return uniform(cfg.get_double("a"), cfg.get_double("b"));
  if (family == "pareto") return pareto(cfg.get_double("shape"), cfg.get_double("scale"));
  if (family == "point") return point_mass(cfg.get_double("value"));
  if (family == "shifted") {
    return shifted(cfg.get_double("offset"), from_config(cfg.subtree("inner.")));
  }
  if (family == "atoms") {
    std::vector<Atom> atoms = cfg.has("atoms") ? parse_atoms(cfg.get("atoms")) : std::vector<Atom>{};
    const double w = cfg.get_double("continuous_weight", 0.0);
    if (w > 0) return mixture(std::move(atoms), w, from_config(cfg.subtree("continuous.")));
    return DistributionSpec::atoms(std::move(atoms));
  }
  fail(ErrorCode::kConfigInvalid, fmt::format("unknown distribution family '{}'", family));
}

std::string DistributionSpec::describe() const {
  return std::visit(
      overloaded{
          [](const Exponential& e) { return fmt::format("exponential({})", e.rate); },
          [](const Uniform& u) { return fmt::format("uniform({},{})", u.a, u.b); },
          [](const Pareto& p) { return fmt::format("pareto({},{})", p.shape, p.scale); },
          [](const Shifted& s) { return fmt::format("{}+{}", s.offset, s.inner->describe()); },
          [](const AtomMixture& m) {
            std::string s = "atoms{";
            for (std::size_t i = 0; i < m.atoms.size(); ++i) {
              s += fmt::format("{}{}:{}", i ? "," : "", m.atoms[i].value, m.atoms[i].prob);
            }
            if (m.continuous) s += fmt::format(";{}*{}", m.continuous_weight, m.continuous->describe());
            return s + "}";
          },
      },
      family_);
}

}  // namespace fpp

#include "fpp/path.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "fpp/config.hpp"
#include "fpp/errors.hpp"

namespace fpp {

PathRecord::PathRecord(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
  std::unordered_set<Vertex> seen;
  seen.reserve(vertices_.size() * 2);
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (i > 0 && l1_distance(vertices_[i - 1], vertices_[i]) != 1) {
      fail(ErrorCode::kNotAdjacent, fmt::format("path step {} -> {} is not a lattice edge",
                                                vertices_[i - 1].to_string(), vertices_[i].to_string()));
    }
    if (!seen.insert(vertices_[i]).second) {
      fail(ErrorCode::kNotSelfAvoiding,
           fmt::format("path revisits {} at position {}", vertices_[i].to_string(), i));
    }
  }
}

std::vector<EdgeId> PathRecord::edges() const {
  std::vector<EdgeId> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) out.push_back(edge(i));
  return out;
}

PathRecord PathRecord::slice(std::size_t first, std::size_t last) const {
  PathRecord out;
  out.vertices_.assign(vertices_.begin() + static_cast<std::ptrdiff_t>(first),
                       vertices_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  return out;
}

PathRecord PathRecord::reversed() const {
  PathRecord out = *this;
  std::reverse(out.vertices_.begin(), out.vertices_.end());
  return out;
}

std::optional<std::size_t> PathRecord::position_of(const Vertex& v) const {
  const auto it = std::find(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vertices_.begin());
}

void PathRecord::write_csv(std::ostream& out) const {
  const int d = vertices_.empty() ? 0 : vertices_.front().dim();
  for (int i = 0; i < d; ++i) out << (i ? "," : "") << "x" << (i + 1);
  out << "\n";
  for (const Vertex& v : vertices_) out << fmt::format("{}\n", fmt::join(v.coords(), ","));
}

double path_time(const EdgeField& field, const PathRecord& path) {
  double t = 0.0;
  for (std::size_t i = 0; i < path.edge_count(); ++i) t += field.weight(path.edge(i));
  return t;
}

IntervalSet::IntervalSet(std::vector<Interval> parts) : parts_(std::move(parts)) {
  for (const Interval& in : parts_) {
    if (in.lo > in.hi || (in.lo == in.hi && !(in.lo_closed && in.hi_closed))) {
      fail(ErrorCode::kConfigInvalid, "interval is empty or inverted");
    }
  }
  std::sort(parts_.begin(), parts_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < parts_.size(); ++i) {
    const Interval& a = parts_[i - 1];
    const Interval& b = parts_[i];
    if (a.hi > b.lo || (a.hi == b.lo && a.hi_closed && b.lo_closed)) {
      fail(ErrorCode::kConfigInvalid, "intervals of a set must be disjoint");
    }
  }
}

IntervalSet IntervalSet::above(double m) {
  return IntervalSet({{m, std::numeric_limits<double>::infinity(), false, false}});
}

IntervalSet IntervalSet::at_most(double m) {
  return IntervalSet({{-std::numeric_limits<double>::infinity(), m, false, true}});
}

IntervalSet IntervalSet::everything() {
  return IntervalSet({{0.0, std::numeric_limits<double>::infinity(), true, false}});
}

IntervalSet IntervalSet::parse(const std::string& text) {
  std::vector<Interval> parts;
  std::size_t start = 0;
  while (start < text.size()) {
    auto semi = text.find(';', start);
    if (semi == std::string::npos) semi = text.size();
    std::string piece = text.substr(start, semi - start);
    piece.erase(std::remove_if(piece.begin(), piece.end(), ::isspace), piece.end());
    start = semi + 1;
    if (piece.empty()) continue;
    const auto comma = piece.find(',');
    if (piece.size() < 5 || comma == std::string::npos ||
        (piece.front() != '[' && piece.front() != '(') ||
        (piece.back() != ']' && piece.back() != ')')) {
      fail(ErrorCode::kConfigInvalid, fmt::format("bad interval '{}'", piece));
    }
    Interval in;
    in.lo_closed = piece.front() == '[';
    in.hi_closed = piece.back() == ']';
    in.lo = parse_number(piece.substr(1, comma - 1), "interval");
    in.hi = parse_number(piece.substr(comma + 1, piece.size() - comma - 2), "interval");
    parts.push_back(in);
  }
  if (parts.empty()) fail(ErrorCode::kConfigInvalid, "empty interval set");
  return IntervalSet(std::move(parts));
}

bool IntervalSet::contains(double x) const noexcept {
  return std::any_of(parts_.begin(), parts_.end(), [x](const Interval& in) { return in.contains(x); });
}

double IntervalSet::probability(const DistributionSpec& spec) const {
  double p = 0.0;
  for (const Interval& in : parts_) {
    const double upper = in.hi_closed ? spec.cdf(in.hi) : spec.cdf_below(in.hi);
    const double lower = in.lo_closed ? spec.cdf_below(in.lo) : spec.cdf(in.lo);
    p += std::max(0.0, upper - lower);
  }
  return std::min(p, 1.0);
}

std::string IntervalSet::to_string() const {
  std::string s;
  for (const Interval& in : parts_) {
    if (!s.empty()) s += ";";
    s += fmt::format("{}{},{}{}", in.lo_closed ? '[' : '(', format_number(in.lo),
                     format_number(in.hi), in.hi_closed ? ']' : ')');
  }
  return s;
}

std::size_t heavy_edge_count(const EdgeField& field, const PathRecord& path,
                             const IntervalSet& predicate) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < path.edge_count(); ++i) {
    if (predicate.contains(field.weight(path.edge(i)))) ++n;
  }
  return n;
}

}  // namespace fpp

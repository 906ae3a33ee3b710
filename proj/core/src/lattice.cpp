#include "fpp/lattice.hpp"

#include <algorithm>
#include <cstdlib>

#include <fmt/format.h>

#include "fpp/errors.hpp"
#include "fpp/rng.hpp"

namespace fpp {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kNotAdjacent: return "NotAdjacent";
    case ErrorCode::kOutOfBox: return "OutOfBox";
    case ErrorCode::kEdgeOutOfBox: return "EdgeOutOfBox";
    case ErrorCode::kUnknownDimension: return "UnknownDimension";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kRegionOutOfBox: return "RegionOutOfBox";
    case ErrorCode::kInvalidDelta: return "InvalidDelta";
    case ErrorCode::kConstructionBlocked: return "ConstructionBlocked";
    case ErrorCode::kNotSelfAvoiding: return "NotSelfAvoiding";
    case ErrorCode::kInvariantViolated: return "InvariantViolated";
    case ErrorCode::kUnboundedWeights: return "UnboundedWeights";
    case ErrorCode::kSamePosition: return "SamePosition";
    case ErrorCode::kMalformedPlan: return "MalformedPlan";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kRuntimeFailure: return "RuntimeFailure";
  }
  return "Unknown";
}

Vertex::Vertex(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) {
    fail(ErrorCode::kInvalidSpec, fmt::format("dimension {} outside [1, {}]", dim, kMaxDim));
  }
}

Vertex::Vertex(std::initializer_list<int> coords)
    : Vertex(std::span<const int>(coords.begin(), coords.size())) {}

Vertex::Vertex(std::span<const int> coords) : Vertex(static_cast<int>(coords.size())) {
  std::copy(coords.begin(), coords.end(), c_.begin());
}

Vertex& Vertex::operator+=(const Vertex& other) noexcept {
  for (int i = 0; i < dim_; ++i) c_[static_cast<std::size_t>(i)] += other[i];
  return *this;
}

Vertex& Vertex::operator-=(const Vertex& other) noexcept {
  for (int i = 0; i < dim_; ++i) c_[static_cast<std::size_t>(i)] -= other[i];
  return *this;
}

bool operator==(const Vertex& a, const Vertex& b) noexcept {
  if (a.dim_ != b.dim_) return false;
  for (int i = 0; i < a.dim_; ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

std::strong_ordering operator<=>(const Vertex& a, const Vertex& b) noexcept {
  if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
  for (int i = 0; i < a.dim_; ++i) {
    if (auto c = a[i] <=> b[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string Vertex::to_string() const {
  return fmt::format("({})", fmt::join(coords(), ","));
}

int l1_norm(const Vertex& x) noexcept {
  int s = 0;
  for (int c : x.coords()) s += std::abs(c);
  return s;
}

int l1_distance(const Vertex& a, const Vertex& b) noexcept { return l1_norm(a - b); }

int linf_distance(const Vertex& a, const Vertex& b) noexcept {
  int m = 0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Vertex unit(int dim, int axis, int sign) {
  Vertex e(dim);
  e[axis] = sign;
  return e;
}

EdgeId edge_between(const Vertex& u, const Vertex& v) {
  if (u.dim() != v.dim() || l1_distance(u, v) != 1) {
    fail(ErrorCode::kNotAdjacent,
         fmt::format("{} and {} are not nearest neighbours", u.to_string(), v.to_string()));
  }
  const Vertex& base = std::min(u, v);
  const Vertex& other = std::max(u, v);
  int axis = 0;
  while (base[axis] == other[axis]) ++axis;
  return EdgeId{base, axis};
}

LatticeBox::LatticeBox(Vertex lo, Vertex hi) : lo_(lo), hi_(hi) {
  if (lo.dim() != hi.dim() || lo.dim() < 1) {
    fail(ErrorCode::kInvalidSpec, "box corners must share a dimension >= 1");
  }
  const int d = lo.dim();
  std::size_t s = 1;
  for (int i = d - 1; i >= 0; --i) {
    if (hi[i] < lo[i]) {
      fail(ErrorCode::kInvalidSpec,
           fmt::format("box hi {} below lo {}", hi.to_string(), lo.to_string()));
    }
    stride_[static_cast<std::size_t>(i)] = s;
    s *= static_cast<std::size_t>(hi[i] - lo[i] + 1);
  }
  count_ = s;
}

LatticeBox LatticeBox::cube(int dim, int lo, int side) {
  Vertex a(dim), b(dim);
  for (int i = 0; i < dim; ++i) {
    a[i] = lo;
    b[i] = lo + side;
  }
  return LatticeBox(a, b);
}

bool LatticeBox::contains(const Vertex& x) const noexcept {
  if (x.dim() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
  }
  return true;
}

bool LatticeBox::contains(const LatticeBox& other) const noexcept {
  return contains(other.lo_) && contains(other.hi_);
}

bool LatticeBox::is_interior(const Vertex& x) const noexcept {
  for (int i = 0; i < dim(); ++i) {
    if (x[i] <= lo_[i] || x[i] >= hi_[i]) return false;
  }
  return true;
}

std::optional<LatticeBox> LatticeBox::intersect(const LatticeBox& other) const {
  Vertex lo(dim()), hi(dim());
  for (int i = 0; i < dim(); ++i) {
    lo[i] = std::max(lo_[i], other.lo_[i]);
    hi[i] = std::min(hi_[i], other.hi_[i]);
    if (hi[i] < lo[i]) return std::nullopt;
  }
  return LatticeBox(lo, hi);
}

std::size_t LatticeBox::index(const Vertex& x) const noexcept {
  std::size_t idx = 0;
  for (int i = 0; i < dim(); ++i) {
    idx += static_cast<std::size_t>(x[i] - lo_[i]) * stride_[static_cast<std::size_t>(i)];
  }
  return idx;
}

Vertex LatticeBox::vertex(std::size_t index) const noexcept {
  Vertex x = lo_;
  for (int i = 0; i < dim(); ++i) {
    const std::size_t s = stride_[static_cast<std::size_t>(i)];
    x[i] += static_cast<int>(index / s);
    index %= s;
  }
  return x;
}

EdgeId LatticeBox::edge_id(const Vertex& u, const Vertex& v) const {
  EdgeId e = edge_between(u, v);
  if (!contains(u) || !contains(v)) {
    fail(ErrorCode::kOutOfBox,
         fmt::format("edge {}-{} leaves box {}", u.to_string(), v.to_string(), to_string()));
  }
  return e;
}

bool LatticeBox::contains(const EdgeId& e) const noexcept {
  return contains(e.base) && e.base[e.axis] < hi_[e.axis];
}

std::size_t LatticeBox::edge_count() const noexcept {
  std::size_t total = 0;
  for (int a = 0; a < dim(); ++a) {
    total += count_ / static_cast<std::size_t>(extent(a)) *
             static_cast<std::size_t>(extent(a) - 1);
  }
  return total;
}

void LatticeBox::for_each_edge(const std::function<void(const EdgeId&)>& fn) const {
  for (std::size_t i = 0; i < count_; ++i) {
    const Vertex x = vertex(i);
    for (int a = 0; a < dim(); ++a) {
      if (x[a] < hi_[a]) fn(EdgeId{x, a});
    }
  }
}

std::vector<Vertex> LatticeBox::neighbors(const Vertex& x) const {
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(2 * dim()));
  for (int a = 0; a < dim(); ++a) {
    if (x[a] > lo_[a]) out.push_back(x.shifted(a, -1));
    if (x[a] < hi_[a]) out.push_back(x.shifted(a, 1));
  }
  return out;
}

std::string LatticeBox::to_string() const {
  std::string s;
  for (int i = 0; i < dim(); ++i) {
    if (i) s += "x";
    s += fmt::format("[{},{}]", lo_[i], hi_[i]);
  }
  return s;
}

}  // namespace fpp

std::size_t std::hash<fpp::Vertex>::operator()(const fpp::Vertex& v) const noexcept {
  std::uint64_t h = fpp::mix64(static_cast<std::uint64_t>(v.dim()));
  for (int c : v.coords()) h = fpp::mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
  return static_cast<std::size_t>(h);
}

std::size_t std::hash<fpp::EdgeId>::operator()(const fpp::EdgeId& e) const noexcept {
  return static_cast<std::size_t>(
      fpp::mix64(std::hash<fpp::Vertex>{}(e.base) ^ static_cast<std::uint64_t>(e.axis)));
}

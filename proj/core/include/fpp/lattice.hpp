#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fpp {

inline constexpr int kMaxDim = 4;

/// A point of Z^d, d <= kMaxDim. Ordering is lexicographic in (x^1, ..., x^d).
class Vertex {
 public:
  Vertex() = default;
  explicit Vertex(int dim);
  Vertex(std::initializer_list<int> coords);
  explicit Vertex(std::span<const int> coords);

  int dim() const noexcept { return dim_; }
  int operator[](int axis) const noexcept { return c_[static_cast<std::size_t>(axis)]; }
  int& operator[](int axis) noexcept { return c_[static_cast<std::size_t>(axis)]; }
  std::span<const int> coords() const noexcept {
    return {c_.data(), static_cast<std::size_t>(dim_)};
  }

  /// Copy moved by `step` along `axis` (0-based).
  Vertex shifted(int axis, int step) const noexcept {
    Vertex out = *this;
    out.c_[static_cast<std::size_t>(axis)] += step;
    return out;
  }

  Vertex& operator+=(const Vertex& other) noexcept;
  Vertex& operator-=(const Vertex& other) noexcept;
  friend Vertex operator+(Vertex a, const Vertex& b) noexcept { return a += b; }
  friend Vertex operator-(Vertex a, const Vertex& b) noexcept { return a -= b; }

  friend bool operator==(const Vertex& a, const Vertex& b) noexcept;
  friend std::strong_ordering operator<=>(const Vertex& a, const Vertex& b) noexcept;

  std::string to_string() const;

 private:
  std::array<int, kMaxDim> c_{};
  int dim_ = 0;
};

/// l1 norm ||x|| = sum |x^i|.
int l1_norm(const Vertex& x) noexcept;
int l1_distance(const Vertex& a, const Vertex& b) noexcept;
int linf_distance(const Vertex& a, const Vertex& b) noexcept;

/// Unit vector e_{axis+1} in dimension `dim`.
Vertex unit(int dim, int axis, int sign = 1);

/// Canonical nearest-neighbour edge <base, base + e_axis>; base is the
/// lexicographically smaller endpoint. `axis` is 0-based (axis 0 is e_1).
struct EdgeId {
  Vertex base;
  int axis = 0;

  Vertex tip() const noexcept { return base.shifted(axis, 1); }

  friend bool operator==(const EdgeId&, const EdgeId&) noexcept = default;
  friend auto operator<=>(const EdgeId&, const EdgeId&) noexcept = default;
};

/// Canonical id of the edge between adjacent vertices, box-free.
/// Throws NotAdjacent when ||u - v|| != 1.
EdgeId edge_between(const Vertex& u, const Vertex& v);

/// Axis-aligned box of integer points lo^i <= x^i <= hi^i.
class LatticeBox {
 public:
  LatticeBox() = default;
  LatticeBox(Vertex lo, Vertex hi);

  /// Box [lo, lo + side]^d.
  static LatticeBox cube(int dim, int lo, int side);

  int dim() const noexcept { return lo_.dim(); }
  const Vertex& lo() const noexcept { return lo_; }
  const Vertex& hi() const noexcept { return hi_; }
  int extent(int axis) const noexcept { return hi_[axis] - lo_[axis] + 1; }

  std::size_t vertex_count() const noexcept { return count_; }
  bool contains(const Vertex& x) const noexcept;
  bool contains(const LatticeBox& other) const noexcept;
  bool is_interior(const Vertex& x) const noexcept;

  std::optional<LatticeBox> intersect(const LatticeBox& other) const;

  /// Linear index; axis 0 is the most significant digit so index order is
  /// lexicographic vertex order.
  std::size_t index(const Vertex& x) const noexcept;
  Vertex vertex(std::size_t index) const noexcept;
  std::size_t stride(int axis) const noexcept { return stride_[static_cast<std::size_t>(axis)]; }

  /// Checked edge id: NotAdjacent, or OutOfBox if an endpoint is outside.
  EdgeId edge_id(const Vertex& u, const Vertex& v) const;
  bool contains(const EdgeId& e) const noexcept;

  /// Dense slot for an in-box edge: index(base) * d + axis.
  std::size_t edge_slot(const EdgeId& e) const noexcept {
    return index(e.base) * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(e.axis);
  }
  std::size_t edge_slot_count() const noexcept {
    return count_ * static_cast<std::size_t>(dim());
  }
  std::size_t edge_count() const noexcept;

  /// Calls fn(EdgeId) for every edge with both endpoints in the box, in
  /// slot order.
  void for_each_edge(const std::function<void(const EdgeId&)>& fn) const;

  std::vector<Vertex> neighbors(const Vertex& x) const;

  friend bool operator==(const LatticeBox&, const LatticeBox&) noexcept = default;

  std::string to_string() const;

 private:
  Vertex lo_;
  Vertex hi_;
  std::array<std::size_t, kMaxDim> stride_{};
  std::size_t count_ = 0;
};

}  // namespace fpp

template <>
struct std::hash<fpp::Vertex> {
  std::size_t operator()(const fpp::Vertex& v) const noexcept;
};

template <>
struct std::hash<fpp::EdgeId> {
  std::size_t operator()(const fpp::EdgeId& e) const noexcept;
};

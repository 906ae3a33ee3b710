#include "fpp/edge_field.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "fpp/config.hpp"
#include "fpp/errors.hpp"
#include "fpp/rng.hpp"

namespace fpp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t next_uid() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "binary dump assumes little endian");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

}  // namespace

EdgeField::EdgeField(LatticeBox box, std::vector<double> weights,
                     std::optional<FieldProvenance> prov)
    : box_(std::move(box)),
      weights_(std::move(weights)),
      provenance_(std::move(prov)),
      uid_(next_uid()) {}

double EdgeField::sample_edge(const DistributionSpec& spec, std::uint64_t seed, const EdgeId& e) {
  std::uint64_t key = hash_words(seed, {static_cast<std::uint64_t>(e.base.dim()),
                                        static_cast<std::uint64_t>(e.axis)});
  for (int c : e.base.coords()) key = mix64(key ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
  const CounterStream stream(key);
  return spec.sample(stream.uniform_at(0), stream.uniform_at(1));
}

EdgeField EdgeField::sample(const LatticeBox& box, const DistributionSpec& spec,
                            std::uint64_t seed, int threads) {
  std::vector<double> w(box.edge_slot_count(), kNaN);
  const std::size_t n = box.vertex_count();
  const int d = box.dim();
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Vertex x = box.vertex(i);
      for (int a = 0; a < d; ++a) {
        if (x[a] < box.hi()[a]) {
          w[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)] =
              sample_edge(spec, seed, EdgeId{x, a});
        }
      }
    }
  };
  const std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 4096) {
    fill(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t t = 0; t < workers; ++t) {
      const std::size_t b = t * chunk, e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(fill, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return EdgeField(box, std::move(w), FieldProvenance{seed, spec});
}

EdgeField EdgeField::constant(const LatticeBox& box, double weight) {
  return from_function(box, [weight](const EdgeId&) { return weight; });
}

EdgeField EdgeField::from_function(const LatticeBox& box,
                                   const std::function<double(const EdgeId&)>& weight) {
  std::vector<double> w(box.edge_slot_count(), kNaN);
  box.for_each_edge([&](const EdgeId& e) {
    const double v = weight(e);
    if (!(v >= 0) || std::isnan(v)) {
      fail(ErrorCode::kInvalidSpec, fmt::format("negative or NaN weight on edge at {}", e.base.to_string()));
    }
    w[box.edge_slot(e)] = v;
  });
  return EdgeField(box, std::move(w), std::nullopt);
}

EdgeField EdgeField::with_weights(std::span<const std::pair<EdgeId, double>> overrides) const {
  std::vector<double> w = weights_;
  for (const auto& [e, v] : overrides) {
    if (!box_.contains(e)) {
      fail(ErrorCode::kEdgeOutOfBox, fmt::format("edge at {} outside {}", e.base.to_string(), box_.to_string()));
    }
    if (!(v >= 0)) fail(ErrorCode::kInvalidSpec, "weights must be non-negative");
    w[box_.edge_slot(e)] = v;
  }
  return EdgeField(box_, std::move(w), std::nullopt);
}

double EdgeField::weight(const EdgeId& e) const {
  if (!box_.contains(e)) {
    fail(ErrorCode::kEdgeOutOfBox,
         fmt::format("edge {}+e{} outside {}", e.base.to_string(), e.axis + 1, box_.to_string()));
  }
  return weights_[box_.edge_slot(e)];
}

double EdgeField::weight(const Vertex& u, const Vertex& v) const {
  return weight(edge_between(u, v));
}

double EdgeField::max_weight() const noexcept {
  double m = 0.0;
  for (double w : weights_) {
    if (w > m) m = w;
  }
  return m;
}

void EdgeField::write_csv(std::ostream& out) const {
  const int d = box_.dim();
  for (int i = 0; i < d; ++i) out << "x" << (i + 1) << ",";
  out << "axis,weight\n";
  box_.for_each_edge([&](const EdgeId& e) {
    for (int c : e.base.coords()) out << c << ",";
    out << (e.axis + 1) << "," << format_number(weights_[box_.edge_slot(e)]) << "\n";
  });
}

void EdgeField::write_binary(std::ostream& out) const {
  const int d = box_.dim();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  for (int i = 0; i < d; ++i) put_le<std::int32_t>(out, box_.lo()[i]);
  for (int i = 0; i < d; ++i) put_le<std::int32_t>(out, box_.hi()[i]);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(box_.edge_count()));
  box_.for_each_edge([&](const EdgeId& e) {
    for (int c : e.base.coords()) put_le<std::int32_t>(out, c);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.axis + 1));
    put_le<double>(out, weights_[box_.edge_slot(e)]);
  });
}

}  // namespace fpp

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpp {

// A vertex of Z^d. Coordinates are ordered lexicographically by the default
// vector comparison, which coincides with the row-major index order of any box.
using Point = std::vector<std::int64_t>;

inline std::int64_t l1_norm(std::span<const std::int64_t> x) {
  std::int64_t s = 0;
  for (auto v : x) s += v < 0 ? -v : v;
  return s;
}

inline Point floor_map(std::span<const double> x) {
  Point out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j])) throw std::invalid_argument("floor_map: non-finite coordinate");
    out[j] = static_cast<std::int64_t>(std::floor(x[j]));
  }
  return out;
}

inline Point operator+(Point a, const Point& b) {
  for (std::size_t j = 0; j < a.size(); ++j) a[j] += b[j];
  return a;
}

inline Point operator-(Point a, const Point& b) {
  for (std::size_t j = 0; j < a.size(); ++j) a[j] -= b[j];
  return a;
}

inline Point unit_vector(int dim, int axis, std::int64_t sign = 1) {
  Point e(static_cast<std::size_t>(dim), 0);
  e[static_cast<std::size_t>(axis)] = sign;
  return e;
}

inline bool is_nonnegative(const Point& x) {
  for (auto v : x)
    if (v < 0) return false;
  return true;
}

inline std::string format_point(const Point& p) {
  std::string s;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j) s += ',';
    s += std::to_string(p[j]);
  }
  return s;
}

// Axis along which two L1-adjacent points differ, or -1 if they are not adjacent.
inline int step_axis(const Point& a, const Point& b) {
  if (a.size() != b.size()) return -1;
  int axis = -1;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const auto diff = b[j] - a[j];
    if (diff == 0) continue;
    if ((diff != 1 && diff != -1) || axis != -1) return -1;
    axis = static_cast<int>(j);
  }
  return axis;
}

// Finite box {z : lo <= z <= hi} of Z^d. Vertices are indexed row-major (first
// coordinate slowest); the edge {z, z + e_j} has index vertex_index(z) * d + j.
// Edge slots whose upper endpoint leaves the box exist in the index space but
// are never valid edges.
class BoxLattice {
 public:
  BoxLattice(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size()) throw std::invalid_argument("BoxLattice: lo/hi dimension mismatch");
    if (lo_.size() < 2) throw std::invalid_argument("BoxLattice: dimension must be at least 2");
    const std::size_t d = lo_.size();
    stride_.assign(d, 1);
    extent_.assign(d, 0);
    for (std::size_t j = 0; j < d; ++j) {
      if (lo_[j] > hi_[j]) throw std::invalid_argument("BoxLattice: lo must be <= hi");
      extent_[j] = static_cast<std::size_t>(hi_[j] - lo_[j] + 1);
    }
    for (std::size_t j = d - 1; j > 0; --j) stride_[j - 1] = stride_[j] * extent_[j];
    vertex_count_ = stride_[0] * extent_[0];
  }

  int dim() const { return static_cast<int>(lo_.size()); }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_slot_count() const { return vertex_count_ * lo_.size(); }
  std::size_t extent(int axis) const { return extent_[static_cast<std::size_t>(axis)]; }
  std::size_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (std::size_t j = 0; j < lo_.size(); ++j) total += vertex_count_ / extent_[j] * (extent_[j] - 1);
    return total;
  }

  bool contains(const Point& z) const {
    if (z.size() != lo_.size()) return false;
    for (std::size_t j = 0; j < z.size(); ++j)
      if (z[j] < lo_[j] || z[j] > hi_[j]) return false;
    return true;
  }

  std::size_t index(const Point& z) const {
    if (!contains(z)) throw std::out_of_range("BoxLattice: vertex (" + format_point(z) + ") outside box");
    std::size_t idx = 0;
    for (std::size_t j = 0; j < z.size(); ++j) idx += static_cast<std::size_t>(z[j] - lo_[j]) * stride_[j];
    return idx;
  }

  Point point(std::size_t idx) const {
    Point z(lo_.size());
    for (std::size_t j = 0; j < lo_.size(); ++j) {
      z[j] = lo_[j] + static_cast<std::int64_t>(idx / stride_[j]);
      idx %= stride_[j];
    }
    return z;
  }

  std::int64_t coordinate(std::size_t idx, int axis) const {
    const auto j = static_cast<std::size_t>(axis);
    return lo_[j] + static_cast<std::int64_t>((idx / stride_[j]) % extent_[j]);
  }

  // Neighbour index in direction sign * e_axis, if inside the box.
  std::optional<std::size_t> neighbor(std::size_t idx, int axis, int sign) const {
    const auto j = static_cast<std::size_t>(axis);
    const auto c = (idx / stride_[j]) % extent_[j];
    if (sign > 0) {
      if (c + 1 >= extent_[j]) return std::nullopt;
      return idx + stride_[j];
    }
    if (c == 0) return std::nullopt;
    return idx - stride_[j];
  }

  bool on_boundary(std::size_t idx) const {
    for (std::size_t j = 0; j < lo_.size(); ++j) {
      const auto c = (idx / stride_[j]) % extent_[j];
      if (extent_[j] > 1 && (c == 0 || c + 1 == extent_[j])) return true;
    }
    return false;
  }

  bool edge_slot_valid(std::size_t slot) const {
    const std::size_t d = lo_.size();
    const std::size_t j = slot % d;
    const std::size_t v = slot / d;
    return v < vertex_count_ && (v / stride_[j]) % extent_[j] + 1 < extent_[j];
  }

  // Edge joining v and its neighbour in direction sign * e_axis.
  std::size_t edge_index(std::size_t v, int axis, int sign) const {
    const std::size_t lower = sign > 0 ? v : v - stride_[static_cast<std::size_t>(axis)];
    return lower * lo_.size() + static_cast<std::size_t>(axis);
  }

  // Edge between two adjacent points of the box.
  std::size_t edge_between(const Point& a, const Point& b) const {
    const int axis = step_axis(a, b);
    if (axis < 0) throw std::invalid_argument("BoxLattice: points are not adjacent");
    const Point& lower = b[static_cast<std::size_t>(axis)] > a[static_cast<std::size_t>(axis)] ? a : b;
    if (!contains(a) || !contains(b)) throw std::out_of_range("BoxLattice: edge leaves the box");
    return index(lower) * lo_.size() + static_cast<std::size_t>(axis);
  }

  friend bool operator==(const BoxLattice& a, const BoxLattice& b) { return a.lo_ == b.lo_ && a.hi_ == b.hi_; }

 private:
  Point lo_;
  Point hi_;
  std::vector<std::size_t> extent_;
  std::vector<std::size_t> stride_;
  std::size_t vertex_count_ = 0;
};

struct PathFlags {
  bool adjacent = false;
  bool self_avoiding = false;
  bool directed = false;
};

// Finite path (x_0, ..., x_k) of L1-adjacent vertices.
struct LatticePath {
  std::vector<Point> vertices;

  std::size_t edge_count() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  const Point& source() const { return vertices.front(); }
  const Point& target() const { return vertices.back(); }

  friend bool operator==(const LatticePath&, const LatticePath&) = default;
  friend auto operator<=>(const LatticePath& a, const LatticePath& b) { return a.vertices <=> b.vertices; }
};

// Throws std::invalid_argument on an empty sequence or a non-adjacent step.
inline PathFlags validate_path(const LatticePath& p) {
  if (p.vertices.empty()) throw std::invalid_argument("validate_path: empty vertex sequence");
  PathFlags flags{true, true, true};
  const auto& vs = p.vertices;
  for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
    const int axis = step_axis(vs[i], vs[i + 1]);
    if (axis < 0)
      throw std::invalid_argument("validate_path: step " + std::to_string(i) + " joins non-adjacent vertices");
    if (vs[i + 1][static_cast<std::size_t>(axis)] < vs[i][static_cast<std::size_t>(axis)]) flags.directed = false;
  }
  std::vector<Point> sorted = vs;
  std::sort(sorted.begin(), sorted.end());
  flags.self_avoiding = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  return flags;
}

// Number of edges of p joining the hyperplanes {z_axis = level} and {z_axis = level + 1}.
inline std::size_t slab_crossings(const LatticePath& p, int axis, std::int64_t level) {
  const auto j = static_cast<std::size_t>(axis);
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
    const auto a = p.vertices[i][j];
    const auto b = p.vertices[i + 1][j];
    if ((a == level && b == level + 1) || (a == level + 1 && b == level)) ++count;
  }
  return count;
}

// Number of edges of p parallel to e_axis.
inline std::size_t axis_edge_count(const LatticePath& p, int axis) {
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i)
    if (step_axis(p.vertices[i], p.vertices[i + 1]) == axis) ++count;
  return count;
}

inline bool path_inside(const BoxLattice& box, const LatticePath& p) {
  for (const auto& v : p.vertices)
    if (!box.contains(v)) return false;
  return true;
}

}  // namespace fpp

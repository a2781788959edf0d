#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace gffperc {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

/// Sorted, duplicate-free list of vertex indices.
using VertexSet = std::vector<VertexId>;

/// A lattice point of Z^d; only the first `dim` entries are meaningful.
using Point = std::vector<int>;

inline constexpr int kMaxDim = 12;

/// Cube B(R) = [-R, R]^d of Z^d with R = floor(pad * N), indexed densely in
/// row-major order (axis 0 slowest). Edge slots are (vertex, axis) pairs
/// pointing from a vertex to its +e_axis neighbor; slots whose neighbor lies
/// outside the domain are invalid. The outer face |x|_inf = R is the
/// absorbing shell.
class BoxGeometry {
 public:
  BoxGeometry(int dim, int radius, double pad);

  int dim() const { return dim_; }
  /// The observation radius N.
  int radius() const { return radius_; }
  double pad() const { return pad_; }
  /// Radius R of the simulation domain B(R).
  int domain_radius() const { return domain_radius_; }
  int side() const { return side_; }

  VertexId vertex_count() const { return vertex_count_; }
  EdgeId edge_slot_count() const { return vertex_count_ * dim_; }
  std::int64_t edge_count() const;

  /// Edge length of the metric graph; every interval I_e has length d.
  double edge_length() const { return static_cast<double>(dim_); }

  /// d = 6 carries logarithmic corrections to the one-arm exponent.
  bool log_corrections_flagged() const { return dim_ == 6; }

  bool contains(std::span<const int> p) const;
  VertexId index(std::span<const int> p) const;
  Point point(VertexId v) const;
  int coordinate(VertexId v, int axis) const {
    return (v / stride_[axis]) % side_ - domain_radius_;
  }
  VertexId origin() const { return origin_; }

  /// Neighbor in direction dir (+1 or -1) along axis, or -1 if outside.
  VertexId neighbor(VertexId v, int axis, int dir) const {
    const int c = coordinate(v, axis) + dir;
    if (c < -domain_radius_ || c > domain_radius_) return -1;
    return v + dir * stride_[axis];
  }
  VertexId stride(int axis) const { return stride_[axis]; }

  int linf_norm(VertexId v) const;
  std::int64_t norm2(VertexId v) const;
  bool on_shell(VertexId v) const { return linf_norm(v) == domain_radius_; }
  bool in_box(VertexId v, int n) const { return linf_norm(v) <= n; }

  EdgeId edge_id(VertexId v, int axis) const { return v * dim_ + axis; }
  bool edge_valid(EdgeId e) const;
  int edge_axis(EdgeId e) const { return e % dim_; }
  VertexId edge_tail(EdgeId e) const { return e / dim_; }
  VertexId edge_head(EdgeId e) const { return e / dim_ + stride_[e % dim_]; }
  std::pair<VertexId, VertexId> endpoints(EdgeId e) const {
    return {edge_tail(e), edge_head(e)};
  }
  /// Edge joining two adjacent vertices, or -1 if they are not adjacent.
  EdgeId edge_between(VertexId u, VertexId v) const;

  /// Vertices of the absorbing shell |x|_inf = R.
  VertexSet shell() const;
  /// Vertices of B(n) = [-n, n]^d intersected with the domain.
  VertexSet box(int n) const;
  /// Vertices with |x|_inf == n (the inner boundary of B(n)).
  VertexSet box_boundary(int n) const;

 private:
  int dim_;
  int radius_;
  double pad_;
  int domain_radius_;
  int side_;
  VertexId vertex_count_;
  VertexId origin_;
  std::array<VertexId, kMaxDim> stride_{};
};

BoxGeometry make_box(int dim, int radius, double pad = 2.0);

/// Vertices of A that have a lattice neighbor outside A. Neighbors that fall
/// outside the domain count as outside A.
VertexSet boundary(const BoxGeometry& box, const VertexSet& a);

struct BallResult {
  VertexSet vertices;
  /// The requested ball extends past the domain and was truncated.
  bool clipped = false;
};

/// Domain vertices with Euclidean norm <= r.
BallResult euclidean_ball(const BoxGeometry& box, double r);

/// A point of the metric graph: offset step * d / resolution along an edge,
/// measured from the edge tail. step = 0 and step = resolution are the two
/// lattice endpoints.
struct MetricCoordinate {
  EdgeId edge = 0;
  int step = 0;
  int resolution = 1;
  double offset(const BoxGeometry& box) const {
    return box.edge_length() * step / resolution;
  }
};

/// Shortest-path length in units of d / k between two discretization nodes.
std::int64_t metric_distance_steps(const BoxGeometry& box,
                                   const MetricCoordinate& p,
                                   const MetricCoordinate& q, int k);

/// Shortest-path length on the metric graph discretized at resolution d / k.
double metric_distance(const BoxGeometry& box, const MetricCoordinate& p,
                       const MetricCoordinate& q, int k);

VertexSet make_vertex_set(std::vector<VertexId> v);
bool set_contains(const VertexSet& s, VertexId v);
VertexSet set_union(const VertexSet& a, const VertexSet& b);
std::vector<std::uint8_t> to_mask(const BoxGeometry& box, const VertexSet& s);

}  // namespace gffperc

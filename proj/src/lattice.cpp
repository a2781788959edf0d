#include "gffperc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace gffperc {

BoxGeometry::BoxGeometry(int dim, int radius, double pad)
    : dim_(dim), radius_(radius), pad_(pad) {
  if (dim < 3) throw std::invalid_argument("dimension must be at least 3");
  if (dim > kMaxDim)
    throw std::invalid_argument("dimension exceeds " + std::to_string(kMaxDim));
  if (radius < 1) throw std::invalid_argument("radius must be at least 1");
  if (!(pad >= 1.0)) throw std::invalid_argument("pad must be at least 1");
  // Tolerate representation error in pad * N, e.g. 1.1 * 10.
  domain_radius_ = static_cast<int>(std::floor(pad * radius + 1e-9));
  side_ = 2 * domain_radius_ + 1;

  const double total = std::pow(static_cast<double>(side_), dim) * dim;
  if (total >= static_cast<double>(std::numeric_limits<VertexId>::max()))
    throw std::invalid_argument("domain too large for 32-bit indexing");

  VertexId s = 1;
  for (int axis = dim - 1; axis >= 0; --axis) {
    stride_[axis] = s;
    s *= side_;
  }
  vertex_count_ = s;
  origin_ = 0;
  for (int axis = 0; axis < dim; ++axis) origin_ += domain_radius_ * stride_[axis];
}

std::int64_t BoxGeometry::edge_count() const {
  std::int64_t per_axis = side_ - 1;
  for (int i = 1; i < dim_; ++i) per_axis *= side_;
  return per_axis * dim_;
}

bool BoxGeometry::contains(std::span<const int> p) const {
  if (static_cast<int>(p.size()) < dim_) return false;
  for (int axis = 0; axis < dim_; ++axis)
    if (std::abs(p[axis]) > domain_radius_) return false;
  return true;
}

VertexId BoxGeometry::index(std::span<const int> p) const {
  if (!contains(p)) throw std::out_of_range("point outside domain");
  VertexId v = 0;
  for (int axis = 0; axis < dim_; ++axis)
    v += (p[axis] + domain_radius_) * stride_[axis];
  return v;
}

Point BoxGeometry::point(VertexId v) const {
  if (v < 0 || v >= vertex_count_) throw std::out_of_range("vertex index");
  Point p(dim_);
  for (int axis = 0; axis < dim_; ++axis) p[axis] = coordinate(v, axis);
  return p;
}

int BoxGeometry::linf_norm(VertexId v) const {
  int m = 0;
  for (int axis = 0; axis < dim_; ++axis)
    m = std::max(m, std::abs(coordinate(v, axis)));
  return m;
}

std::int64_t BoxGeometry::norm2(VertexId v) const {
  std::int64_t s = 0;
  for (int axis = 0; axis < dim_; ++axis) {
    const std::int64_t c = coordinate(v, axis);
    s += c * c;
  }
  return s;
}

bool BoxGeometry::edge_valid(EdgeId e) const {
  if (e < 0 || e >= edge_slot_count()) return false;
  return coordinate(edge_tail(e), edge_axis(e)) < domain_radius_;
}

EdgeId BoxGeometry::edge_between(VertexId u, VertexId v) const {
  if (u > v) std::swap(u, v);
  for (int axis = 0; axis < dim_; ++axis)
    if (v - u == stride_[axis] && coordinate(u, axis) < domain_radius_)
      return edge_id(u, axis);
  return -1;
}

VertexSet BoxGeometry::shell() const { return box_boundary(domain_radius_); }

VertexSet BoxGeometry::box(int n) const {
  VertexSet out;
  for (VertexId v = 0; v < vertex_count_; ++v)
    if (linf_norm(v) <= n) out.push_back(v);
  return out;
}

VertexSet BoxGeometry::box_boundary(int n) const {
  VertexSet out;
  for (VertexId v = 0; v < vertex_count_; ++v)
    if (linf_norm(v) == n) out.push_back(v);
  return out;
}

BoxGeometry make_box(int dim, int radius, double pad) {
  return BoxGeometry(dim, radius, pad);
}

VertexSet boundary(const BoxGeometry& box, const VertexSet& a) {
  VertexSet out;
  for (VertexId v : a) {
    bool outside = false;
    for (int axis = 0; axis < box.dim() && !outside; ++axis) {
      for (int dir : {-1, 1}) {
        const VertexId w = box.neighbor(v, axis, dir);
        if (w < 0 || !set_contains(a, w)) {
          outside = true;
          break;
        }
      }
    }
    if (outside) out.push_back(v);
  }
  return out;
}

BallResult euclidean_ball(const BoxGeometry& box, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("ball radius must be nonnegative");
  BallResult out;
  out.clipped = r >= box.domain_radius() + 1;
  const double r2 = r * r;
  for (VertexId v = 0; v < box.vertex_count(); ++v)
    if (static_cast<double>(box.norm2(v)) <= r2 + 1e-12) out.vertices.push_back(v);
  return out;
}

namespace {

struct Node {
  EdgeId edge;
  std::int64_t step;  // in units of d / k
};

Node rescale(const BoxGeometry& box, const MetricCoordinate& c, int k) {
  if (!box.edge_valid(c.edge)) throw std::out_of_range("edge outside domain");
  if (c.resolution < 1 || c.step < 0 || c.step > c.resolution)
    throw std::invalid_argument("offset outside [0, d]");
  const std::int64_t num = static_cast<std::int64_t>(c.step) * k;
  if (num % c.resolution != 0)
    throw std::invalid_argument("coordinate is not a node at resolution k");
  return {c.edge, num / c.resolution};
}

std::int64_t l1(const BoxGeometry& box, VertexId a, VertexId b) {
  std::int64_t s = 0;
  for (int axis = 0; axis < box.dim(); ++axis)
    s += std::abs(box.coordinate(a, axis) - box.coordinate(b, axis));
  return s;
}

}  // namespace

std::int64_t metric_distance_steps(const BoxGeometry& box,
                                   const MetricCoordinate& p,
                                   const MetricCoordinate& q, int k) {
  if (k < 1) throw std::invalid_argument("resolution must be at least 1");
  const Node a = rescale(box, p, k);
  const Node b = rescale(box, q, k);
  if (a.edge == b.edge) return std::abs(a.step - b.step);
  const std::array<std::pair<VertexId, std::int64_t>, 2> ends_a = {
      std::pair{box.edge_tail(a.edge), a.step},
      std::pair{box.edge_head(a.edge), k - a.step}};
  const std::array<std::pair<VertexId, std::int64_t>, 2> ends_b = {
      std::pair{box.edge_tail(b.edge), b.step},
      std::pair{box.edge_head(b.edge), k - b.step}};
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const auto& [u, du] : ends_a)
    for (const auto& [w, dw] : ends_b)
      best = std::min(best, du + dw + k * l1(box, u, w));
  return best;
}

double metric_distance(const BoxGeometry& box, const MetricCoordinate& p,
                       const MetricCoordinate& q, int k) {
  return static_cast<double>(metric_distance_steps(box, p, q, k)) *
         box.edge_length() / k;
}

VertexSet make_vertex_set(std::vector<VertexId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool set_contains(const VertexSet& s, VertexId v) {
  return std::binary_search(s.begin(), s.end(), v);
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::uint8_t> to_mask(const BoxGeometry& box, const VertexSet& s) {
  std::vector<std::uint8_t> mask(box.vertex_count(), 0);
  for (VertexId v : s) {
    if (v < 0 || v >= box.vertex_count()) throw std::out_of_range("vertex index");
    mask[v] = 1;
  }
  return mask;
}

}  // namespace gffperc

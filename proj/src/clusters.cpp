#include "gffperc/clusters.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gffperc {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::int32_t find(std::int32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> size_;
};

std::int64_t cache_key(const ClusterRef& c) {
  return 2 * static_cast<std::int64_t>(c.root) + (c.sign == Sign::Positive ? 1 : 0);
}

}  // namespace

ClusterLabeling::ClusterLabeling(const OpenEdgeSet& edges, const FieldConfig& field)
    : box_(field.geometry), region_(edges.region()), level_(edges.level()) {
  if (edges.geometry().vertex_count() != box_.vertex_count() ||
      edges.geometry().dim() != box_.dim())
    throw std::invalid_argument("edge set and field use different geometries");
  const int d = box_.dim();
  const int side = 2 * region_ + 1;
  std::size_t count = 1;
  for (int i = 0; i < d; ++i) count *= static_cast<std::size_t>(side);

  // Region vertices in local row-major order.
  std::vector<VertexId> global(count);
  {
    std::vector<int> c(d, -region_);
    for (std::size_t i = 0; i < count; ++i) {
      VertexId v = 0;
      for (int a = 0; a < d; ++a) v += (c[a] + box_.domain_radius()) * box_.stride(a);
      global[i] = v;
      for (int a = d - 1; a >= 0; --a) {
        if (++c[a] <= region_) break;
        c[a] = -region_;
      }
    }
  }
  values_.resize(count);
  for (std::size_t i = 0; i < count; ++i) values_[i] = field.values[global[i]];

  std::vector<std::int32_t> local_stride(d);
  {
    std::int32_t s = 1;
    for (int a = d - 1; a >= 0; --a) {
      local_stride[a] = s;
      s *= side;
    }
  }

  UnionFind pos(count);
  UnionFind neg(count);
  for (std::size_t i = 0; i < count; ++i) {
    const VertexId v = global[i];
    for (int a = 0; a < d; ++a) {
      if (box_.coordinate(v, a) >= region_) continue;
      const EdgeState s = edges.state(box_.edge_id(v, a));
      if (s == EdgeState::OpenPositive)
        pos.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i) + local_stride[a]);
      else if (s == EdgeState::OpenNegative)
        neg.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i) + local_stride[a]);
    }
  }

  const VertexId origin = box_.origin();
  auto finish = [&](UnionFind& uf, SignData& sd, std::vector<ClusterInfo>& info, Sign sign) {
    sd.root.assign(count, -1);
    sd.slot.assign(count, -1);
    for (std::size_t i = 0; i < count; ++i) {
      const bool member = sign == Sign::Positive ? values_[i] >= level_ : values_[i] <= level_;
      if (!member) continue;
      const auto r = uf.find(static_cast<std::int32_t>(i));
      sd.root[i] = global[r];
      if (sd.slot[r] < 0) {
        sd.slot[r] = static_cast<std::int32_t>(info.size());
        const int norm = box_.linf_norm(global[r]);
        info.push_back({ClusterRef{global[r], sign}, 0, norm, norm, false});
      }
      ClusterInfo& ci = info[sd.slot[r]];
      const int norm = box_.linf_norm(global[i]);
      ++ci.size;
      ci.min_norm = std::min(ci.min_norm, norm);
      ci.max_norm = std::max(ci.max_norm, norm);
      if (global[i] == origin) ci.contains_origin = true;
    }
  };
  finish(pos, pos_, pos_info_, Sign::Positive);
  finish(neg, neg_, neg_info_, Sign::Negative);
}

std::int32_t ClusterLabeling::local(VertexId v) const {
  if (v < 0 || v >= box_.vertex_count()) throw std::out_of_range("vertex index");
  const int side = 2 * region_ + 1;
  std::int32_t idx = 0;
  for (int a = 0; a < box_.dim(); ++a) {
    const int c = box_.coordinate(v, a);
    if (c < -region_ || c > region_) return -1;
    idx = idx * side + (c + region_);
  }
  return idx;
}

VertexId ClusterLabeling::root(VertexId v, Sign s) const {
  const auto i = local(v);
  if (i < 0) return -1;
  return data(s).root[i];
}

bool ClusterLabeling::in_level_set(VertexId v, Sign s) const { return root(v, s) >= 0; }

ClusterRef ClusterLabeling::cluster_of(VertexId v) const {
  const auto i = local(v);
  if (i < 0) throw std::out_of_range("vertex outside the labeled region");
  if (values_[i] < level_) return {neg_.root[i], Sign::Negative};
  return {pos_.root[i], Sign::Positive};
}

const ClusterInfo& ClusterLabeling::info(const ClusterRef& c) const {
  const auto i = local(c.root);
  const SignData& sd = data(c.sign);
  if (i < 0 || sd.slot[i] < 0) throw std::invalid_argument("not a cluster root");
  return clusters(c.sign)[sd.slot[i]];
}

void ClusterLabeling::build_members(Sign s) const {
  SignData& sd = s == Sign::Positive ? pos_ : neg_;
  if (!sd.offsets.empty()) return;
  const auto& info = clusters(s);
  sd.offsets.assign(info.size() + 1, 0);
  for (std::size_t k = 0; k < info.size(); ++k) sd.offsets[k + 1] = sd.offsets[k] + info[k].size;
  sd.flat.resize(static_cast<std::size_t>(sd.offsets.back()));
  std::vector<std::int64_t> cursor(sd.offsets.begin(), sd.offsets.end() - 1);
  // Local order is row-major, so walking it yields sorted global ids.
  const int d = box_.dim();
  const int side = 2 * region_ + 1;
  std::vector<int> c(d, -region_);
  for (std::size_t i = 0; i < sd.root.size(); ++i) {
    if (sd.root[i] >= 0) {
      VertexId v = 0;
      for (int a = 0; a < d; ++a) v += (c[a] + box_.domain_radius()) * box_.stride(a);
      sd.flat[cursor[sd.slot[local(sd.root[i])]]++] = v;
    }
    for (int a = d - 1; a >= 0; --a) {
      if (++c[a] <= region_) break;
      c[a] = -region_;
    }
  }
  (void)side;
}

const std::vector<VertexId>& ClusterLabeling::members(const ClusterRef& c) const {
  info(c);
  build_members(c.sign);
  SignData& sd = c.sign == Sign::Positive ? pos_ : neg_;
  if (sd.lists.empty()) sd.lists.resize(clusters(c.sign).size());
  const auto slot = sd.slot[local(c.root)];
  auto& list = sd.lists[slot];
  if (list.empty())
    list.assign(sd.flat.begin() + sd.offsets[slot], sd.flat.begin() + sd.offsets[slot + 1]);
  return list;
}

double ClusterLabeling::exact_diameter(const std::vector<VertexId>& members, double stop_at) const {
  const int d = box_.dim();
  // Only the two ends of each axis-0 line can realize the farthest pair.
  std::unordered_map<VertexId, std::pair<int, int>> lines;
  lines.reserve(members.size());
  for (VertexId v : members) {
    const int c0 = box_.coordinate(v, 0);
    const VertexId key = v - (c0 + box_.domain_radius()) * box_.stride(0);
    auto [it, fresh] = lines.try_emplace(key, c0, c0);
    if (!fresh) {
      it->second.first = std::min(it->second.first, c0);
      it->second.second = std::max(it->second.second, c0);
    }
  }
  std::vector<std::array<int, kMaxDim>> cand;
  cand.reserve(2 * lines.size());
  for (const auto& [key, ends] : lines) {
    std::array<int, kMaxDim> p{};
    for (int a = 1; a < d; ++a) p[a] = box_.coordinate(key, a);
    p[0] = ends.first;
    cand.push_back(p);
    if (ends.second != ends.first) {
      p[0] = ends.second;
      cand.push_back(p);
    }
  }
  // Deterministic order regardless of hash layout.
  std::sort(cand.begin(), cand.end());
  const double stop2 = stop_at * stop_at;
  std::int64_t best = 0;
  for (std::size_t i = 0; i < cand.size(); ++i)
    for (std::size_t j = i + 1; j < cand.size(); ++j) {
      std::int64_t s = 0;
      for (int a = 0; a < d; ++a) {
        const std::int64_t t = cand[i][a] - cand[j][a];
        s += t * t;
      }
      if (s > best) {
        best = s;
        if (static_cast<double>(best) >= stop2) return std::sqrt(static_cast<double>(best));
      }
    }
  return std::sqrt(static_cast<double>(best));
}

double ClusterLabeling::diameter(const ClusterRef& c) const {
  const auto key = cache_key(c);
  if (auto it = diameter_cache_.find(key); it != diameter_cache_.end()) return it->second;
  const double diam = exact_diameter(members(c), std::numeric_limits<double>::infinity());
  diameter_cache_.emplace(key, diam);
  return diam;
}

bool ClusterLabeling::diameter_at_least(const ClusterRef& c, double threshold) const {
  if (threshold <= 0.0) return true;
  if (auto it = diameter_cache_.find(cache_key(c)); it != diameter_cache_.end())
    return it->second >= threshold;
  const ClusterInfo& ci = info(c);
  // A connected set of s vertices has L1, hence Euclidean, diameter <= s - 1.
  if (static_cast<double>(ci.size - 1) < threshold) return false;
  const auto& m = members(c);
  const int d = box_.dim();
  std::array<int, kMaxDim> lo, hi;
  lo.fill(std::numeric_limits<int>::max());
  hi.fill(std::numeric_limits<int>::min());
  for (VertexId v : m)
    for (int a = 0; a < d; ++a) {
      const int x = box_.coordinate(v, a);
      lo[a] = std::min(lo[a], x);
      hi[a] = std::max(hi[a], x);
    }
  double diag2 = 0.0;
  for (int a = 0; a < d; ++a) {
    const double w = hi[a] - lo[a];
    if (w >= threshold) return true;
    diag2 += w * w;
  }
  if (std::sqrt(diag2) < threshold) return false;
  return exact_diameter(m, threshold) >= threshold;
}

ClusterLabeling label_clusters(const OpenEdgeSet& edges, const FieldConfig& field) {
  return ClusterLabeling(edges, field);
}

namespace {

void require_radius(const ClusterLabeling& lab, int n) {
  if (n < 0) throw std::invalid_argument("radius must be nonnegative");
  if (n > lab.region()) throw std::invalid_argument("radius exceeds the labeled region");
}

bool origin_arm(const ClusterLabeling& lab, int n, Sign s) {
  require_radius(lab, n);
  const VertexId o = lab.geometry().origin();
  const VertexId r = lab.root(o, s);
  if (r < 0) return false;
  return lab.info({r, s}).max_norm >= n;
}

}  // namespace

bool one_arm_indicator(const ClusterLabeling& lab, int n) { return origin_arm(lab, n, Sign::Positive); }

bool one_arm_indicator_negative(const ClusterLabeling& lab, int n) {
  return origin_arm(lab, n, Sign::Negative);
}

bool crossing_indicator(const ClusterLabeling& lab, int inner, int outer) {
  if (inner >= outer) throw std::invalid_argument("crossing needs n < N");
  if (inner < 1) throw std::invalid_argument("crossing needs n >= 1");
  require_radius(lab, outer);
  for (const auto& ci : lab.clusters(Sign::Positive))
    if (ci.min_norm <= inner && ci.max_norm >= outer) return true;
  return false;
}

std::vector<ClusterRef> macroscopic_clusters(const ClusterLabeling& lab, int n, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  require_radius(lab, n);
  const double threshold = delta * n;
  std::vector<ClusterRef> out;
  for (Sign s : {Sign::Positive, Sign::Negative})
    for (const auto& ci : lab.clusters(s)) {
      if (ci.max_norm > n - 1) continue;
      if (lab.diameter_at_least(ci.ref, threshold)) out.push_back(ci.ref);
    }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gffperc

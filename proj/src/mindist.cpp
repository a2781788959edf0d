#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "gffperc/clusters.hpp"

namespace gffperc {

namespace {

// A split edge touching a macroscopic cluster, shortened to tail - p1 - p2 - head
// where p1 ends the tail's sign run and p2 starts the head's.
struct Compressed {
  VertexId p1 = -1;
  VertexId p2 = -1;
  std::int64_t w0 = 0;  // tail to p1
  std::int64_t w1 = 0;  // p1 to p2
  std::int64_t w2 = 0;  // p2 to head
};

constexpr std::int64_t kUnreached = std::numeric_limits<std::int64_t>::max();

}  // namespace

MinDistanceResult min_distance(const ClusterLabeling& lab, const OpenEdgeSet& edges,
                               const FieldConfig& field, int n, double delta, int k) {
  return min_distance(lab, edges, field, macroscopic_clusters(lab, n, delta), k);
}

MinDistanceResult min_distance(const ClusterLabeling& lab, const OpenEdgeSet& edges,
                               const FieldConfig& field, const std::vector<ClusterRef>& macro,
                               int k) {
  if (k < 2) throw std::invalid_argument("distance resolution must be at least 2");
  const BoxGeometry& box = lab.geometry();
  const int d = box.dim();
  const int region = lab.region();
  MinDistanceResult out;
  out.resolution = k;
  out.resolution_error = 2.0 * box.edge_length() / k;
  out.macroscopic_count = macro.size();
  if (macro.size() < 2) return out;

  const VertexId nv = box.vertex_count();
  std::vector<std::int32_t> label(nv, -1);
  for (std::size_t i = 0; i < macro.size(); ++i)
    for (VertexId v : lab.members(macro[i])) label[v] = static_cast<std::int32_t>(i);

  std::unordered_map<EdgeId, Compressed> compressed;
  std::int32_t next_aux = nv;
  std::vector<std::int32_t> aux_label;
  for (VertexId v = 0; v < nv; ++v) {
    if (!box.in_box(v, region)) continue;
    for (int a = 0; a < d; ++a) {
      if (box.coordinate(v, a) >= region) continue;
      const VertexId w = v + box.stride(a);
      if (label[v] < 0 && label[w] < 0) continue;
      const EdgeId e = box.edge_id(v, a);
      if (edges.state(e) != EdgeState::Split) continue;
      const auto interior = sample_interior(edges, field, e, k);
      ++out.interiors_sampled;
      const auto runs = zero_structure(interior, edges.level());
      Compressed c;
      c.p1 = next_aux++;
      c.p2 = next_aux++;
      c.w0 = runs.front().last;
      c.w1 = runs.back().first - runs.front().last;
      c.w2 = k - runs.back().first;
      aux_label.push_back(label[v]);
      aux_label.push_back(label[w]);
      compressed.emplace(e, c);
    }
  }
  label.insert(label.end(), aux_label.begin(), aux_label.end());

  const std::size_t total = label.size();
  std::vector<std::int64_t> dist(total, kUnreached);
  std::vector<std::int32_t> owner(total, -1);
  using Item = std::tuple<std::int64_t, std::int32_t, std::int32_t>;  // dist, label, node
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t i = 0; i < total; ++i)
    if (label[i] >= 0) {
      dist[i] = 0;
      owner[i] = label[i];
      heap.emplace(0, label[i], static_cast<std::int32_t>(i));
    }

  std::vector<std::array<std::pair<std::int32_t, std::int64_t>, 2>> aux_nbrs(total - nv);
  for (const auto& [e, c] : compressed) {
    aux_nbrs[c.p1 - nv] = {{{box.edge_tail(e), c.w0}, {c.p2, c.w1}}};
    aux_nbrs[c.p2 - nv] = {{{c.p1, c.w1}, {box.edge_head(e), c.w2}}};
  }
  // Calls f(neighbor, weight) for every graph neighbor of node u.
  auto for_neighbors = [&](std::int32_t u, auto&& f) {
    if (u >= nv) {
      for (const auto& [x, w] : aux_nbrs[u - nv]) f(x, w);
      return;
    }
    for (int a = 0; a < d; ++a)
      for (int dir : {-1, 1}) {
        const VertexId w = box.neighbor(u, a, dir);
        if (w < 0 || !box.in_box(w, region)) continue;
        const EdgeId e = box.edge_id(dir > 0 ? u : w, a);
        if (auto it = compressed.find(e); it != compressed.end()) {
          if (dir > 0)
            f(it->second.p1, it->second.w0);
          else
            f(it->second.p2, it->second.w2);
        } else {
          f(w, k);
        }
      }
  };

  while (!heap.empty()) {
    const auto [du, lu, u] = heap.top();
    heap.pop();
    if (du != dist[u] || lu != owner[u]) continue;
    for_neighbors(u, [&](std::int32_t x, std::int64_t w) {
      const std::int64_t nd = du + w;
      if (nd < dist[x] || (nd == dist[x] && lu < owner[x])) {
        if (label[x] >= 0) return;  // sources keep their own cluster
        dist[x] = nd;
        owner[x] = lu;
        heap.emplace(nd, lu, x);
      }
    });
  }

  std::int64_t best = kUnreached;
  std::pair<std::int32_t, std::int32_t> pair{-1, -1};
  auto consider = [&](std::int32_t u, std::int32_t x, std::int64_t w) {
    if (owner[u] < 0 || owner[x] < 0 || owner[u] == owner[x]) return;
    const std::int64_t s = dist[u] + w + dist[x];
    const std::pair<std::int32_t, std::int32_t> p = std::minmax(owner[u], owner[x]);
    if (s < best || (s == best && p < pair)) {
      best = s;
      pair = p;
    }
  };
  for (std::size_t u = 0; u < total; ++u) {
    const auto uu = static_cast<std::int32_t>(u);
    if (uu < nv && !box.in_box(uu, region)) continue;
    for_neighbors(uu, [&](std::int32_t x, std::int64_t w) {
      if (x > uu) consider(uu, x, w);
    });
  }
  if (best == kUnreached) return out;
  out.steps = best;
  out.distance = static_cast<double>(best) * box.edge_length() / k;
  out.first = macro[pair.first];
  out.second = macro[pair.second];
  return out;
}

}  // namespace gffperc

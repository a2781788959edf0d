#include "gffperc/pivotal.hpp"

#include <algorithm>
#include <stdexcept>

namespace gffperc {

namespace {

void require_radius(const ClusterLabeling& lab, int n) {
  if (n < 0) throw std::invalid_argument("radius must be nonnegative");
  if (n > lab.region()) throw std::invalid_argument("radius exceeds the labeled region");
}

struct GraphEdge {
  std::int32_t a;
  std::int32_t b;
  EdgeId id;
};

}  // namespace

std::vector<EdgeId> pivotal_edges(const ClusterLabeling& lab, const OpenEdgeSet& edges, int n) {
  require_radius(lab, n);
  if (n == 0 || !one_arm_indicator(lab, n)) return {};
  const BoxGeometry& box = lab.geometry();
  const int d = box.dim();

  // Node 0 is the terminal standing for every cluster vertex on dB(N).
  constexpr std::int32_t kTerminal = 0;
  std::vector<std::int32_t> node(box.vertex_count(), -1);
  std::vector<VertexId> queue{box.origin()};
  std::vector<GraphEdge> graph;
  node[box.origin()] = 1;
  std::int32_t count = 2;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId u = queue[head];
    for (int a = 0; a < d; ++a)
      for (int dir : {-1, 1}) {
        const VertexId w = box.neighbor(u, a, dir);
        if (w < 0) continue;
        const EdgeId e = box.edge_id(dir > 0 ? u : w, a);
        if (edges.state(e) != EdgeState::OpenPositive) continue;
        const bool terminal = box.linf_norm(w) >= n;
        if (terminal) {
          graph.push_back({node[u], kTerminal, e});
          continue;
        }
        if (node[w] < 0) {
          node[w] = count++;
          queue.push_back(w);
        }
        // Each interior edge is seen from both ends; keep it once.
        if (dir > 0) graph.push_back({node[u], node[w], e});
      }
  }
  if (count == 2 && graph.empty()) return {};

  std::vector<std::int32_t> start(count + 1, 0);
  for (const auto& g : graph) {
    ++start[g.a + 1];
    ++start[g.b + 1];
  }
  for (std::int32_t i = 0; i < count; ++i) start[i + 1] += start[i];
  std::vector<std::pair<std::int32_t, std::int32_t>> adj(start.back());  // (neighbor, graph edge)
  {
    std::vector<std::int32_t> fill(start.begin(), start.end() - 1);
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(graph.size()); ++i) {
      adj[fill[graph[i].a]++] = {graph[i].b, i};
      adj[fill[graph[i].b]++] = {graph[i].a, i};
    }
  }

  struct Frame {
    std::int32_t v;
    std::int32_t via;  // graph edge used to enter v, -1 at the root
    std::int32_t next;
  };
  std::vector<std::int32_t> disc(count, -1), low(count, 0);
  std::vector<std::uint8_t> has_terminal(count, 0);
  has_terminal[kTerminal] = 1;
  std::vector<Frame> stack{{1, -1, start[1]}};
  disc[1] = low[1] = 0;
  std::int32_t clock = 1;
  std::vector<EdgeId> out;
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < start[f.v + 1]) {
      const auto [w, ge] = adj[f.next++];
      if (ge == f.via) continue;
      if (disc[w] < 0) {
        disc[w] = low[w] = clock++;
        stack.push_back({w, ge, start[w]});
      } else {
        low[f.v] = std::min(low[f.v], disc[w]);
      }
      continue;
    }
    const Frame done = f;
    stack.pop_back();
    if (stack.empty()) break;
    const std::int32_t p = stack.back().v;
    low[p] = std::min(low[p], low[done.v]);
    if (has_terminal[done.v]) {
      if (low[done.v] > disc[p]) out.push_back(graph[done.via].id);
      has_terminal[p] = 1;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EdgeId> pivotal_bruteforce(const OpenEdgeSet& edges, const FieldConfig& field, int n) {
  const BoxGeometry& box = field.geometry;
  if (n < 0 || n > edges.region()) throw std::invalid_argument("radius outside the sampled region");
  const VertexId origin = box.origin();
  if (n == 0 || field.values[origin] < edges.level()) return {};
  const int d = box.dim();

  std::vector<std::uint8_t> seen(box.vertex_count());
  auto reaches = [&](EdgeId removed) {
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<VertexId> queue{origin};
    seen[origin] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const VertexId u = queue[head];
      if (box.linf_norm(u) >= n) return true;
      for (int a = 0; a < d; ++a)
        for (int dir : {-1, 1}) {
          const VertexId w = box.neighbor(u, a, dir);
          if (w < 0 || seen[w]) continue;
          const EdgeId e = box.edge_id(dir > 0 ? u : w, a);
          if (e == removed || !edges.in_region(e) || edges.state(e) != EdgeState::OpenPositive)
            continue;
          seen[w] = 1;
          queue.push_back(w);
        }
    }
    return false;
  };

  if (!reaches(-1)) return {};
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < box.edge_slot_count(); ++e) {
    if (!edges.in_region(e) || edges.state(e) != EdgeState::OpenPositive) continue;
    if (!reaches(e)) out.push_back(e);
  }
  return out;
}

HeterochromaticCensus heterochromatic_census(const ClusterLabeling& lab, int n, double delta) {
  return heterochromatic_census(lab, macroscopic_clusters(lab, n, delta));
}

HeterochromaticCensus heterochromatic_census(const ClusterLabeling& lab,
                                             const std::vector<ClusterRef>& macro) {
  HeterochromaticCensus out;
  if (macro.size() < 2) return out;
  const BoxGeometry& box = lab.geometry();
  const int d = box.dim();
  std::vector<std::int32_t> label(box.vertex_count(), -1);
  for (std::size_t i = 0; i < macro.size(); ++i)
    for (VertexId v : lab.members(macro[i])) label[v] = static_cast<std::int32_t>(i);
  for (VertexId v = 0; v < box.vertex_count(); ++v) {
    if (label[v] < 0) continue;
    for (int a = 0; a < d; ++a) {
      const VertexId w = box.neighbor(v, a, 1);
      if (w < 0 || label[w] < 0 || label[w] == label[v]) continue;
      out.edges.push_back(box.edge_id(v, a));
      if (macro[label[v]].sign == macro[label[w]].sign)
        ++out.same_sign;
      else
        ++out.opposite_sign;
    }
  }
  return out;
}

bool two_arm_indicator(const ClusterLabeling& lab, VertexId v, VertexId w, int n) {
  require_radius(lab, n);
  const BoxGeometry& box = lab.geometry();
  if (!box.in_box(v, n) || !box.in_box(w, n)) throw std::invalid_argument("points outside B(N)");
  if (v == w) return false;
  const VertexId rp = lab.root(v, Sign::Positive);
  const VertexId rn = lab.root(w, Sign::Negative);
  if (rp < 0 || rn < 0) return false;
  return lab.info({rp, Sign::Positive}).max_norm >= n &&
         lab.info({rn, Sign::Negative}).max_norm >= n;
}

PivotalReport pivotal_report(const ClusterLabeling& lab, const OpenEdgeSet& edges, int n,
                             double delta, std::uint64_t replica) {
  PivotalReport r;
  r.replica = replica;
  r.one_arm = one_arm_indicator(lab, n);
  if (r.one_arm) r.pivotal = pivotal_edges(lab, edges, n);
  r.heterochromatic = heterochromatic_census(lab, n, delta);
  return r;
}

}  // namespace gffperc

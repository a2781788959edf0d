#pragma once

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "gffperc/gff.hpp"
#include "gffperc/lattice.hpp"
#include "gffperc/metric_edges.hpp"

namespace gffperc {

enum class Sign : std::int8_t { Negative = -1, Positive = 1 };

/// A sign cluster, named by its union-find root.
struct ClusterRef {
  VertexId root = -1;
  Sign sign = Sign::Positive;

  friend bool operator==(const ClusterRef&, const ClusterRef&) = default;
  friend auto operator<=>(const ClusterRef& a, const ClusterRef& b) {
    if (auto c = a.root <=> b.root; c != 0) return c;
    return a.sign <=> b.sign;
  }
};

struct ClusterInfo {
  ClusterRef ref;
  VertexId size = 0;
  /// Smallest and largest |x|_inf over the cluster's lattice vertices.
  int min_norm = 0;
  int max_norm = 0;
  bool contains_origin = false;
};

/// Partition of the labeled region's vertices into positive clusters (open
/// positive edges, values >= level) and negative clusters (open negative
/// edges, values <= level). Vertices at the level itself (the absorbing set)
/// sit in both as singletons. Caches are filled lazily, so a labeling must
/// not be shared across threads.
class ClusterLabeling {
 public:
  ClusterLabeling(const OpenEdgeSet& edges, const FieldConfig& field);

  const BoxGeometry& geometry() const { return box_; }
  int region() const { return region_; }
  double level() const { return level_; }
  bool in_region(VertexId v) const { return box_.in_box(v, region_); }

  /// Root of v in the level set of sign s, or -1 if v is not in that set.
  VertexId root(VertexId v, Sign s) const;
  /// Cluster of v for the sign of its value; level-valued vertices report
  /// their positive singleton.
  ClusterRef cluster_of(VertexId v) const;
  bool in_level_set(VertexId v, Sign s) const;

  const ClusterInfo& info(const ClusterRef& c) const;
  const std::vector<ClusterInfo>& clusters(Sign s) const {
    return s == Sign::Positive ? pos_info_ : neg_info_;
  }
  const std::vector<VertexId>& members(const ClusterRef& c) const;

  /// Largest Euclidean distance between two lattice vertices of c.
  double diameter(const ClusterRef& c) const;
  bool diameter_at_least(const ClusterRef& c, double threshold) const;

 private:
  struct SignData {
    std::vector<VertexId> root;    // by local index, global root id or -1
    std::vector<std::int32_t> slot;  // by local index of a root
    // Member lists, CSR by slot; built on first use.
    std::vector<std::int64_t> offsets;
    std::vector<VertexId> flat;
    std::vector<std::vector<VertexId>> lists;
  };

  std::int32_t local(VertexId v) const;
  const SignData& data(Sign s) const { return s == Sign::Positive ? pos_ : neg_; }
  void build_members(Sign s) const;
  double exact_diameter(const std::vector<VertexId>& members, double stop_at) const;

  BoxGeometry box_;
  int region_;
  double level_;
  std::vector<double> values_;  // region-local copy of the field
  mutable SignData pos_;
  mutable SignData neg_;
  std::vector<ClusterInfo> pos_info_;
  std::vector<ClusterInfo> neg_info_;
  mutable std::unordered_map<std::int64_t, double> diameter_cache_;
};

ClusterLabeling label_clusters(const OpenEdgeSet& edges, const FieldConfig& field);

/// {0 <-> dB(N)} in the nonnegative level set.
bool one_arm_indicator(const ClusterLabeling& lab, int n);
/// Same event for the nonpositive level set.
bool one_arm_indicator_negative(const ClusterLabeling& lab, int n);

/// {B(n) <-> dB(N)} in the nonnegative level set.
bool crossing_indicator(const ClusterLabeling& lab, int inner, int outer);

/// Sign clusters contained in the metric box of radius N (all lattice
/// vertices in B(N-1)) whose Euclidean diameter is at least delta * N.
std::vector<ClusterRef> macroscopic_clusters(const ClusterLabeling& lab, int n, double delta);

struct MinDistanceResult {
  /// Distance in units of d / k; -1 when fewer than two clusters qualify.
  std::int64_t steps = -1;
  double distance = std::numeric_limits<double>::infinity();
  ClusterRef first;
  ClusterRef second;
  int resolution = 0;
  /// Upper bound on the overestimate caused by the resolution, per edge.
  double resolution_error = 0.0;
  std::size_t macroscopic_count = 0;
  std::size_t interiors_sampled = 0;

  bool finite() const { return steps >= 0; }
};

/// Minimal metric-graph distance between distinct macroscopic clusters,
/// discretized at resolution d / k. Paths are confined to the labeled region.
MinDistanceResult min_distance(const ClusterLabeling& lab, const OpenEdgeSet& edges,
                               const FieldConfig& field, int n, double delta, int k);
MinDistanceResult min_distance(const ClusterLabeling& lab, const OpenEdgeSet& edges,
                               const FieldConfig& field, const std::vector<ClusterRef>& macro,
                               int k);

}  // namespace gffperc

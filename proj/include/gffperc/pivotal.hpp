#pragma once

#include <cstdint>
#include <vector>

#include "gffperc/clusters.hpp"
#include "gffperc/gff.hpp"
#include "gffperc/metric_edges.hpp"

namespace gffperc {

/// Open-positive edges whose removal disconnects the origin from dB(N) in
/// the nonnegative level set. Sorted by edge id; empty when the one-arm
/// event fails.
std::vector<EdgeId> pivotal_edges(const ClusterLabeling& lab, const OpenEdgeSet& edges, int n);

/// Same set by deleting each open-positive edge and searching again. Slow;
/// meant for checking.
std::vector<EdgeId> pivotal_bruteforce(const OpenEdgeSet& edges, const FieldConfig& field, int n);

struct HeterochromaticCensus {
  /// Edges whose endpoints lie in two distinct macroscopic clusters.
  std::vector<EdgeId> edges;
  std::int64_t same_sign = 0;
  std::int64_t opposite_sign = 0;

  std::int64_t total() const { return same_sign + opposite_sign; }
};

HeterochromaticCensus heterochromatic_census(const ClusterLabeling& lab, int n, double delta);
HeterochromaticCensus heterochromatic_census(const ClusterLabeling& lab,
                                             const std::vector<ClusterRef>& macro);

/// v reaches dB(N) in the nonnegative set and w reaches it in the
/// nonpositive set.
bool two_arm_indicator(const ClusterLabeling& lab, VertexId v, VertexId w, int n);

struct PivotalReport {
  std::uint64_t replica = 0;
  bool one_arm = false;
  std::vector<EdgeId> pivotal;
  HeterochromaticCensus heterochromatic;

  std::int64_t pivotal_count() const { return static_cast<std::int64_t>(pivotal.size()); }
};

PivotalReport pivotal_report(const ClusterLabeling& lab, const OpenEdgeSet& edges, int n,
                             double delta, std::uint64_t replica = 0);

}  // namespace gffperc

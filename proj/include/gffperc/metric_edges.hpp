#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gffperc/gff.hpp"
#include "gffperc/lattice.hpp"
#include "gffperc/rng.hpp"

namespace gffperc {

enum class EdgeState : std::uint8_t {
  Split = 0,
  OpenPositive = 1,
  OpenNegative = 2,
};

/// Probability that a Brownian bridge with variance rate 2, running from a to
/// b over duration L, never touches zero: 1 - exp(-a b / L) when a and b have
/// the same strict sign, zero otherwise.
double edge_open_probability(double a, double b, double length);

/// Coarse state of one edge from a single uniform draw of its own stream.
EdgeState edge_state_from_uniform(double a, double b, double length, double level, double u);

struct EdgeOptions {
  /// Level h of the sets {phi >= h} and {phi <= h}.
  double level = 0.0;
  /// Only edges with both endpoints in B(region) are sampled; -1 means the
  /// whole domain.
  int region = -1;
};

/// Open/split state of every edge of a field's metric graph.
class OpenEdgeSet {
 public:
  OpenEdgeSet(const BoxGeometry& box, StreamKey key, EdgeOptions options);

  const BoxGeometry& geometry() const { return box_; }
  /// Stream from which each edge's substream is derived.
  const StreamKey& key() const { return key_; }
  double level() const { return options_.level; }
  int region() const { return options_.region; }

  EdgeState state(EdgeId e) const { return static_cast<EdgeState>(states_[e]); }
  void set_state(EdgeId e, EdgeState s) { states_[e] = static_cast<std::uint8_t>(s); }
  /// Edge lies inside the sampled region.
  bool in_region(EdgeId e) const;

  std::int64_t count(EdgeState s) const;

 private:
  BoxGeometry box_;
  StreamKey key_;
  EdgeOptions options_;
  std::vector<std::uint8_t> states_;
};

/// Substream feeding edge e: first draw decides the coarse state, the rest
/// generate interior samples on demand.
inline StreamKey edge_stream(const StreamKey& edges_key, EdgeId e) {
  return edges_key.child(static_cast<std::uint64_t>(e));
}

/// Independent edge assignment given endpoint values. Edge substreams derive
/// from the field's replica key.
OpenEdgeSet open_edges(const FieldConfig& field, EdgeOptions options = {});
OpenEdgeSet open_edges(const FieldConfig& field, StreamKey key, EdgeOptions options = {});

/// Variance-rate-2 bridge from a to b on [0, L] observed at jL/k for
/// j = 1..k-1, generated by sequential conditional Gaussians.
std::vector<double> sample_bridge_points(double a, double b, double length, int k, Rng& rng);

/// Bridge samples at k + 1 nodes (both endpoints included). touches[j] marks
/// a sub-segment whose endpoints share a sign but whose path reaches the
/// level in between.
struct EdgeInterior {
  EdgeId edge = -1;
  int resolution = 0;
  std::vector<double> nodes;
  std::vector<std::uint8_t> touches;
};

/// Interior samples of edge e conditioned on its coarse state, deterministic
/// in the edge's substream.
EdgeInterior sample_interior(const OpenEdgeSet& edges, const FieldConfig& field, EdgeId e, int k);

/// Maximal run of nodes with one sign relative to the level, connected along
/// the edge (no touching sub-segment inside).
struct SignRun {
  int sign = 0;
  int first = 0;
  int last = 0;
};

std::vector<SignRun> zero_structure(std::span<const double> nodes,
                                    std::span<const std::uint8_t> touches = {},
                                    double level = 0.0);
std::vector<SignRun> zero_structure(const EdgeInterior& interior, double level = 0.0);

// Interior dump: three little-endian u64 (d, side, count), a u64 with the
// number of values per edge, count u64 edge ids, then the f64 node values.
void write_interior_dump(const std::filesystem::path& path, const BoxGeometry& box,
                         const std::vector<EdgeInterior>& interiors);

}  // namespace gffperc

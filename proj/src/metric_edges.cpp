#include "gffperc/metric_edges.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace gffperc {

namespace {

int sign_of(double v, double level) { return v > level ? 1 : (v < level ? -1 : 0); }

// Touch probabilities below exp(-kTouchCutoff) are treated as zero.
constexpr double kTouchCutoff = 40.0;
constexpr int kMaxInteriorAttempts = 100000000;

}  // namespace

double edge_open_probability(double a, double b, double length) {
  if (!(length > 0.0)) throw std::invalid_argument("edge length must be positive");
  const double ab = a * b;
  if (ab <= 0.0) return 0.0;
  return -std::expm1(-ab / length);
}

EdgeState edge_state_from_uniform(double a, double b, double length, double level, double u) {
  const double x = a - level;
  const double y = b - level;
  if (x * y <= 0.0) return EdgeState::Split;
  if (u < edge_open_probability(x, y, length))
    return x > 0.0 ? EdgeState::OpenPositive : EdgeState::OpenNegative;
  return EdgeState::Split;
}

OpenEdgeSet::OpenEdgeSet(const BoxGeometry& box, StreamKey key, EdgeOptions options)
    : box_(box), key_(key), options_(options), states_(box.edge_slot_count(), 0) {
  if (options_.region < 0 || options_.region > box.domain_radius())
    options_.region = box.domain_radius();
}

bool OpenEdgeSet::in_region(EdgeId e) const {
  if (!box_.edge_valid(e)) return false;
  return box_.in_box(box_.edge_tail(e), options_.region) &&
         box_.in_box(box_.edge_head(e), options_.region);
}

std::int64_t OpenEdgeSet::count(EdgeState s) const {
  std::int64_t c = 0;
  for (EdgeId e = 0; e < box_.edge_slot_count(); ++e)
    if (in_region(e) && state(e) == s) ++c;
  return c;
}

OpenEdgeSet open_edges(const FieldConfig& field, EdgeOptions options) {
  return open_edges(field, child(field.key, StreamTag::Edges), options);
}

OpenEdgeSet open_edges(const FieldConfig& field, StreamKey key, EdgeOptions options) {
  const BoxGeometry& box = field.geometry;
  OpenEdgeSet out(box, key, options);
  const int region = out.region();
  const double length = box.edge_length();
  const double level = out.level();
  const int d = box.dim();
  for (VertexId v = 0; v < box.vertex_count(); ++v) {
    if (!box.in_box(v, region)) continue;
    const double a = field.values[v] - level;
    for (int axis = 0; axis < d; ++axis) {
      if (box.coordinate(v, axis) >= region) continue;
      const VertexId w = v + box.stride(axis);
      if (!box.in_box(w, region)) continue;
      const double b = field.values[w] - level;
      if (a * b <= 0.0) continue;  // split regardless of the draw
      const EdgeId e = box.edge_id(v, axis);
      Rng rng(edge_stream(key, e));
      out.set_state(e, edge_state_from_uniform(a, b, length, 0.0, rng.uniform()));
    }
  }
  return out;
}

std::vector<double> sample_bridge_points(double a, double b, double length, int k, Rng& rng) {
  if (k < 2) throw std::invalid_argument("bridge resolution must be at least 2");
  if (!(length > 0.0)) throw std::invalid_argument("bridge length must be positive");
  std::normal_distribution<double> normal;
  std::vector<double> out(k - 1);
  const double step = length / k;
  double x = a;
  for (int j = 1; j < k; ++j) {
    const double remaining = length * (k - j + 1) / k;
    const double mean = x + (b - x) * step / remaining;
    const double var = 2.0 * step * (remaining - step) / remaining;
    x = mean + std::sqrt(var) * normal(rng);
    out[j - 1] = x;
  }
  return out;
}

EdgeInterior sample_interior(const OpenEdgeSet& edges, const FieldConfig& field, EdgeId e, int k) {
  const BoxGeometry& box = field.geometry;
  if (!box.edge_valid(e)) throw std::out_of_range("edge outside domain");
  if (k < 2) throw std::invalid_argument("interior resolution must be at least 2");
  const double level = edges.level();
  const double length = box.edge_length();
  const double a = field.values[box.edge_tail(e)];
  const double b = field.values[box.edge_head(e)];

  Rng rng(edge_stream(edges.key(), e));
  const double u = rng.uniform();
  const EdgeState coarse =
      edges.in_region(e) ? edges.state(e) : edge_state_from_uniform(a, b, length, level, u);
  const bool want_open = coarse != EdgeState::Split;

  EdgeInterior out{e, k, std::vector<double>(k + 1), std::vector<std::uint8_t>(k, 0)};
  out.nodes.front() = a;
  out.nodes.back() = b;
  const double sub = length / k;
  const int end_sign = sign_of(a, level);
  for (int attempt = 0; attempt < kMaxInteriorAttempts; ++attempt) {
    const auto pts = sample_bridge_points(a, b, length, k, rng);
    std::copy(pts.begin(), pts.end(), out.nodes.begin() + 1);
    bool open = end_sign != 0 && sign_of(b, level) == end_sign;
    for (int j = 0; j < k; ++j) {
      const double x = out.nodes[j] - level;
      const double y = out.nodes[j + 1] - level;
      out.touches[j] = 0;
      if (x * y > 0.0) {
        const double r = x * y / sub;
        if (r < kTouchCutoff && rng.uniform() < std::exp(-r)) out.touches[j] = 1;
      }
      if (out.touches[j] || sign_of(out.nodes[j + 1], level) != end_sign) open = false;
    }
    if (open == want_open) return out;
  }
  throw std::runtime_error("interior sampling did not match the edge state");
}

std::vector<SignRun> zero_structure(std::span<const double> nodes,
                                    std::span<const std::uint8_t> touches, double level) {
  std::vector<SignRun> runs;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const int s = sign_of(nodes[j], level);
    const bool touch = j > 0 && j - 1 < touches.size() && touches[j - 1];
    if (runs.empty() || runs.back().sign != s || touch)
      runs.push_back({s, static_cast<int>(j), static_cast<int>(j)});
    else
      runs.back().last = static_cast<int>(j);
  }
  return runs;
}

std::vector<SignRun> zero_structure(const EdgeInterior& interior, double level) {
  return zero_structure(interior.nodes, interior.touches, level);
}

void write_interior_dump(const std::filesystem::path& path, const BoxGeometry& box,
                         const std::vector<EdgeInterior>& interiors) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  auto put = [&](std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(bytes, 8);
  };
  const std::uint64_t per = interiors.empty() ? 0 : interiors.front().nodes.size();
  put(static_cast<std::uint64_t>(box.dim()));
  put(static_cast<std::uint64_t>(box.side()));
  put(interiors.size());
  put(per);
  for (const auto& it : interiors) put(static_cast<std::uint64_t>(it.edge));
  for (const auto& it : interiors) {
    if (it.nodes.size() != per) throw std::invalid_argument("interior dump mixes resolutions");
    for (double v : it.nodes) put(std::bit_cast<std::uint64_t>(v));
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace gffperc

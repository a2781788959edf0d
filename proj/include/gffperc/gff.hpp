#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "gffperc/lattice.hpp"
#include "gffperc/potential.hpp"
#include "gffperc/rng.hpp"

namespace gffperc {

/// One discrete GFF sample on the domain, zero on the absorbing set.
struct FieldConfig {
  BoxGeometry geometry;
  std::shared_ptr<const std::vector<std::uint8_t>> absorbing_mask;
  std::vector<double> values;
  /// Replica stream the sample was drawn from; edge streams derive from it.
  StreamKey key;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;

  bool is_absorbing(VertexId v) const { return (*absorbing_mask)[v] != 0; }
  double operator[](VertexId v) const { return values[v]; }
  FieldConfig negated() const;
};

/// Key of replica `replica` under master seed `seed`.
inline StreamKey replica_key(std::uint64_t seed, std::uint64_t replica) {
  return child(StreamKey::root(seed), StreamTag::Replica).child(replica);
}

/// Exact sampler of the centered Gaussian vector with covariance G_D.
class FieldSampler {
 public:
  virtual ~FieldSampler() = default;

  virtual const BoxGeometry& geometry() const = 0;
  const VertexSet& absorbing() const { return absorbing_; }

  FieldConfig sample(std::uint64_t seed, std::uint64_t replica) const;
  FieldConfig sample(const StreamKey& replica_stream) const;

 protected:
  FieldSampler(const BoxGeometry& box, VertexSet absorbing);
  virtual void fill(Rng& rng, std::vector<double>& values) const = 0;

 private:
  VertexSet absorbing_;
  std::shared_ptr<const std::vector<std::uint8_t>> mask_;
};

/// Sampler for the cube with only its outer shell absorbing: product-sine
/// eigenbasis of I - P, evaluated with a d-dimensional DST-I.
class SpectralSampler final : public FieldSampler {
 public:
  explicit SpectralSampler(const BoxGeometry& box);
  ~SpectralSampler() override;

  const BoxGeometry& geometry() const override { return box_; }

 private:
  void fill(Rng& rng, std::vector<double>& values) const override;

  struct Plan;
  BoxGeometry box_;
  std::unique_ptr<Plan> plan_;
  std::vector<double> mode_scale_;
};

/// Sampler for an arbitrary absorbing set: solves L^T x = z with the sparse
/// Cholesky factor of the precision matrix I - P_D.
class FactorSampler final : public FieldSampler {
 public:
  FactorSampler(const BoxGeometry& box, const VertexSet& absorbing);
  ~FactorSampler() override;

  const BoxGeometry& geometry() const override;

 private:
  void fill(Rng& rng, std::vector<double>& values) const override;

  std::shared_ptr<const detail::KilledSystem> system_;
};

/// Picks the spectral sampler when D is exactly the shell.
std::unique_ptr<FieldSampler> make_sampler(const BoxGeometry& box, const VertexSet& absorbing);

FieldConfig sample_dgff(const BoxGeometry& box, const VertexSet& absorbing,
                        std::uint64_t seed, std::uint64_t replica);

struct CovarianceRow {
  VertexId x = 0;
  VertexId y = 0;
  double empirical = 0.0;
  double exact = 0.0;
  double z_score = 0.0;
};

/// Empirical covariance (mean known to be zero) against G_D, studentized by
/// the sample standard error of the products.
std::vector<CovarianceRow> covariance_diagnostic(
    const std::vector<FieldConfig>& samples,
    const std::vector<std::pair<VertexId, VertexId>>& pairs, const GreenOperator& green);

// Raw dump: three little-endian u64 (d, side, count), then count blocks of
// side^d little-endian f64 in row-major vertex order.
struct FieldDump {
  int dim = 0;
  int side = 0;
  std::vector<std::vector<double>> fields;
};

void write_field_dump(const std::filesystem::path& path, const std::vector<FieldConfig>& fields);
FieldDump read_field_dump(const std::filesystem::path& path);

}  // namespace gffperc

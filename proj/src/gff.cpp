#include "gffperc/gff.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "killed_system.hpp"

namespace gffperc {

FieldConfig FieldConfig::negated() const {
  FieldConfig out = *this;
  for (double& v : out.values) v = -v;
  return out;
}

FieldSampler::FieldSampler(const BoxGeometry& box, VertexSet absorbing)
    : absorbing_(set_union(absorbing, box.shell())),
      mask_(std::make_shared<const std::vector<std::uint8_t>>(to_mask(box, absorbing_))) {}

FieldConfig FieldSampler::sample(std::uint64_t seed, std::uint64_t replica) const {
  FieldConfig f = sample(replica_key(seed, replica));
  f.seed = seed;
  f.replica = replica;
  return f;
}

FieldConfig FieldSampler::sample(const StreamKey& replica_stream) const {
  FieldConfig f{geometry(), mask_, std::vector<double>(geometry().vertex_count(), 0.0),
                replica_stream, 0, 0};
  Rng rng(child(replica_stream, StreamTag::Field));
  fill(rng, f.values);
  return f;
}

namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_real(n)) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* data;
};

}  // namespace

struct SpectralSampler::Plan {
  fftw_plan plan = nullptr;
  std::size_t size = 0;
  ~Plan() {
    if (plan) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

SpectralSampler::SpectralSampler(const BoxGeometry& box)
    : FieldSampler(box, box.shell()), box_(box), plan_(std::make_unique<Plan>()) {
  const int d = box.dim();
  const int n = box.side() - 2;  // interior points per axis
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
  plan_->size = total;

  // Eigenpairs of I - P: lambda_m = 1 - (1/d) sum_i cos(pi m_i / (n + 1)).
  // phi = sum_m z_m lambda_m^{-1/2} psi_m, psi_m(j) = prod_i sqrt(2/(n+1)) sin(.)
  // and FFTW's RODFT00 carries a factor 2 per axis.
  std::vector<double> axis_cos(n);
  for (int m = 0; m < n; ++m) axis_cos[m] = std::cos(std::numbers::pi * (m + 1) / (n + 1));
  const double norm = std::pow(std::sqrt(2.0 / (n + 1)) / 2.0, d);
  mode_scale_.resize(total);
  std::vector<int> idx(d, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += axis_cos[idx[i]];
    const double lambda = 1.0 - s / d;
    mode_scale_[flat] = norm / std::sqrt(lambda);
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
  }

  FftwBuffer scratch(total);
  std::vector<int> dims(d, n);
  std::vector<fftw_r2r_kind> kinds(d, FFTW_RODFT00);
  std::lock_guard lock(planner_mutex());
  // FFTW_ESTIMATE keeps the algorithm choice, and hence the rounding, fixed.
  plan_->plan = fftw_plan_r2r(d, dims.data(), scratch.data, scratch.data, kinds.data(),
                              FFTW_ESTIMATE);
  if (!plan_->plan) throw std::runtime_error("FFTW could not plan the sine transform");
}

SpectralSampler::~SpectralSampler() = default;

void SpectralSampler::fill(Rng& rng, std::vector<double>& values) const {
  const std::size_t total = plan_->size;
  FftwBuffer buf(total);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < total; ++i) buf.data[i] = normal(rng) * mode_scale_[i];
  fftw_execute_r2r(plan_->plan, buf.data, buf.data);

  const int d = box_.dim();
  const int n = box_.side() - 2;
  // Interior row-major index -> domain index: shift every coordinate by one.
  VertexId offset = 0;
  for (int i = 0; i < d; ++i) offset += box_.stride(i);
  std::vector<int> idx(d, 0);
  for (std::size_t flat = 0; flat < total;) {
    // Innermost axis is contiguous in both layouts.
    VertexId v = offset;
    for (int i = 0; i < d - 1; ++i) v += idx[i] * box_.stride(i);
    for (int j = 0; j < n; ++j) values[v + j] = buf.data[flat + j];
    flat += n;
    for (int i = d - 2; i >= 0; --i) {
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
  }
}

FactorSampler::FactorSampler(const BoxGeometry& box, const VertexSet& absorbing)
    : FieldSampler(box, absorbing) {
  SolverOptions opts;
  opts.direct_limit = std::numeric_limits<std::int64_t>::max();
  system_ = std::make_shared<detail::KilledSystem>(box, this->absorbing(), opts);
}

FactorSampler::~FactorSampler() = default;

const BoxGeometry& FactorSampler::geometry() const { return system_->box(); }

void FactorSampler::fill(Rng& rng, std::vector<double>& values) const {
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(system_->free_count());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  const Eigen::VectorXd x = system_->sample_from_normals(z);
  const auto& free = system_->free_vertices();
  for (std::size_t i = 0; i < free.size(); ++i) values[free[i]] = x[static_cast<Eigen::Index>(i)];
}

std::unique_ptr<FieldSampler> make_sampler(const BoxGeometry& box, const VertexSet& absorbing) {
  const VertexSet shell = box.shell();
  if (set_union(absorbing, shell) == shell) return std::make_unique<SpectralSampler>(box);
  return std::make_unique<FactorSampler>(box, absorbing);
}

FieldConfig sample_dgff(const BoxGeometry& box, const VertexSet& absorbing,
                        std::uint64_t seed, std::uint64_t replica) {
  return make_sampler(box, absorbing)->sample(seed, replica);
}

std::vector<CovarianceRow> covariance_diagnostic(
    const std::vector<FieldConfig>& samples,
    const std::vector<std::pair<VertexId, VertexId>>& pairs, const GreenOperator& green) {
  if (samples.size() < 2) throw std::invalid_argument("covariance needs at least two samples");
  const double n = static_cast<double>(samples.size());
  std::vector<CovarianceRow> rows;
  rows.reserve(pairs.size());
  for (const auto& [x, y] : pairs) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& f : samples) {
      const double p = f.values[x] * f.values[y];
      sum += p;
      sum_sq += p * p;
    }
    CovarianceRow row{x, y, sum / n, green(x, y), 0.0};
    const double var = std::max(0.0, (sum_sq / n - row.empirical * row.empirical) * n / (n - 1));
    const double se = std::sqrt(var / n);
    if (se > 0.0) row.z_score = (row.empirical - row.exact) / se;
    rows.push_back(row);
  }
  return rows;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char bytes[8];
  is.read(reinterpret_cast<char*>(bytes), 8);
  if (!is) throw std::runtime_error("truncated field dump");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_field_dump(const std::filesystem::path& path, const std::vector<FieldConfig>& fields) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const int d = fields.empty() ? 0 : fields.front().geometry.dim();
  const int side = fields.empty() ? 0 : fields.front().geometry.side();
  put_u64(os, static_cast<std::uint64_t>(d));
  put_u64(os, static_cast<std::uint64_t>(side));
  put_u64(os, fields.size());
  for (const auto& f : fields) {
    if (f.geometry.dim() != d || f.geometry.side() != side)
      throw std::invalid_argument("field dump mixes geometries");
    for (double v : f.values) put_u64(os, std::bit_cast<std::uint64_t>(v));
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

FieldDump read_field_dump(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  FieldDump dump;
  dump.dim = static_cast<int>(get_u64(is));
  dump.side = static_cast<int>(get_u64(is));
  const std::uint64_t count = get_u64(is);
  std::uint64_t per = 1;
  for (int i = 0; i < dump.dim; ++i) per *= static_cast<std::uint64_t>(dump.side);
  dump.fields.resize(count);
  for (auto& f : dump.fields) {
    f.resize(per);
    for (auto& v : f) v = std::bit_cast<double>(get_u64(is));
  }
  return dump;
}

}  // namespace gffperc

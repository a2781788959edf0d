#include "gffperc/potential.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "killed_system.hpp"

namespace gffperc {
namespace detail {

KilledSystem::KilledSystem(const BoxGeometry& box, VertexSet absorbing,
                           const SolverOptions& options)
    : box_(box), absorbing_(set_union(absorbing, box.shell())), options_(options) {
  free_index_.assign(box_.vertex_count(), -1);
  const auto mask = to_mask(box_, absorbing_);
  for (VertexId v = 0; v < box_.vertex_count(); ++v) {
    if (mask[v]) continue;
    free_index_[v] = static_cast<std::int32_t>(free_vertices_.size());
    free_vertices_.push_back(v);
  }
  if (free_vertices_.empty())
    throw SolverError("killed system is empty: every vertex is absorbing");

  const double hop = 1.0 / (2.0 * box_.dim());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(free_vertices_.size() * (2 * box_.dim() + 1));
  for (std::size_t i = 0; i < free_vertices_.size(); ++i) {
    const VertexId v = free_vertices_[i];
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
    for (int axis = 0; axis < box_.dim(); ++axis)
      for (int dir : {-1, 1}) {
        const VertexId w = box_.neighbor(v, axis, dir);
        if (w >= 0 && free_index_[w] >= 0)
          triplets.emplace_back(static_cast<int>(i), free_index_[w], -hop);
      }
  }
  const auto n = static_cast<Eigen::Index>(free_vertices_.size());
  matrix_.resize(n, n);
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();

  if (n <= options_.direct_limit) {
    llt_.emplace();
    llt_->compute(matrix_);
    if (llt_->info() != Eigen::Success)
      throw SolverError("sparse Cholesky factorization failed");
  }
}

Eigen::VectorXd KilledSystem::solve(const Eigen::VectorXd& rhs) const {
  if (llt_) return llt_->solve(rhs);
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(options_.cg_tolerance);
  cg.setMaxIterations(options_.cg_max_iterations);
  cg.compute(matrix_);
  Eigen::VectorXd x = cg.solve(rhs);
  if (cg.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "conjugate gradient did not converge: relative residual " << cg.error()
        << " after " << cg.iterations() << " iterations";
    throw SolverError(msg.str());
  }
  return x;
}

std::shared_ptr<const Eigen::VectorXd> KilledSystem::column(VertexId y) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(y); it != cache_.end()) return it->second;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(free_count());
  rhs[free_index_[y]] = 1.0;
  auto col = std::make_shared<const Eigen::VectorXd>(solve(rhs));
  std::lock_guard lock(cache_mutex_);
  if (cache_.emplace(y, col).second) {
    cache_order_.push_back(y);
    while (cache_order_.size() > std::max<std::size_t>(options_.column_cache, 1)) {
      cache_.erase(cache_order_.front());
      cache_order_.pop_front();
    }
  }
  return col;
}

Eigen::VectorXd KilledSystem::sample_from_normals(const Eigen::VectorXd& z) const {
  if (!llt_) throw SolverError("factor sampling needs a direct factorization");
  Eigen::VectorXd y = llt_->matrixU().solve(z);
  return llt_->permutationPinv() * y;
}

}  // namespace detail

GreenOperator::GreenOperator(const BoxGeometry& box, const VertexSet& absorbing,
                             const SolverOptions& options)
    : system_(std::make_shared<detail::KilledSystem>(box, absorbing, options)) {}

const BoxGeometry& GreenOperator::geometry() const { return system_->box(); }
const VertexSet& GreenOperator::absorbing() const { return system_->absorbing(); }
bool GreenOperator::is_absorbing(VertexId v) const { return system_->is_absorbing(v); }
std::int64_t GreenOperator::free_count() const { return system_->free_count(); }
bool GreenOperator::uses_direct_solver() const { return system_->direct(); }

double GreenOperator::operator()(VertexId x, VertexId y) const {
  const auto& box = system_->box();
  if (x < 0 || y < 0 || x >= box.vertex_count() || y >= box.vertex_count())
    throw std::out_of_range("vertex index");
  if (system_->is_absorbing(x) || system_->is_absorbing(y)) return 0.0;
  return (*system_->column(y))[system_->free_index(x)];
}

std::vector<double> GreenOperator::column(VertexId y) const {
  const auto& box = system_->box();
  std::vector<double> out(box.vertex_count(), 0.0);
  if (system_->is_absorbing(y)) return out;
  const auto col = system_->column(y);
  const auto& free = system_->free_vertices();
  for (std::size_t i = 0; i < free.size(); ++i) out[free[i]] = (*col)[static_cast<Eigen::Index>(i)];
  return out;
}

GreenOperator killed_green(const BoxGeometry& box, const VertexSet& absorbing,
                           const SolverOptions& options) {
  return GreenOperator(box, absorbing, options);
}

double hitting_probability(const GreenOperator& g, VertexId v, VertexId w) {
  if (g.is_absorbing(w))
    throw std::invalid_argument("hitting target lies in the absorbing set");
  if (g.is_absorbing(v)) return 0.0;
  if (v == w) return 1.0;
  return std::clamp(g(v, w) / g(w, w), 0.0, 1.0);
}

CapacityResult capacity(const BoxGeometry& box, const VertexSet& a,
                        const VertexSet& outer, const SolverOptions& options) {
  if (a.empty()) throw std::invalid_argument("capacity of an empty set");
  const VertexSet killing = set_union(outer, box.shell());
  for (VertexId v : a)
    if (set_contains(killing, v))
      throw std::invalid_argument("set overlaps the absorbing set");

  // h(x) = P_x(tau_A < tau_D): harmonic off A u D, one on A, zero on D.
  const detail::KilledSystem harmonic(box, set_union(killing, a), options);
  const auto in_a = to_mask(box, a);
  const double hop = 1.0 / (2.0 * box.dim());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(harmonic.free_count());
  for (std::size_t i = 0; i < harmonic.free_vertices().size(); ++i) {
    const VertexId v = harmonic.free_vertices()[i];
    for (int axis = 0; axis < box.dim(); ++axis)
      for (int dir : {-1, 1}) {
        const VertexId w = box.neighbor(v, axis, dir);
        if (w >= 0 && in_a[w]) rhs[static_cast<Eigen::Index>(i)] += hop;
      }
  }
  const Eigen::VectorXd h = harmonic.solve(rhs);
  auto h_at = [&](VertexId v) -> double {
    if (in_a[v]) return 1.0;
    const auto i = harmonic.free_index(v);
    return i < 0 ? 0.0 : h[i];
  };

  CapacityResult out;
  out.measure.support = a;
  out.measure.weight.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double ret = 0.0;
    for (int axis = 0; axis < box.dim(); ++axis)
      for (int dir : {-1, 1}) {
        const VertexId w = box.neighbor(a[i], axis, dir);
        if (w >= 0) ret += hop * h_at(w);
      }
    out.measure.weight[i] = std::max(0.0, 1.0 - ret);
    out.measure.total += out.measure.weight[i];
  }
  out.capacity = out.measure.total;

  // Last-exit decomposition: P_x(tau_A < tau_D) = sum_a G_D(x, a) e_A(a).
  const GreenOperator g(box, killing, options);
  const auto& free = harmonic.free_vertices();
  if (!free.empty()) {
    for (std::size_t pick : {std::size_t{0}, free.size() / 2, free.size() - 1}) {
      const VertexId x = free[pick];
      const auto col = g.column(x);
      double predicted = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) predicted += col[a[i]] * out.measure.weight[i];
      out.identity_error = std::max(out.identity_error, std::abs(predicted - h_at(x)));
    }
  }
  if (out.identity_error > 1e-6)
    throw SolverError("equilibrium measure fails the last-exit identity");
  return out;
}

double arcsin_of_ratio(double ratio) {
  constexpr double tol = 1e-8;
  if (ratio < -1.0 - tol || ratio > 1.0 + tol)
    throw SolverError("normalized Green's function outside [-1, 1]");
  return std::asin(std::clamp(ratio, -1.0, 1.0)) / std::numbers::pi;
}

double arcsin_two_point(const GreenOperator& g, VertexId x, VertexId y) {
  if (x == y) throw std::invalid_argument("two-point function needs x != y");
  if (g.is_absorbing(x) || g.is_absorbing(y))
    throw std::invalid_argument("two-point endpoint lies in the absorbing set");
  return arcsin_of_ratio(g(x, y) / std::sqrt(g(x, x) * g(y, y)));
}

namespace {

struct BesselProduct {
  std::vector<int> orders;
  double scale;
};

double bessel_integrand(double s, void* params) {
  const auto* p = static_cast<const BesselProduct*>(params);
  double prod = p->scale;
  for (int n : p->orders) prod *= gsl_sf_bessel_In_scaled(n, s);
  return prod;
}

}  // namespace

double free_green_reference(int dim, std::span<const int> x) {
  if (dim < 3) throw std::invalid_argument("free Green's function needs d >= 3");
  if (static_cast<int>(x.size()) < dim) throw std::invalid_argument("point has too few coordinates");
  BesselProduct params{{}, static_cast<double>(dim)};
  for (int i = 0; i < dim; ++i) params.orders.push_back(std::abs(x[i]));

  gsl_set_error_handler_off();
  constexpr std::size_t limit = 2000;
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(limit);
  gsl_function f{&bessel_integrand, &params};
  double result = 0.0;
  double abserr = 0.0;
  const int status = gsl_integration_qagiu(&f, 0.0, 1e-13, 1e-10, limit, ws, &result, &abserr);
  gsl_integration_workspace_free(ws);
  if (status != GSL_SUCCESS && abserr > 1e-8 * std::abs(result))
    throw SolverError(std::string("lattice Green's quadrature failed: ") + gsl_strerror(status));
  return result;
}

}  // namespace gffperc

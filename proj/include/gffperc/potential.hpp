#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gffperc/lattice.hpp"

namespace gffperc {

/// Raised when a linear solve fails or a quadrature does not converge.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  /// Systems with at most this many unknowns use a sparse Cholesky
  /// factorization; larger ones use conjugate gradients.
  std::int64_t direct_limit = 50000;
  double cg_tolerance = 1e-10;
  int cg_max_iterations = 20000;
  /// Columns of G_D kept in memory after being solved for.
  std::size_t column_cache = 64;
};

namespace detail {
class KilledSystem;
}

/// Green's function of simple random walk killed on an absorbing set D:
/// G_D(x, y) is the expected number of visits to y before hitting D, started
/// from x. Immutable once built; queries may be issued concurrently.
class GreenOperator {
 public:
  GreenOperator(const BoxGeometry& box, const VertexSet& absorbing,
                const SolverOptions& options = {});

  const BoxGeometry& geometry() const;
  const VertexSet& absorbing() const;
  bool is_absorbing(VertexId v) const;
  std::int64_t free_count() const;
  bool uses_direct_solver() const;

  double operator()(VertexId x, VertexId y) const;
  /// G_D(., y) over all domain vertices (zero on D).
  std::vector<double> column(VertexId y) const;

 private:
  std::shared_ptr<const detail::KilledSystem> system_;
};

/// Builds G_D. The outer shell of the domain is always added to D.
GreenOperator killed_green(const BoxGeometry& box, const VertexSet& absorbing,
                           const SolverOptions& options = {});

/// P_v(tau_w < tau_D) = G_D(v, w) / G_D(w, w).
double hitting_probability(const GreenOperator& g, VertexId v, VertexId w);

struct EquilibriumMeasure {
  VertexSet support;
  /// Escape probability per vertex of the support; zero off the boundary.
  std::vector<double> weight;
  double total = 0.0;
};

struct CapacityResult {
  EquilibriumMeasure measure;
  double capacity = 0.0;
  /// Largest discrepancy in the last-exit identity over the test vertices.
  double identity_error = 0.0;
};

/// Lattice capacity of A relative to the killing set D_outer (plus shell).
CapacityResult capacity(const BoxGeometry& box, const VertexSet& a,
                        const VertexSet& outer, const SolverOptions& options = {});

/// pi^-1 arcsin of the normalized Green's function, the probability that x
/// and y are joined in the nonnegative level set of the killed metric field.
double arcsin_two_point(const GreenOperator& g, VertexId x, VertexId y);
double arcsin_of_ratio(double ratio);

/// G(0, x) on the infinite lattice Z^d by quadrature of the continuous-time
/// representation d * int_0^inf prod_i e^-s I_{x_i}(s) ds.
double free_green_reference(int dim, std::span<const int> x);

}  // namespace gffperc

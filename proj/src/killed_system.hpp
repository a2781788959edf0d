#pragma once

// Private: sparse system (I - P_D) restricted to the vertices off D.

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "gffperc/lattice.hpp"
#include "gffperc/potential.hpp"

namespace gffperc::detail {

using SparseMatrix = Eigen::SparseMatrix<double>;

class KilledSystem {
 public:
  KilledSystem(const BoxGeometry& box, VertexSet absorbing, const SolverOptions& options);

  const BoxGeometry& box() const { return box_; }
  const VertexSet& absorbing() const { return absorbing_; }
  bool is_absorbing(VertexId v) const { return free_index_[v] < 0; }
  std::int64_t free_count() const { return static_cast<std::int64_t>(free_vertices_.size()); }
  std::int32_t free_index(VertexId v) const { return free_index_[v]; }
  const std::vector<VertexId>& free_vertices() const { return free_vertices_; }
  bool direct() const { return llt_.has_value(); }
  const SparseMatrix& matrix() const { return matrix_; }

  /// Solves (I - P_D) u = rhs over the free vertices.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  /// Column G_D(., y) in free-vertex indexing, cached.
  std::shared_ptr<const Eigen::VectorXd> column(VertexId y) const;

  /// x = P^-1 L^-T z, a sample with covariance (I - P_D)^-1.
  Eigen::VectorXd sample_from_normals(const Eigen::VectorXd& z) const;

 private:
  BoxGeometry box_;
  VertexSet absorbing_;
  SolverOptions options_;
  std::vector<std::int32_t> free_index_;
  std::vector<VertexId> free_vertices_;
  SparseMatrix matrix_;
  std::optional<Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>> llt_;

  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<VertexId, std::shared_ptr<const Eigen::VectorXd>> cache_;
  mutable std::list<VertexId> cache_order_;
};

}  // namespace gffperc::detail

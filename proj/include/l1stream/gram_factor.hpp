#pragma once

#include <Eigen/Dense>
#include <vector>

#include "l1stream/linop.hpp"

namespace l1stream {

enum class GramFactorMode { ExplicitInverse, Cholesky };

/// Incrementally maintained factorization of the active-set Gram matrix
/// A_G^T A_G under single-column additions and removals.
///
/// Cholesky mode stores the lower-triangular L with L L^T = A_G^T A_G.
/// ExplicitInverse mode stores (A_G^T A_G)^{-1} directly; it is cheaper
/// per update but less stable when the active set approaches the row
/// count, so Cholesky is the default everywhere.
class GramFactor {
 public:
  explicit GramFactor(GramFactorMode mode = GramFactorMode::Cholesky,
                      double pivot_tol = 1e-12)
      : mode_(mode), pivot_tol_(pivot_tol) {}

  GramFactorMode mode() const { return mode_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(map_.size()); }
  const std::vector<Eigen::Index>& column_index_map() const { return map_; }
  const Eigen::MatrixXd& data() const { return data_; }
  const Eigen::MatrixXd& active_columns() const { return cols_; }

  /// Extends the factor to the active set with `new_index` appended.
  /// Throws SingularGramError when the Schur complement (Cholesky pivot)
  /// of the incoming column falls below pivot_tol.
  void grow(const LinearOperator& A, Eigen::Index new_index);

  /// Removes `removed_index` from the active set, preserving the order of
  /// the remaining entries. Throws IndexNotActiveError if not active.
  void shrink(Eigen::Index removed_index);

  /// Solves (A_G^T A_G) d = rhs for the current active set.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  /// Dense reconstruction of (A_G^T A_G)^{-1}; test/diagnostic use.
  Eigen::MatrixXd gram_inverse() const;

 private:
  GramFactorMode mode_;
  double pivot_tol_;
  Eigen::MatrixXd data_;  // S x S: lower Cholesky factor or explicit inverse
  Eigen::MatrixXd cols_;  // M x S cached active columns, factor order
  std::vector<Eigen::Index> map_;
};

/// In-place rank-one Cholesky update: L L^T + v v^T. Returns false when the
/// updated matrix is not positive definite within `tol`.
bool cholesky_rank_one_update(Eigen::Ref<Eigen::MatrixXd> L,
                              const Eigen::VectorXd& v, double tol = 0.0);

}  // namespace l1stream

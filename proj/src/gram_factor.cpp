#include "l1stream/gram_factor.hpp"

#include <algorithm>
#include <cmath>

#include "l1stream/errors.hpp"

namespace l1stream {

bool cholesky_rank_one_update(Eigen::Ref<Eigen::MatrixXd> L,
                              const Eigen::VectorXd& v, double tol) {
  const Eigen::Index n = L.rows();
  Eigen::VectorXd w = v;
  double b = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double ljj = L(j, j);
    const double wj = w(j);
    const double diag_arg = ljj * ljj + wj * wj / b;
    if (diag_arg <= tol) return false;
    const double l2jj = std::sqrt(diag_arg);
    const double gamma = ljj * ljj * b + wj * wj;
    for (Eigen::Index k = j + 1; k < n; ++k) {
      w(k) -= wj * L(k, j) / ljj;
      L(k, j) = l2jj * L(k, j) / ljj + l2jj * wj * w(k) / gamma;
    }
    L(j, j) = l2jj;
    b += wj * wj / (ljj * ljj);
  }
  return true;
}

void GramFactor::grow(const LinearOperator& A, Eigen::Index new_index) {
  if (std::find(map_.begin(), map_.end(), new_index) != map_.end()) {
    throw std::invalid_argument("grow: column already active");
  }
  const Eigen::Index S = size();
  const Eigen::VectorXd a = A.column(new_index);
  const double g = a.squaredNorm();

  if (S == 0) {
    if (g < pivot_tol_) throw SingularGramError("grow: zero column");
    data_.resize(1, 1);
    data_(0, 0) = (mode_ == GramFactorMode::Cholesky) ? std::sqrt(g) : 1.0 / g;
    cols_ = a;
    map_.push_back(new_index);
    return;
  }

  const Eigen::VectorXd v = cols_.transpose() * a;  // A_G^T a

  if (mode_ == GramFactorMode::Cholesky) {
    // L w = v, new pivot^2 = g - w^T w
    const Eigen::VectorXd w =
        data_.triangularView<Eigen::Lower>().solve(v);
    const double s2 = g - w.squaredNorm();
    if (s2 < pivot_tol_) {
      throw SingularGramError("grow: Cholesky pivot below tolerance");
    }
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(S + 1, S + 1);
    L.topLeftCorner(S, S) = data_;
    L.row(S).head(S) = w.transpose();
    L(S, S) = std::sqrt(s2);
    data_ = std::move(L);
  } else {
    // Block inverse via the matrix inversion lemma.
    const Eigen::VectorXd Bv = data_ * v;
    const double s = g - v.dot(Bv);
    if (s < pivot_tol_) {
      throw SingularGramError("grow: Schur complement below tolerance");
    }
    Eigen::MatrixXd B(S + 1, S + 1);
    B.topLeftCorner(S, S) = data_ + (Bv * Bv.transpose()) / s;
    B.topRightCorner(S, 1) = -Bv / s;
    B.bottomLeftCorner(1, S) = -Bv.transpose() / s;
    B(S, S) = 1.0 / s;
    data_ = std::move(B);
  }

  cols_.conservativeResize(Eigen::NoChange, S + 1);
  cols_.col(S) = a;
  map_.push_back(new_index);
}

void GramFactor::shrink(Eigen::Index removed_index) {
  const auto it = std::find(map_.begin(), map_.end(), removed_index);
  if (it == map_.end()) {
    throw IndexNotActiveError("shrink: column not active");
  }
  const Eigen::Index k = std::distance(map_.begin(), it);
  const Eigen::Index S = size();

  if (S == 1) {
    data_.resize(0, 0);
    cols_.resize(cols_.rows(), 0);
    map_.clear();
    return;
  }

  if (mode_ == GramFactorMode::Cholesky) {
    // Delete row k of L, then restore triangularity of the trailing block:
    // L33' L33'^T = L33 L33^T + l32 l32^T.
    const Eigen::Index t = S - 1 - k;  // trailing size
    Eigen::MatrixXd L(S - 1, S - 1);
    L.setZero();
    L.topLeftCorner(k, k) = data_.topLeftCorner(k, k);
    if (t > 0) {
      L.bottomLeftCorner(t, k) = data_.bottomLeftCorner(t, k);
      Eigen::MatrixXd L33 = data_.block(k + 1, k + 1, t, t);
      const Eigen::VectorXd l32 = data_.block(k + 1, k, t, 1);
      if (!cholesky_rank_one_update(L33, l32)) {
        throw SingularGramError("shrink: downdate lost positive definiteness");
      }
      L.bottomRightCorner(t, t) = L33;
    }
    data_ = std::move(L);
  } else {
    // B' = B_!k,!k - B_!k,k B_k,!k / B_kk
    const double bkk = data_(k, k);
    Eigen::VectorXd bk(S - 1);
    Eigen::MatrixXd B(S - 1, S - 1);
    for (Eigen::Index i = 0, ii = 0; i < S; ++i) {
      if (i == k) continue;
      bk(ii) = data_(i, k);
      for (Eigen::Index j = 0, jj = 0; j < S; ++j) {
        if (j == k) continue;
        B(ii, jj) = data_(i, j);
        ++jj;
      }
      ++ii;
    }
    B -= (bk * bk.transpose()) / bkk;
    data_ = std::move(B);
  }

  Eigen::MatrixXd cols(cols_.rows(), S - 1);
  if (k > 0) cols.leftCols(k) = cols_.leftCols(k);
  if (k < S - 1) cols.rightCols(S - 1 - k) = cols_.rightCols(S - 1 - k);
  cols_ = std::move(cols);
  map_.erase(it);
}

Eigen::VectorXd GramFactor::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != size()) {
    throw DimensionMismatchError("solve: rhs length does not match factor size");
  }
  if (size() == 0) return rhs;
  if (mode_ == GramFactorMode::Cholesky) {
    Eigen::VectorXd d = data_.triangularView<Eigen::Lower>().solve(rhs);
    return data_.transpose().triangularView<Eigen::Upper>().solve(d);
  }
  return data_ * rhs;
}

Eigen::MatrixXd GramFactor::gram_inverse() const {
  if (mode_ == GramFactorMode::ExplicitInverse) return data_;
  const Eigen::Index S = size();
  Eigen::MatrixXd inv(S, S);
  for (Eigen::Index j = 0; j < S; ++j) {
    inv.col(j) = solve(Eigen::VectorXd::Unit(S, j));
  }
  return inv;
}

}  // namespace l1stream

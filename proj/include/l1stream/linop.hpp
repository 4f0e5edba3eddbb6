#pragma once

#include <Eigen/Dense>
#include <memory>

namespace l1stream {

/// Running count of operator applications. One application of A plus one
/// of A^T is booked as a single unit (one A^T A product).
struct MatvecCounter {
  long applies = 0;
  long adjoints = 0;
  double units() const { return 0.5 * static_cast<double>(applies + adjoints); }
  void reset() { applies = adjoints = 0; }
};

/// Abstract M x N system matrix: forward/adjoint application plus
/// single-column extraction. Read-only and shareable across solver
/// instances; the counter is the only mutable state.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    ++counter_.applies;
    return do_apply(x);
  }
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& r) const {
    ++counter_.adjoints;
    return do_apply_adjoint(r);
  }
  virtual Eigen::VectorXd column(Eigen::Index i) const = 0;

  MatvecCounter& counter() const { return counter_; }

 protected:
  virtual Eigen::VectorXd do_apply(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd do_apply_adjoint(const Eigen::VectorXd& r) const = 0;

 private:
  mutable MatvecCounter counter_;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Eigen::MatrixXd A) : A_(std::move(A)) {}

  Eigen::Index rows() const override { return A_.rows(); }
  Eigen::Index cols() const override { return A_.cols(); }
  Eigen::VectorXd column(Eigen::Index i) const override { return A_.col(i); }
  const Eigen::MatrixXd& matrix() const { return A_; }

 protected:
  Eigen::VectorXd do_apply(const Eigen::VectorXd& x) const override { return A_ * x; }
  Eigen::VectorXd do_apply_adjoint(const Eigen::VectorXd& r) const override {
    return A_.transpose() * r;
  }

 private:
  Eigen::MatrixXd A_;
};

}  // namespace l1stream

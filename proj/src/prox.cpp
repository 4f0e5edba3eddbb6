#include "l1stream/prox.hpp"

#include <cmath>

#include "l1stream/rng.hpp"

namespace l1stream {

namespace {

double operator_norm_sq(const LinearOperator& A, int iters) {
  CounterRng rng(0x5eed, 7);
  Eigen::VectorXd v(A.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.gaussian();
  v.normalize();
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd w = A.apply_adjoint(A.apply(v));
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    v = w / lambda;
  }
  return lambda;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, const Eigen::VectorXd& t,
                               bool nonneg) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (nonneg) {
      out(i) = std::max(0.0, v(i) - t(i));
    } else if (v(i) > t(i)) {
      out(i) = v(i) - t(i);
    } else if (v(i) < -t(i)) {
      out(i) = v(i) + t(i);
    } else {
      out(i) = 0.0;
    }
  }
  return out;
}

}  // namespace

ProxResult prox_gradient_solve(const WeightedL1Problem& problem,
                               const Eigen::VectorXd& x0, const ProxOptions& opts) {
  const LinearOperator& A = *problem.A;
  const double lip = operator_norm_sq(A, opts.power_iters);
  const double step = lip > 0.0 ? opts.step_safety / lip : 1.0;
  const Eigen::VectorXd thresh = step * problem.weights;

  ProxResult res;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd v = x;  // momentum point
  double theta = 1.0;
  double obj_prev = weighted_l1_objective(problem, x);
  int stationary_run = 0;

  for (int k = 0; k < opts.max_iters; ++k) {
    const Eigen::VectorXd grad = A.apply_adjoint(A.apply(v) - problem.y);
    const Eigen::VectorXd x_next = soft_threshold(v - step * grad, thresh, problem.nonneg);
    res.matvec_count += 1.0;

    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    v = x_next + ((theta - 1.0) / theta_next) * (x_next - x);

    const double obj = weighted_l1_objective(problem, x_next);
    if (obj > obj_prev) {
      // function restart
      v = x_next;
      theta = 1.0;
    } else {
      theta = theta_next;
    }

    const double denom = std::max(1.0, std::abs(obj_prev));
    if (std::abs(obj_prev - obj) <= opts.objective_tol * denom) {
      ++stationary_run;
    } else {
      stationary_run = 0;
    }
    x = x_next;
    res.iterations = k + 1;
    obj_prev = obj;
    // A single flat objective difference is not trusted as convergence.
    if (stationary_run >= 8) break;
  }

  res.x = std::move(x);
  res.objective = obj_prev;
  return res;
}

}  // namespace l1stream

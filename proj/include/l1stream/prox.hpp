#pragma once

#include <Eigen/Dense>

#include "l1stream/homotopy.hpp"

namespace l1stream {

struct ProxOptions {
  int max_iters = 200000;
  double objective_tol = 1e-10;  // relative objective stationarity
  double step_safety = 0.99;     // step = safety / ||A^T A||_2
  int power_iters = 100;
};

struct ProxResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double matvec_count = 0.0;  // one A^T A unit per iteration
  double objective = 0.0;
};

/// FISTA (accelerated iterative shrinkage) for the weighted l1 problem,
/// with function restart. Serves as the in-repo first-order solver and as
/// the independent oracle the homotopy solution is compared against.
ProxResult prox_gradient_solve(const WeightedL1Problem& problem,
                               const Eigen::VectorXd& x0, const ProxOptions& opts = {});

}  // namespace l1stream

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "l1stream/gram_factor.hpp"
#include "l1stream/linop.hpp"

namespace l1stream {

/// minimize ||W x||_1 + 1/2 ||A x - y||_2^2, with strictly positive
/// diagonal weights. `nonneg` restricts the solution to x >= 0 and
/// requires a nonnegative warm start.
struct WeightedL1Problem {
  const LinearOperator* A = nullptr;
  Eigen::VectorXd y;
  Eigen::VectorXd weights;
  bool nonneg = false;
};

/// Policy for the sign-vector entries off the warm-start support; any
/// choice with |z_i| < 1 is valid.
enum class OffSupportSignPolicy {
  Zero,                ///< z_i = 0 off support
  ClampedCorrelation,  ///< z_i = clamp(a_i^T(y - A x)/w_i, +-(1-1e-6));
                       ///< zeroes the homotopy offset off-support. Can
                       ///< shorten paths on well-separated supports, but
                       ///< degrades badly on the streaming windows, so
                       ///< Zero is the default everywhere.
};

struct WarmStart {
  Eigen::VectorXd x;  ///< starting point, arbitrary sparse vector
  Eigen::VectorXd z;  ///< sign(x) on support, |z| < 1 elsewhere
  Eigen::VectorXd u;  ///< homotopy offset: -W z - A^T(A x - y)
};

struct HomotopyOptions {
  int max_steps = 100000;
  GramFactorMode factor_mode = GramFactorMode::Cholesky;
  double pivot_tol = 1e-12;
  double degenerate_step = 1e-14;
  int degenerate_limit_per_n = 5;  // consecutive-degenerate cap is 5*N
  bool check_path = false;         // verify KKT at every critical point
  double path_check_tol = 1e-8;
  std::optional<GramFactor> factor;  // pre-built factor for the warm support
};

struct SolveResult {
  Eigen::VectorXd x;
  std::vector<Eigen::Index> support;
  int step_count = 0;
  double matvec_count = 0.0;  // one A^T A unit per step plus init/final
  double kkt_residual = 0.0;
  int blocked_adds = 0;  // adds skipped because the column was dependent
};

/// Zeroes entries of `x_hat` whose columns are (numerically) linearly
/// dependent on the columns of larger-magnitude entries, so that the
/// warm-start Gram matrix is safely invertible. Any sparse vector is a
/// valid warm start, so this only moves the start of the path.
Eigen::VectorXd prune_dependent_support(const LinearOperator& A,
                                        const Eigen::VectorXd& x_hat,
                                        double pivot_tol = 1e-7);

/// Builds the warm start for `x_hat`: the offset u = -W z - A^T(A x - y)
/// makes x_hat optimal for the eps = 0 homotopy problem by construction.
WarmStart compute_warm_start(const WeightedL1Problem& problem,
                             const Eigen::VectorXd& x_hat,
                             OffSupportSignPolicy policy = OffSupportSignPolicy::Zero);

/// Traces the homotopy path from the warm start to the solution of the
/// weighted l1 problem (eps: 0 -> 1), one support change per step.
SolveResult homotopy_solve(const WeightedL1Problem& problem, const WarmStart& warm,
                           const HomotopyOptions& opts = {});

/// Update direction: (A_G^T A_G)^{-1} u_G on the support, zero elsewhere.
Eigen::VectorXd compute_direction(const GramFactor& factor, const Eigen::VectorXd& u,
                                  Eigen::Index n);

struct SupportChange {
  enum class Kind { None, Add, Remove } kind = Kind::None;
  Eigen::Index index = -1;
  double sign = 0.0;   // incoming sign for Add
  double delta = 0.0;  // +inf when no positive step exists
};

/// Smallest positive step among the add/remove ratio families.
/// p, d are the off-support constraint values and slopes (entries on the
/// support are ignored); ties prefer removal, then the lowest index.
/// `skip` excludes indices from the add family (dependent columns).
SupportChange compute_step(const Eigen::VectorXd& p, const Eigen::VectorXd& d,
                           const Eigen::VectorXd& w, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& dx,
                           const std::vector<Eigen::Index>& support, bool nonneg,
                           const std::vector<char>* skip = nullptr);

/// Max violation of the optimality conditions at homotopy parameter eps;
/// +inf when an on-support sign is inconsistent. u may be empty at eps=1.
double verify_kkt(const WeightedL1Problem& problem, const Eigen::VectorXd& x,
                  double eps, const Eigen::VectorXd& u = Eigen::VectorXd());

/// ||W x||_1 + 1/2 ||A x - y||^2 (no homotopy term).
double weighted_l1_objective(const WeightedL1Problem& problem, const Eigen::VectorXd& x);

}  // namespace l1stream

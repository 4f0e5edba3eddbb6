#include "l1stream/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "l1stream/errors.hpp"

namespace l1stream {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

Eigen::VectorXd prune_dependent_support(const LinearOperator& A,
                                        const Eigen::VectorXd& x_hat,
                                        double pivot_tol) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < x_hat.size(); ++i) {
    if (x_hat(i) != 0.0) support.push_back(i);
  }
  std::stable_sort(support.begin(), support.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(x_hat(a)) > std::abs(x_hat(b));
  });
  Eigen::VectorXd pruned = x_hat;
  GramFactor factor(GramFactorMode::Cholesky, pivot_tol);
  for (Eigen::Index i : support) {
    try {
      factor.grow(A, i);
    } catch (const SingularGramError&) {
      pruned(i) = 0.0;
    }
  }
  return pruned;
}

WarmStart compute_warm_start(const WeightedL1Problem& problem,
                             const Eigen::VectorXd& x_hat,
                             OffSupportSignPolicy policy) {
  const LinearOperator& A = *problem.A;
  const Eigen::Index n = A.cols();
  WarmStart warm;
  warm.x = x_hat;
  warm.z.resize(n);

  const Eigen::VectorXd residual_corr =
      A.apply_adjoint(A.apply(x_hat) - problem.y);  // A^T(A x - y)

  for (Eigen::Index i = 0; i < n; ++i) {
    if (x_hat(i) != 0.0) {
      warm.z(i) = sgn(x_hat(i));
    } else if (policy == OffSupportSignPolicy::Zero) {
      warm.z(i) = 0.0;
    } else {
      const double cap = 1.0 - 1e-6;
      warm.z(i) = std::clamp(-residual_corr(i) / problem.weights(i), -cap, cap);
    }
  }
  warm.u = -problem.weights.cwiseProduct(warm.z) - residual_corr;
  return warm;
}

Eigen::VectorXd compute_direction(const GramFactor& factor, const Eigen::VectorXd& u,
                                  Eigen::Index n) {
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(n);
  const auto& map = factor.column_index_map();
  const Eigen::Index s = factor.size();
  if (s == 0) return dx;
  Eigen::VectorXd ug(s);
  for (Eigen::Index j = 0; j < s; ++j) ug(j) = u(map[j]);
  const Eigen::VectorXd dg = factor.solve(ug);
  for (Eigen::Index j = 0; j < s; ++j) dx(map[j]) = dg(j);
  return dx;
}

SupportChange compute_step(const Eigen::VectorXd& p, const Eigen::VectorXd& d,
                           const Eigen::VectorXd& w, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& dx,
                           const std::vector<Eigen::Index>& support, bool nonneg,
                           const std::vector<char>* skip) {
  const Eigen::Index n = p.size();
  std::vector<char> active(n, 0);
  for (Eigen::Index i : support) active[i] = 1;

  SupportChange add{SupportChange::Kind::Add, -1, 0.0, kInf};
  SupportChange rem{SupportChange::Kind::Remove, -1, 0.0, kInf};

  for (Eigen::Index i = 0; i < n; ++i) {
    if (active[i]) continue;
    if (skip && (*skip)[i]) continue;
    if (d(i) == 0.0) continue;  // zero slope: constraint never activates
    // Constraint p_i + delta d_i hits +w_i or -w_i; the incoming sign is
    // opposite to the sign of the active constraint.
    if (!nonneg) {
      const double hi = (w(i) - p(i)) / d(i);
      if (hi > 0.0 && hi < add.delta) {
        add.delta = hi;
        add.index = i;
        add.sign = -1.0;
      }
    }
    const double lo = (-w(i) - p(i)) / d(i);
    if (lo > 0.0 && lo < add.delta) {
      add.delta = lo;
      add.index = i;
      add.sign = 1.0;
    }
  }

  for (Eigen::Index i : support) {
    if (dx(i) == 0.0) continue;
    const double r = -x(i) / dx(i);
    if (r > 0.0 && r < rem.delta) {
      rem.delta = r;
      rem.index = i;
    }
  }

  if (rem.delta == kInf && add.delta == kInf) {
    return SupportChange{SupportChange::Kind::None, -1, 0.0, kInf};
  }
  // Ties prefer removal (keeps the Gram factor better conditioned).
  return (rem.delta <= add.delta) ? rem : add;
}

double verify_kkt(const WeightedL1Problem& problem, const Eigen::VectorXd& x,
                  double eps, const Eigen::VectorXd& u) {
  const LinearOperator& A = *problem.A;
  const Eigen::Index n = A.cols();
  const Eigen::VectorXd corr = A.apply_adjoint(A.apply(x) - problem.y);
  double residual = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double offset = (u.size() == n) ? (1.0 - eps) * u(i) : 0.0;
    const double value = corr(i) + offset;
    const double w = problem.weights(i);
    if (x(i) != 0.0) {
      if (value * x(i) > 0.0) return kInf;  // on-support sign is wrong
      residual = std::max(residual, std::abs(std::abs(value) - w));
    } else if (problem.nonneg) {
      residual = std::max(residual, std::max(0.0, -w - value));
    } else {
      residual = std::max(residual, std::max(0.0, std::abs(value) - w));
    }
  }
  return residual;
}

double weighted_l1_objective(const WeightedL1Problem& problem,
                             const Eigen::VectorXd& x) {
  const Eigen::VectorXd r = problem.A->apply(x) - problem.y;
  return problem.weights.cwiseProduct(x.cwiseAbs()).sum() + 0.5 * r.squaredNorm();
}

SolveResult homotopy_solve(const WeightedL1Problem& problem, const WarmStart& warm,
                           const HomotopyOptions& opts) {
  const LinearOperator& A = *problem.A;
  const Eigen::Index n = A.cols();
  if (warm.x.size() != n || warm.u.size() != n || problem.weights.size() != n) {
    throw DimensionMismatchError("homotopy_solve: inconsistent problem sizes");
  }
  if (problem.nonneg && (warm.x.array() < 0.0).any()) {
    throw std::invalid_argument("homotopy_solve: nonneg requires x >= 0 warm start");
  }

  Eigen::VectorXd x = warm.x;
  Eigen::VectorXd z = warm.z;
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (x(i) != 0.0) support.push_back(i);
  }
  // Largest entries first, so the factor build sees the same pivot
  // sequence as prune_dependent_support.
  std::stable_sort(support.begin(), support.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(x(a)) > std::abs(x(b));
  });

  GramFactor factor = opts.factor ? *opts.factor
                                  : GramFactor(opts.factor_mode, opts.pivot_tol);
  if (opts.factor) {
    if (factor.column_index_map() !=
        std::vector<Eigen::Index>(support.begin(), support.end())) {
      throw std::invalid_argument("homotopy_solve: factor does not match warm support");
    }
  } else {
    for (Eigen::Index i : support) factor.grow(A, i);
  }

  // corr = A^T(A x - y), maintained incrementally along the path.
  Eigen::VectorXd corr = A.apply_adjoint(A.apply(x) - problem.y);

  SolveResult result;
  result.matvec_count = 1.0;  // initialization

  double eps = 0.0;
  double eps_comp = 0.0;  // compensated accumulation
  int consec_degenerate = 0;
  std::vector<char> blocked(n, 0);
  const long degenerate_limit =
      static_cast<long>(opts.degenerate_limit_per_n) * static_cast<long>(n);
  Eigen::Index last_added = -1;

  while (true) {
    if (result.step_count >= opts.max_steps) {
      throw MaxStepsExceededError("homotopy_solve: path did not terminate");
    }

    Eigen::VectorXd dx = compute_direction(factor, warm.u, n);
    if (last_added >= 0 && dx(last_added) != 0.0 &&
        sgn(dx(last_added)) != z(last_added)) {
      // Sign mismatch on the freshly added element: drop it and redo.
      factor.shrink(last_added);
      support.erase(std::find(support.begin(), support.end(), last_added));
      last_added = -1;
      dx = compute_direction(factor, warm.u, n);
    }
    last_added = -1;

    const Eigen::VectorXd AtAdx = A.apply_adjoint(A.apply(dx));
    result.matvec_count += 1.0;

    const Eigen::VectorXd p = corr + (1.0 - eps) * warm.u;
    const Eigen::VectorXd d = AtAdx - warm.u;
    const SupportChange change =
        compute_step(p, d, problem.weights, x, dx, support, problem.nonneg, &blocked);

    if (eps + change.delta >= 1.0) {
      const double final_delta = 1.0 - eps;
      x += final_delta * dx;
      eps = 1.0;
      break;
    }

    x += change.delta * dx;
    corr += change.delta * AtAdx;
    {
      // Kahan step so the eps sequence stays strictly increasing and the
      // final partial step lands exactly on 1.
      const double y0 = change.delta - eps_comp;
      const double t = eps + y0;
      eps_comp = (t - eps) - y0;
      eps = t;
    }
    ++result.step_count;

    if (change.kind == SupportChange::Kind::Remove) {
      x(change.index) = 0.0;
      factor.shrink(change.index);
      support.erase(std::find(support.begin(), support.end(), change.index));
    } else {
      try {
        factor.grow(A, change.index);
        support.push_back(change.index);
        x(change.index) = 0.0;
        z(change.index) = change.sign;
        last_added = change.index;
      } catch (const SingularGramError&) {
        // Column is (numerically) dependent on the active set: the path
        // cannot pivot on it, so freeze its constraint out of the add
        // family and continue. The final KKT residual reports honestly.
        blocked[change.index] = 1;
        ++result.blocked_adds;
      }
    }

    if (change.delta < opts.degenerate_step) {
      if (++consec_degenerate > degenerate_limit) {
        throw MaxStepsExceededError("homotopy_solve: degenerate step limit hit");
      }
    } else {
      consec_degenerate = 0;
    }

    if (opts.check_path) {
      const double r = verify_kkt(problem, x, eps, warm.u);
      if (!(r <= opts.path_check_tol)) {
        throw std::runtime_error("homotopy_solve: path KKT check failed");
      }
    }
  }

  // Drop support entries whose coefficient landed exactly on zero.
  std::vector<Eigen::Index> final_support;
  for (Eigen::Index i : support) {
    if (x(i) != 0.0) final_support.push_back(i);
  }

  result.x = std::move(x);
  result.support = std::move(final_support);
  result.kkt_residual = verify_kkt(problem, result.x, 1.0);
  result.matvec_count += 1.0;  // final certificate
  return result;
}

}  // namespace l1stream

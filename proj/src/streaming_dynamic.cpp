#include "l1stream/streaming_dynamic.hpp"

#include <chrono>
#include <cmath>

#include "l1stream/errors.hpp"

namespace l1stream {

Eigen::MatrixXd DynamicsModel::shift_matrix() const {
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) F(i, (i + 1) % n) = 1.0;
  return F;
}

std::string to_string(DynamicMethod method) {
  switch (method) {
    case DynamicMethod::L1Dynamic: return "l1-dynamic";
    case DynamicMethod::DwtOnly: return "dwt-only";
    case DynamicMethod::LsKalman: return "ls-kalman";
  }
  return "?";
}

DynamicWindow build_dynamic_system(const std::vector<Eigen::MatrixXd>& Phi,
                                   const std::vector<Eigen::VectorXd>& y,
                                   const Eigen::MatrixXd& Psi,
                                   const Eigen::VectorXd& x_hat_prev,
                                   const DynamicsModel& model, double sigma) {
  const int P = static_cast<int>(Phi.size());
  const int N = static_cast<int>(Psi.rows());
  if (P == 0 || static_cast<int>(y.size()) != P || x_hat_prev.size() != N ||
      Psi.cols() != N || model.n != N) {
    throw DimensionMismatchError("build_dynamic_system: inconsistent blocks");
  }
  const int M = static_cast<int>(Phi[0].rows());
  const long PM = static_cast<long>(P) * M;
  const long PN = static_cast<long>(P) * N;
  const bool with_dynamics = model.lambda > 0.0;

  DynamicWindow win;
  win.A = Eigen::MatrixXd::Zero(with_dynamics ? PM + PN : PM, PN);
  win.y.resize(win.A.rows());

  for (int j = 0; j < P; ++j) {
    if (Phi[j].rows() != M || Phi[j].cols() != N || y[j].size() != M) {
      throw DimensionMismatchError("build_dynamic_system: block shapes");
    }
    win.A.block(static_cast<long>(j) * M, static_cast<long>(j) * N, M, N) = Phi[j] * Psi;
    win.y.segment(static_cast<long>(j) * M, M) = y[j];
  }

  if (with_dynamics) {
    const double s = std::sqrt(model.lambda);
    const Eigen::MatrixXd F = model.shift_matrix();
    const Eigen::MatrixXd FPsi = F * Psi;
    win.q_tilde = Eigen::VectorXd::Zero(PN);
    win.q_tilde.head(N) = -(F * x_hat_prev);
    for (int j = 0; j < P; ++j) {
      // row block j: -x_{l+j} + F x_{l+j-1} = q_j
      win.A.block(PM + static_cast<long>(j) * N, static_cast<long>(j) * N, N, N) =
          -s * Psi;
      if (j > 0) {
        win.A.block(PM + static_cast<long>(j) * N, static_cast<long>(j - 1) * N, N, N) =
            s * FPsi;
      }
    }
    win.y.tail(PN) = s * win.q_tilde;
  }

  // Weight scale from the measurement rows only: the prediction rows carry
  // signal-scale right-hand sides and would inflate the threshold.
  win.tau = weight_tau(win.A.topRows(PM), win.y.head(PM), sigma);
  return win;
}

DynamicStreamingPipeline::DynamicStreamingPipeline(const DynamicPipelineOptions& opts,
                                                   const Eigen::VectorXd& x0,
                                                   const std::vector<Eigen::VectorXd>& blocks,
                                                   const MeasurementStream& meas)
    : opts_(opts),
      N_(opts.N),
      M_(static_cast<int>(meas.Phi.empty() ? 0 : meas.Phi[0].rows())),
      total_blocks_(static_cast<int>(blocks.size())),
      last_left_(total_blocks_ - opts.P + 1),
      left_block_(1),
      sigma_(meas.sigma),
      blocks_(blocks),
      meas_(meas) {
  if (x0.size() != N_ || static_cast<int>(meas.Phi.size()) != total_blocks_) {
    throw DimensionMismatchError("DynamicStreamingPipeline: blocks/measurements mismatch");
  }
  if (last_left_ < 1) throw ConfigError("DynamicStreamingPipeline: too few blocks");
  if (opts_.method == DynamicMethod::DwtOnly) opts_.lambda = 0.0;

  WaveletSpec wspec = opts_.wavelet;
  wspec.block_length = N_;
  opts_.wavelet = wspec;
  Psi_ = idwt_matrix(wspec);
  F_ = DynamicsModel{N_, 1.0}.shift_matrix();

  x_hat_prev_ = x0;
  // Diffuse filter start: the baseline builds its prior from measurements
  // alone, beginning from an uninformative state.
  kalman_prior_mean_ = Eigen::VectorXd::Zero(N_);
  kalman_prior_cov_ = 1e3 * Eigen::MatrixXd::Identity(N_, N_);
}

DynamicWindow DynamicStreamingPipeline::assemble_window() const {
  const int l = left_block_;
  std::vector<Eigen::MatrixXd> Phi;
  std::vector<Eigen::VectorXd> y;
  for (int j = 0; j < opts_.P; ++j) {
    Phi.push_back(meas_.Phi[l - 1 + j]);  // measurements are 0-indexed by block
    y.push_back(meas_.y[l - 1 + j]);
  }
  return build_dynamic_system(Phi, y, Psi_, x_hat_prev_,
                              DynamicsModel{N_, opts_.lambda}, sigma_);
}

Eigen::VectorXd DynamicStreamingPipeline::predict_warm_start(const DynamicWindow& sys) const {
  const long PN = static_cast<long>(opts_.P) * N_;
  Eigen::VectorXd alpha_hat = Eigen::VectorXd::Zero(PN);
  if (!have_solution_) return alpha_hat;

  alpha_hat.head(PN - N_) = prev_solution_.tail(PN - N_);
  // incoming block predicted through the dynamics from the previous tail
  const Eigen::VectorXd x_pred = F_ * (Psi_ * prev_solution_.tail(N_));
  alpha_hat.tail(N_) = dwt_block(x_pred, opts_.wavelet);

  const double trunc = sys.tau / std::sqrt(std::log(static_cast<double>(PN)));
  for (long i = 0; i < PN; ++i) {
    if (std::abs(alpha_hat(i)) < trunc) alpha_hat(i) = 0.0;
  }
  return alpha_hat;
}

Eigen::VectorXd DynamicStreamingPipeline::solve_window(const DynamicWindow& sys,
                                                       const Eigen::VectorXd& alpha_hat,
                                                       IterationRecord* rec) {
  DenseOperator A(sys.A);
  WeightedL1Problem problem;
  problem.A = &A;
  problem.y = sys.y;

  const auto solve_prox = [&](const Eigen::VectorXd& start) {
    const ProxResult res = prox_gradient_solve(problem, start, opts_.solve.prox);
    rec->matvecs += res.matvec_count;
    rec->kkt_residual = verify_kkt(problem, res.x, 1.0);
    return res.x;
  };
  const auto solve_once = [&](const Eigen::VectorXd& start) {
    if (opts_.solve.solver == StreamingSolver::Homotopy) {
      try {
        const WarmStart warm = compute_warm_start(problem, start);
        const SolveResult res = homotopy_solve(problem, warm, opts_.solve.homotopy);
        rec->steps += res.step_count;
        rec->matvecs += res.step_count + 2.0;
        rec->kkt_residual = res.kkt_residual;
        return res.x;
      } catch (const SingularGramError&) {
        // fall through to the first-order solver on rank-deficient warm starts
      } catch (const MaxStepsExceededError&) {
        // pathological path (mass-blocked adds); fall through likewise
      }
    }
    return solve_prox(start);
  };

  Eigen::VectorXd x;
  if (!have_solution_) {
    problem.weights = Eigen::VectorXd::Constant(sys.A.cols(), sys.tau);
    x = Eigen::VectorXd::Zero(sys.A.cols());
    for (int it = 0; it < opts_.solve.bootstrap_reweights; ++it) {
      x = solve_once(x);
      if (it + 1 < opts_.solve.bootstrap_reweights) {
        problem.weights = update_weights(x, sys.tau, M_);
      }
    }
  } else {
    problem.weights = update_weights(alpha_hat, sys.tau, M_);
    x = solve_once(prune_dependent_support(A, alpha_hat));
  }

  rec->objective = weighted_l1_objective(problem, x);
  rec->support_size = static_cast<int>((x.array() != 0.0).count());
  return x;
}

Eigen::VectorXd DynamicStreamingPipeline::debias_on_support(
    const DynamicWindow& sys, const Eigen::VectorXd& x) const {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) support.push_back(i);
  }
  if (support.empty()) return x;
  Eigen::MatrixXd As(sys.A.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) As.col(k) = sys.A.col(support[k]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-8);
  const Eigen::VectorXd coef = svd.solve(sys.y);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (std::size_t k = 0; k < support.size(); ++k) out(support[k]) = coef(k);
  return out;
}

Eigen::VectorXd DynamicStreamingPipeline::kalman_window(IterationRecord* rec) {
  const int P = opts_.P;
  const int l = left_block_;
  const long PN = static_cast<long>(P) * N_;
  const double lambda = opts_.lambda > 0.0 ? opts_.lambda : 0.5;

  // prior covariance inverse, jittered if it lost positive definiteness
  Eigen::LLT<Eigen::MatrixXd> cov_llt(kalman_prior_cov_);
  if (cov_llt.info() != Eigen::Success) {
    kalman_prior_cov_ += 1e-10 * Eigen::MatrixXd::Identity(N_, N_);
    cov_llt.compute(kalman_prior_cov_);
  }
  const Eigen::MatrixXd Pinv = cov_llt.solve(Eigen::MatrixXd::Identity(N_, N_));

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(PN, PN);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(PN);
  H.topLeftCorner(N_, N_) = Pinv;
  b.head(N_) = Pinv * kalman_prior_mean_;
  for (int j = 0; j < P; ++j) {
    const Eigen::MatrixXd& Phi = meas_.Phi[l - 1 + j];
    H.block(static_cast<long>(j) * N_, static_cast<long>(j) * N_, N_, N_) +=
        Phi.transpose() * Phi;
    b.segment(static_cast<long>(j) * N_, N_) += Phi.transpose() * meas_.y[l - 1 + j];
    rec->matvecs += 1.0;
  }
  // lambda * F_tilde^T F_tilde, F_tilde = dynamics rows for t = l..r-1
  for (int j = 1; j < P; ++j) {
    const long a = static_cast<long>(j - 1) * N_;
    const long c = static_cast<long>(j) * N_;
    H.block(a, a, N_, N_) += lambda * (F_.transpose() * F_);
    H.block(a, c, N_, N_) -= lambda * F_.transpose();
    H.block(c, a, N_, N_) -= lambda * F_;
    H.block(c, c, N_, N_) += lambda * Eigen::MatrixXd::Identity(N_, N_);
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
  const Eigen::VectorXd x = ldlt.solve(b);

  // One-step filter recursion for the prior of the next window: update with
  // the oldest block's own measurements only (each block enters the
  // recursion exactly once), then predict through the dynamics.
  // The whole window objective is normalized to unit measurement-noise
  // variance, so the recursion uses the same units.
  const Eigen::MatrixXd& Phi0 = meas_.Phi[l - 1];
  const Eigen::MatrixXd J = Pinv + Phi0.transpose() * Phi0;
  Eigen::LDLT<Eigen::MatrixXd> jldlt(J);
  const Eigen::VectorXd filt_mean = jldlt.solve(
      Pinv * kalman_prior_mean_ + Phi0.transpose() * meas_.y[l - 1]);
  const Eigen::MatrixXd P_filt =
      jldlt.solve(Eigen::MatrixXd::Identity(N_, N_));
  kalman_prior_cov_ =
      F_ * P_filt * F_.transpose() + (1.0 / lambda) * Eigen::MatrixXd::Identity(N_, N_);
  kalman_prior_mean_ = F_ * filt_mean;

  rec->objective = (kalman_prior_mean_ - x.head(N_)).squaredNorm();  // diagnostic only
  rec->support_size = N_;
  return x;
}

void DynamicStreamingPipeline::commit_block(const Eigen::VectorXd& block_estimate) {
  for (int i = 0; i < N_; ++i) committed_.push_back(block_estimate(i));
  x_hat_prev_ = block_estimate;
}

IterationRecord DynamicStreamingPipeline::step() {
  if (done()) throw NotSolvedError("DynamicStreamingPipeline: stream exhausted");
  const auto start = std::chrono::steady_clock::now();

  IterationRecord rec;
  rec.t = left_block_;
  rec.committed_begin = static_cast<long>(left_block_ - 1) * N_;
  rec.committed_length = N_;

  if (opts_.method == DynamicMethod::LsKalman) {
    const Eigen::VectorXd x = kalman_window(&rec);
    commit_block(x.head(N_));
    prev_solution_ = x;
  } else {
    const DynamicWindow sys = assemble_window();
    const Eigen::VectorXd alpha_hat = predict_warm_start(sys);
    const Eigen::VectorXd solution = solve_window(sys, alpha_hat, &rec);
    // Commit a least-squares refit on the solution support; the l1 solution
    // itself (shrunken values included) stays as the next warm start.
    prev_debiased_ = debias_on_support(sys, solution);
    commit_block(Psi_ * prev_debiased_.head(N_));
    prev_solution_ = solution;
  }
  have_solution_ = true;
  ++left_block_;

  rec.ser_so_far = stream_ser();
  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return rec;
}

void DynamicStreamingPipeline::flush() {
  if (!have_solution_ || !done()) return;
  for (int j = 1; j < opts_.P; ++j) {
    Eigen::VectorXd block;
    if (opts_.method == DynamicMethod::LsKalman) {
      block = prev_solution_.segment(static_cast<long>(j) * N_, N_);
    } else {
      block = Psi_ * prev_debiased_.segment(static_cast<long>(j) * N_, N_);
    }
    for (int i = 0; i < N_; ++i) committed_.push_back(block(i));
  }
}

double DynamicStreamingPipeline::stream_ser() const {
  const long n = static_cast<long>(committed_.size());
  Eigen::VectorXd truth(n);
  for (long i = 0; i < n; ++i) truth(i) = blocks_[i / N_](i % N_);
  const Eigen::VectorXd est = Eigen::Map<const Eigen::VectorXd>(committed_.data(), n);
  return ser_db(truth, est);
}

}  // namespace l1stream

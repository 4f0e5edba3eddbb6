#include "l1stream/streaming_lot.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "l1stream/errors.hpp"
#include "l1stream/wavelet.hpp"

namespace l1stream {

Eigen::VectorXd update_weights(const Eigen::VectorXd& alpha_hat, double tau, double m) {
  const double l1 = alpha_hat.lpNorm<1>();
  if (l1 == 0.0) {
    // DegenerateBeta: first-iteration bootstrap weights
    return Eigen::VectorXd::Constant(alpha_hat.size(), tau);
  }
  const double beta = m * alpha_hat.squaredNorm() / (l1 * l1);
  Eigen::VectorXd w(alpha_hat.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w(i) = tau / (beta * std::abs(alpha_hat(i)) + 1.0);
  }
  return w;
}

double weight_tau(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double sigma) {
  const double corr = (A.transpose() * y).lpNorm<Eigen::Infinity>();
  return std::max(1e-2 * corr, sigma * std::sqrt(std::log(static_cast<double>(A.cols()))));
}

LotStreamingPipeline::LotStreamingPipeline(const LotPipelineOptions& opts,
                                           const Eigen::VectorXd& signal,
                                           const MeasurementStream& meas)
    : opts_(opts),
      N_(opts.N),
      M_(static_cast<int>(meas.Phi.empty() ? 0 : meas.Phi[0].rows())),
      total_blocks_(static_cast<int>(signal.size()) / opts.N),
      last_left_(total_blocks_ - opts.P),
      left_block_(0),
      sigma_(meas.sigma),
      signal_(signal),
      meas_(meas) {
  if (signal.size() % N_ != 0 || static_cast<int>(meas.Phi.size()) != total_blocks_) {
    throw DimensionMismatchError("LotStreamingPipeline: blocks/measurements mismatch");
  }
  if (last_left_ < 0) throw ConfigError("LotStreamingPipeline: stream shorter than window");

  if (opts_.basis == StreamingBasis::Lot) {
    // a_p = p*N + eta - 1/2 aligns the active interval with the block grid.
    const int eta = N_ / 2;
    partition_ = LotPartition::uniform(total_blocks_, N_, eta,
                                       /*first_split=*/eta - 0.5);
  } else {
    dct_synthesis_ = idct_matrix(N_);
  }
  committed_alpha_ = Eigen::VectorXd::Zero(N_);
}

namespace {

/// Head (first N rows) and tail (last N rows) of an interval synthesis
/// matrix; with l = N and eta = N/2 every interval spans exactly 2N
/// samples, so these two blocks describe the whole active system.
struct BasisBlocks {
  Eigen::MatrixXd head;  // N x N
  Eigen::MatrixXd tail;  // N x N (zero for block bases)
};

BasisBlocks basis_blocks(const std::optional<LotPartition>& partition,
                         const Eigen::MatrixXd& dct_synthesis, int n) {
  BasisBlocks b;
  if (partition) {
    const Eigen::MatrixXd Psi = lot_interval_matrix(*partition, 1);
    b.head = Psi.topRows(n);
    b.tail = Psi.bottomRows(n);
  } else {
    b.head = dct_synthesis;
    b.tail = Eigen::MatrixXd::Zero(n, n);
  }
  return b;
}

}  // namespace

LotStreamingPipeline::WindowSystem LotStreamingPipeline::assemble_window() const {
  const int P = opts_.P;
  const int l = left_block_;
  const BasisBlocks basis = basis_blocks(partition_, dct_synthesis_, N_);

  WindowSystem sys;
  sys.A = Eigen::MatrixXd::Zero(static_cast<long>(P) * M_, static_cast<long>(P) * N_);
  sys.y_tilde.resize(static_cast<long>(P) * M_);

  for (int j = 0; j < P; ++j) {
    const int t = l + j;
    const Eigen::MatrixXd& Phi = meas_.Phi[t];
    // interval l+j contributes its head to row block j, tail to j+1
    sys.A.block(static_cast<long>(j) * M_, static_cast<long>(j) * N_, M_, N_) =
        Phi * basis.head;
    if (j + 1 < P) {
      sys.A.block(static_cast<long>(j + 1) * M_, static_cast<long>(j) * N_, M_, N_) =
          meas_.Phi[t + 1] * basis.tail;
    }
    sys.y_tilde.segment(static_cast<long>(j) * M_, M_) = meas_.y[t];
  }
  // remove the expected contribution of the committed block (Eq.-13 form)
  sys.y_tilde.head(M_) -= meas_.Phi[l] * (basis.tail * committed_alpha_);

  sys.tau = weight_tau(sys.A, sys.y_tilde, sigma_);
  return sys;
}

Eigen::VectorXd LotStreamingPipeline::predict_warm_start(const WindowSystem& sys) const {
  const int P = opts_.P;
  const long PN = static_cast<long>(P) * N_;
  if (!have_solution_) return Eigen::VectorXd::Zero(PN);

  const int l = left_block_;
  const int r = l + P - 1;
  const BasisBlocks basis = basis_blocks(partition_, dct_synthesis_, N_);

  Eigen::VectorXd alpha_hat = Eigen::VectorXd::Zero(PN);
  alpha_hat.head(PN - N_) = prev_solution_.tail(PN - N_);

  // Symmetric extension of the previous reconstruction onto the new block
  // (and one block beyond, to cover the right tail of I_r).
  const long known = PN - N_;  // samples of the current window known from before
  Eigen::VectorXd ext(known + 2 * N_);
  ext.head(known) = prev_recon_.tail(known);
  for (long j = 0; j < 2 * N_; ++j) {
    ext(known + j) = ext(known - 1 - std::min(j, known - 1));
  }

  // LOT (or DCT) analysis of the extension over the incoming interval.
  Eigen::VectorXd alpha_new(N_);
  const Eigen::VectorXd seg_head = ext.segment(known, N_);
  const Eigen::VectorXd seg_tail = ext.segment(known + N_, N_);
  alpha_new = basis.head.transpose() * seg_head + basis.tail.transpose() * seg_tail;

  // Candidate support: magnitudes above the truncation scale, at most M.
  const double trunc = sys.tau / std::sqrt(std::log(static_cast<double>(PN)));
  std::vector<int> candidates;
  for (int k = 0; k < N_; ++k) {
    if (std::abs(alpha_new(k)) > trunc) candidates.push_back(k);
  }
  if (static_cast<int>(candidates.size()) > M_) {
    std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
      return std::abs(alpha_new(a)) > std::abs(alpha_new(b));
    });
    candidates.resize(M_);
    std::sort(candidates.begin(), candidates.end());
  }

  // Least-squares fit of the supported coefficients against the new
  // measurement block, after removing the known tail contribution.
  alpha_new.setZero();
  if (!candidates.empty()) {
    const Eigen::MatrixXd& Phi = meas_.Phi[r];
    Eigen::VectorXd rhs = meas_.y[r];
    const Eigen::VectorXd carried_prev = alpha_hat.segment(PN - 2 * N_, N_);
    rhs -= Phi * (basis.tail * carried_prev);
    Eigen::MatrixXd H(M_, candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      H.col(c) = Phi * basis.head.col(candidates[c]);
    }
    // The head-restricted basis columns have rapidly decaying singular
    // values; a truncated-SVD fit keeps the prediction bounded where a
    // plain least-squares solve would blow up on the dependent columns.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-3);
    const Eigen::VectorXd fit = svd.solve(rhs);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (std::abs(fit(c)) >= trunc) alpha_new(candidates[c]) = fit(c);
    }
  }

  alpha_hat.tail(N_) = alpha_new;
  return alpha_hat;
}

Eigen::VectorXd LotStreamingPipeline::solve_window(const WindowSystem& sys,
                                                   const Eigen::VectorXd& alpha_hat,
                                                   IterationRecord* rec) {
  DenseOperator A(sys.A);
  WeightedL1Problem problem;
  problem.A = &A;
  problem.y = sys.y_tilde;

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
        rec->matvecs += res.step_count + 2.0;  // step units plus init/final
        rec->kkt_residual = res.kkt_residual;
        return res.x;
      } catch (const SingularGramError&) {
        // warm-start support can be rank-deficient on barely-sparse
        // windows; the first-order solver handles those
      } catch (const MaxStepsExceededError&) {
        // pathological path (mass-blocked adds); fall through likewise
      }
    }
    return solve_prox(start);
  };

  Eigen::VectorXd x;
  if (!have_solution_) {
    // Reweighting bootstrap: W = tau start, then reweight from the solution.
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
    // predicted supports can contain dependent columns (the new block is
    // seen only through half-interval basis restrictions)
    x = solve_once(prune_dependent_support(A, alpha_hat));
  }

  rec->objective = weighted_l1_objective(problem, x);
  rec->support_size = static_cast<int>((x.array() != 0.0).count());
  return x;
}

Eigen::VectorXd LotStreamingPipeline::window_reconstruction(
    const Eigen::VectorXd& solution) const {
  const int P = opts_.P;
  const BasisBlocks basis = basis_blocks(partition_, dct_synthesis_, N_);
  Eigen::VectorXd recon = Eigen::VectorXd::Zero(static_cast<long>(P) * N_);
  recon.head(N_) = basis.tail * committed_alpha_;
  for (int j = 0; j < P; ++j) {
    recon.segment(static_cast<long>(j) * N_, N_) +=
        basis.head * solution.segment(static_cast<long>(j) * N_, N_);
    if (j + 1 < P) {
      recon.segment(static_cast<long>(j + 1) * N_, N_) +=
          basis.tail * solution.segment(static_cast<long>(j) * N_, N_);
    }
  }
  return recon;
}

void LotStreamingPipeline::commit_block(const Eigen::VectorXd& solution) {
  const Eigen::VectorXd recon = window_reconstruction(solution);
  for (int i = 0; i < N_; ++i) committed_.push_back(recon(i));
  prev_recon_ = recon;
  committed_alpha_ = solution.head(N_);
}

IterationRecord LotStreamingPipeline::step() {
  if (done()) throw NotSolvedError("LotStreamingPipeline: stream exhausted");
  const auto start = std::chrono::steady_clock::now();

  IterationRecord rec;
  rec.t = left_block_;
  rec.committed_begin = static_cast<long>(left_block_) * N_;
  rec.committed_length = N_;

  const WindowSystem sys = assemble_window();
  const Eigen::VectorXd alpha_hat = predict_warm_start(sys);
  const Eigen::VectorXd solution = solve_window(sys, alpha_hat, &rec);
  commit_block(solution);
  prev_solution_ = solution;
  have_solution_ = true;
  ++left_block_;

  rec.ser_so_far = stream_ser();
  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return rec;
}

void LotStreamingPipeline::flush() {
  if (!have_solution_ || !done()) return;
  const long PN = static_cast<long>(opts_.P) * N_;
  for (long i = N_; i < PN; ++i) committed_.push_back(prev_recon_(i));
}

double LotStreamingPipeline::stream_ser() const {
  const long n = static_cast<long>(committed_.size());
  const Eigen::VectorXd est = Eigen::Map<const Eigen::VectorXd>(committed_.data(), n);
  if (signal_.head(n).squaredNorm() == 0.0) return 0.0;  // only the zero prefix so far
  return ser_db(signal_.head(n), est);
}

}  // namespace l1stream

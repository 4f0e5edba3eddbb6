#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "l1stream/homotopy.hpp"
#include "l1stream/lot.hpp"
#include "l1stream/prox.hpp"
#include "l1stream/signals.hpp"

namespace l1stream {

/// Weights for the streaming solves: w_i = tau / (beta |alpha_i| + 1) with
/// beta = M ||alpha||_2^2 / ||alpha||_1^2. A zero estimate degenerates
/// beta; the fallback W = tau matches the first-iteration bootstrap.
Eigen::VectorXd update_weights(const Eigen::VectorXd& alpha_hat, double tau, double m);

/// tau = max(1e-2 ||A^T y||_inf, sigma sqrt(log(PN)))
double weight_tau(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double sigma);

enum class StreamingBasis { Lot, Dct };
enum class StreamingSolver { Homotopy, ProxOracle };

struct StreamingSolveOptions {
  StreamingSolver solver = StreamingSolver::Homotopy;
  int bootstrap_reweights = 5;
  // Streaming windows routinely propose near-dependent columns (lapped
  // half-interval restrictions); a stronger pivot keeps the factor sane.
  HomotopyOptions homotopy{.pivot_tol = 1e-8};
  ProxOptions prox;
};

struct IterationRecord {
  int t = 0;                   // streaming iteration (left block index)
  long committed_begin = 0;    // first committed sample this iteration
  long committed_length = 0;
  double ser_so_far = 0.0;     // vs. truth over all committed samples
  int steps = 0;               // homotopy steps (0 for prox)
  double matvecs = 0.0;        // A^T A units
  double objective = 0.0;
  double kkt_residual = 0.0;
  int support_size = 0;
  double wall_ms = 0.0;
};

struct LotPipelineOptions {
  int N = 256;
  int P = 5;
  StreamingBasis basis = StreamingBasis::Lot;
  StreamingSolveOptions solve;
};

/// Sliding active-interval reconstruction with lapped (or block-DCT)
/// bases: assembles the modified measurement system, predicts warm
/// starts, adapts weights, solves the weighted l1 program, and commits
/// the block leaving the window.
class LotStreamingPipeline {
 public:
  /// `signal` is the full stream including its N-zero prefix (block 0);
  /// `meas` holds one measurement block per signal block.
  LotStreamingPipeline(const LotPipelineOptions& opts, const Eigen::VectorXd& signal,
                       const MeasurementStream& meas);

  bool done() const { return left_block_ > last_left_; }
  int left_block() const { return left_block_; }

  /// One streaming iteration: assemble, predict, solve, commit, advance.
  IterationRecord step();

  /// Emits the remaining in-window blocks from the last solution.
  void flush();

  /// Committed samples so far, starting at sample 0 (the window begins
  /// at the zero-prefix block, whose left neighbour contributes nothing).
  const std::vector<double>& committed() const { return committed_; }
  long committed_begin() const { return 0; }
  double stream_ser() const;

  // Exposed window machinery (also exercised directly by tests).
  struct WindowSystem {
    Eigen::MatrixXd A;          // Phi_bar * Psi_tilde, PM x PN
    Eigen::VectorXd y_tilde;    // modified measurements, length PM
    double tau = 0.0;
  };
  WindowSystem assemble_window() const;
  Eigen::VectorXd predict_warm_start(const WindowSystem& sys) const;

 private:
  Eigen::VectorXd solve_window(const WindowSystem& sys, const Eigen::VectorXd& alpha_hat,
                               IterationRecord* rec);
  void commit_block(const Eigen::VectorXd& solution);
  Eigen::VectorXd window_reconstruction(const Eigen::VectorXd& solution) const;

  LotPipelineOptions opts_;
  int N_;
  int M_;
  int total_blocks_;
  int last_left_;
  int left_block_;  // current window covers blocks left..left+P-1
  double sigma_;

  std::optional<LotPartition> partition_;  // LOT basis partition (unused for DCT)
  Eigen::MatrixXd dct_synthesis_;          // N x N (DCT mode)

  const Eigen::VectorXd signal_;
  const MeasurementStream& meas_;

  Eigen::VectorXd committed_alpha_;        // coefficient block of interval left-1
  Eigen::VectorXd prev_solution_;          // last solved alpha over the window
  Eigen::VectorXd prev_recon_;             // reconstruction of the previous window
  bool have_solution_ = false;
  std::vector<double> committed_;
};

}  // namespace l1stream

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "l1stream/signals.hpp"
#include "l1stream/streaming_lot.hpp"
#include "l1stream/wavelet.hpp"

namespace l1stream {

/// x_{t+1} = F x_t + f_t with F a fixed left-circular shift by one;
/// lambda weighs the dynamics rows in the stacked system.
struct DynamicsModel {
  int n = 256;
  double lambda = 0.5;
  Eigen::MatrixXd shift_matrix() const;  // N x N, (Fx)[i] = x[(i+1) mod N]
};

/// Stacked sliding-window system [Phi_bar; sqrt(lambda) F_bar] Psi_tilde.
struct DynamicWindow {
  Eigen::MatrixXd A;        // (PM + PN) x PN, or PM x PN when lambda = 0
  Eigen::VectorXd y;        // [y_tilde; sqrt(lambda) q_tilde]
  Eigen::VectorXd q_tilde;  // length PN (empty when lambda = 0)
  double tau = 0.0;
};

/// Assembles the window system for blocks l..l+P-1 given the committed
/// estimate of block l-1. Psi is the per-block synthesis matrix.
DynamicWindow build_dynamic_system(const std::vector<Eigen::MatrixXd>& Phi,
                                   const std::vector<Eigen::VectorXd>& y,
                                   const Eigen::MatrixXd& Psi,
                                   const Eigen::VectorXd& x_hat_prev,
                                   const DynamicsModel& model, double sigma);

enum class DynamicMethod { L1Dynamic, DwtOnly, LsKalman };
std::string to_string(DynamicMethod method);

struct DynamicPipelineOptions {
  int N = 256;
  int P = 3;
  double lambda = 0.5;
  DynamicMethod method = DynamicMethod::L1Dynamic;
  WaveletSpec wavelet;
  StreamingSolveOptions solve;
};

/// Sliding-window reconstruction of a shift-driven block sequence:
/// weighted l1 with dynamics rows, the lambda=0 wavelet-only variant,
/// or the l2 Kalman filtering/smoothing baseline.
class DynamicStreamingPipeline {
 public:
  /// `blocks` are the true x_1..x_T (for SER); `x0` the seed block the
  /// first window treats as its committed predecessor.
  DynamicStreamingPipeline(const DynamicPipelineOptions& opts, const Eigen::VectorXd& x0,
                           const std::vector<Eigen::VectorXd>& blocks,
                           const MeasurementStream& meas);

  bool done() const { return left_block_ > last_left_; }
  int left_block() const { return left_block_; }

  IterationRecord step();
  void flush();

  const std::vector<double>& committed() const { return committed_; }
  double stream_ser() const;

  DynamicWindow assemble_window() const;
  Eigen::VectorXd predict_warm_start(const DynamicWindow& sys) const;

 private:
  Eigen::VectorXd solve_window(const DynamicWindow& sys, const Eigen::VectorXd& alpha_hat,
                               IterationRecord* rec);
  Eigen::VectorXd kalman_window(IterationRecord* rec);
  Eigen::VectorXd debias_on_support(const DynamicWindow& sys,
                                    const Eigen::VectorXd& x) const;
  void commit_block(const Eigen::VectorXd& block_estimate);

  DynamicPipelineOptions opts_;
  int N_;
  int M_;
  int total_blocks_;   // T
  int last_left_;      // T - P + 1
  int left_block_;     // current window covers blocks left..left+P-1 (1-based)
  double sigma_;

  Eigen::MatrixXd Psi_;  // per-block wavelet synthesis
  Eigen::MatrixXd F_;    // unit circular shift
  std::vector<Eigen::VectorXd> blocks_;
  const MeasurementStream& meas_;

  Eigen::VectorXd x_hat_prev_;     // committed estimate of block left-1
  Eigen::VectorXd prev_solution_;  // coefficients (l1) or samples (Kalman)
  Eigen::VectorXd prev_debiased_;  // refit coefficients used for commits
  bool have_solution_ = false;

  Eigen::VectorXd kalman_prior_mean_;  // x_{l|l-1}
  Eigen::MatrixXd kalman_prior_cov_;   // P_{l|l-1}

  std::vector<double> committed_;
};

}  // namespace l1stream

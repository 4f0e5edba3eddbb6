#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

namespace l1stream {

/// Partition of the sample axis into overlapping intervals
/// I_p = [a_p - eta_p, a_{p+1} + eta_{p+1}], where the split points a_p are
/// half-integers and l_p = a_{p+1} - a_p >= eta_p + eta_{p+1}.
class LotPartition {
 public:
  LotPartition(std::vector<double> split_points, std::vector<int> transition_widths);

  /// Uniform partition: a_p = offset + p*l, all eta equal (the first and
  /// last transition widths can be forced to zero for a bounded stream).
  static LotPartition uniform(int num_intervals, int interval_length, int eta,
                              double first_split, bool taper_edges = true);

  int num_intervals() const { return static_cast<int>(split_.size()) - 1; }
  double split(int p) const { return split_[p]; }
  int eta(int p) const { return eta_[p]; }
  int length(int p) const {
    return static_cast<int>(split_[p + 1] - split_[p]);
  }

  /// First integer sample of I_p and the number of samples it spans.
  long first_sample(int p) const {
    return static_cast<long>(std::ceil(split_[p] - eta_[p]));
  }
  int support_length(int p) const {
    return length(p) + eta_[p] + eta_[p + 1];
  }

  long cover_begin() const { return first_sample(0); }
  long cover_end() const {
    return first_sample(num_intervals() - 1) + support_length(num_intervals() - 1);
  }

 private:
  std::vector<double> split_;
  std::vector<int> eta_;
};

/// One LOT basis function restricted to its interval support.
struct LotBasisVector {
  long first_sample = 0;
  Eigen::VectorXd values;
};

/// Per-interval coefficient vectors alpha_p, lengths l_p.
struct LotCoefficients {
  std::vector<Eigen::VectorXd> alpha;
  long total_size() const {
    long n = 0;
    for (const auto& a : alpha) n += a.size();
    return n;
  }
};

/// psi_{p,k}: windowed cosine-IV function on I_p.
LotBasisVector lot_basis_vector(const LotPartition& partition, int p, int k);

/// Dense interval synthesis matrix: column k is psi_{p,k} over I_p samples.
Eigen::MatrixXd lot_interval_matrix(const LotPartition& partition, int p);

/// alpha_{p,k} = <x, psi_{p,k}>. `x_first_sample` anchors x[0] on the
/// sample axis. With zero_extend the signal is treated as zero outside its
/// buffer; otherwise incomplete coverage raises CoverageError.
LotCoefficients lot_analysis(const Eigen::VectorXd& x, const LotPartition& partition,
                             long x_first_sample = 0, bool zero_extend = false);

/// Overlap-add of the per-interval reconstructions Psi_p alpha_p.
/// The output spans [cover_begin, cover_end) of the partition.
struct LotSignal {
  long first_sample = 0;
  Eigen::VectorXd values;
};
LotSignal lot_synthesis(const LotCoefficients& coeffs, const LotPartition& partition);

/// Active-interval synthesis matrices for the window covering intervals
/// l..r: Pi = [a_l - eta_l, a_{r+1} - eta_{r+1}). `committed` holds the
/// columns of Psi_{l-1} restricted to Pi, `active` the columns of
/// Psi_l..Psi_r restricted to Pi. Column metadata maps columns to (p, k).
struct ActiveSynthesis {
  Eigen::MatrixXd committed;  // |Pi| x l_{l-1}
  Eigen::MatrixXd active;     // |Pi| x sum l_p, p = l..r
  std::vector<std::pair<int, int>> committed_columns;
  std::vector<std::pair<int, int>> active_columns;
  long first_sample = 0;
  long num_samples = 0;
};
ActiveSynthesis active_synthesis_matrix(const LotPartition& partition, int left_interval,
                                        int right_interval);

}  // namespace l1stream

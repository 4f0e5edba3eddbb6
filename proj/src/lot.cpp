#include "l1stream/lot.hpp"

#include <cmath>

#include "l1stream/errors.hpp"

namespace l1stream {

namespace {

/// Malvar/Mallat sine taper: rises as sin(pi/4 (1+t)) across a_p,
/// falls as cos(pi/4 (1+t)) across a_{p+1}, so that squares of adjacent
/// windows sum to one over each 2*eta overlap.
double lot_window(const LotPartition& part, int p, double n) {
  const double a_lo = part.split(p);
  const double a_hi = part.split(p + 1);
  const int eta_lo = part.eta(p);
  const int eta_hi = part.eta(p + 1);
  if (eta_lo > 0 && n < a_lo + eta_lo) {
    const double t = (n - a_lo) / eta_lo;
    return std::sin(M_PI / 4.0 * (1.0 + t));
  }
  if (eta_hi > 0 && n > a_hi - eta_hi) {
    const double t = (n - a_hi) / eta_hi;
    return std::cos(M_PI / 4.0 * (1.0 + t));
  }
  return 1.0;
}

}  // namespace

LotPartition::LotPartition(std::vector<double> split_points,
                           std::vector<int> transition_widths)
    : split_(std::move(split_points)), eta_(std::move(transition_widths)) {
  if (split_.size() < 2 || eta_.size() != split_.size()) {
    throw std::invalid_argument("LotPartition: need >= 2 split points, one eta each");
  }
  for (std::size_t p = 0; p < split_.size(); ++p) {
    const double frac = split_[p] + 0.5;
    if (std::abs(frac - std::round(frac)) > 1e-9) {
      throw std::invalid_argument("LotPartition: split points must be half-integers");
    }
    if (eta_[p] < 0) throw std::invalid_argument("LotPartition: eta must be >= 0");
  }
  for (std::size_t p = 0; p + 1 < split_.size(); ++p) {
    const double l = split_[p + 1] - split_[p];
    if (l < eta_[p] + eta_[p + 1]) {
      throw std::invalid_argument("LotPartition: l_p >= eta_p + eta_{p+1} violated");
    }
  }
}

LotPartition LotPartition::uniform(int num_intervals, int interval_length, int eta,
                                   double first_split, bool taper_edges) {
  std::vector<double> a(num_intervals + 1);
  std::vector<int> e(num_intervals + 1, eta);
  for (int p = 0; p <= num_intervals; ++p) {
    a[p] = first_split + static_cast<double>(p) * interval_length;
  }
  if (!taper_edges) {
    e.front() = 0;
    e.back() = 0;
  }
  return LotPartition(std::move(a), std::move(e));
}

LotBasisVector lot_basis_vector(const LotPartition& partition, int p, int k) {
  const int l = partition.length(p);
  if (p < 0 || p >= partition.num_intervals() || k < 0 || k >= l) {
    throw std::out_of_range("lot_basis_vector: index out of range");
  }
  LotBasisVector psi;
  psi.first_sample = partition.first_sample(p);
  const int len = partition.support_length(p);
  psi.values.resize(len);
  const double a = partition.split(p);
  const double scale = std::sqrt(2.0 / l);
  for (int j = 0; j < len; ++j) {
    const double n = static_cast<double>(psi.first_sample + j);
    psi.values(j) = lot_window(partition, p, n) * scale *
                    std::cos(M_PI * (k + 0.5) * (n - a) / l);
  }
  return psi;
}

Eigen::MatrixXd lot_interval_matrix(const LotPartition& partition, int p) {
  const int l = partition.length(p);
  const int len = partition.support_length(p);
  Eigen::MatrixXd Psi(len, l);
  for (int k = 0; k < l; ++k) {
    Psi.col(k) = lot_basis_vector(partition, p, k).values;
  }
  return Psi;
}

LotCoefficients lot_analysis(const Eigen::VectorXd& x, const LotPartition& partition,
                             long x_first_sample, bool zero_extend) {
  LotCoefficients coeffs;
  const int P = partition.num_intervals();
  coeffs.alpha.resize(P);
  for (int p = 0; p < P; ++p) {
    const long first = partition.first_sample(p);
    const int len = partition.support_length(p);
    if (!zero_extend &&
        (first < x_first_sample || first + len > x_first_sample + x.size())) {
      throw CoverageError("lot_analysis: partition exceeds the provided samples");
    }
    Eigen::VectorXd seg = Eigen::VectorXd::Zero(len);
    for (int j = 0; j < len; ++j) {
      const long idx = first + j - x_first_sample;
      if (idx >= 0 && idx < x.size()) seg(j) = x(idx);
    }
    coeffs.alpha[p] = lot_interval_matrix(partition, p).transpose() * seg;
  }
  return coeffs;
}

LotSignal lot_synthesis(const LotCoefficients& coeffs, const LotPartition& partition) {
  const int P = partition.num_intervals();
  if (static_cast<int>(coeffs.alpha.size()) != P) {
    throw DimensionMismatchError("lot_synthesis: coefficient blocks != intervals");
  }
  LotSignal out;
  out.first_sample = partition.cover_begin();
  out.values = Eigen::VectorXd::Zero(partition.cover_end() - out.first_sample);
  for (int p = 0; p < P; ++p) {
    const Eigen::VectorXd xt = lot_interval_matrix(partition, p) * coeffs.alpha[p];
    const long off = partition.first_sample(p) - out.first_sample;
    out.values.segment(off, xt.size()) += xt;
  }
  return out;
}

ActiveSynthesis active_synthesis_matrix(const LotPartition& partition, int left_interval,
                                        int right_interval) {
  const int P = partition.num_intervals();
  const int l = left_interval;
  const int r = right_interval;
  if (l < 1 || r < l || r >= P) {
    throw AlignmentError("active_synthesis_matrix: window not aligned to partition");
  }
  // Pi = [a_l - eta_l, a_{r+1} - eta_{r+1}): I_l fully inside, I_{l-1}
  // overlaps from the left, I_{r+1} lies completely outside.
  const double lo = partition.split(l) - partition.eta(l);
  const double hi = partition.split(r + 1) - partition.eta(r + 1);
  if (partition.split(l + 1) + partition.eta(l + 1) > hi + 0.5) {
    throw AlignmentError("active_synthesis_matrix: I_l not fully inside the window");
  }

  ActiveSynthesis out;
  out.first_sample = static_cast<long>(std::ceil(lo));
  out.num_samples = static_cast<long>(std::ceil(hi)) - out.first_sample;

  auto restricted = [&](int p) {
    const Eigen::MatrixXd Psi = lot_interval_matrix(partition, p);
    const long first = partition.first_sample(p);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(out.num_samples, Psi.cols());
    for (int j = 0; j < Psi.rows(); ++j) {
      const long row = first + j - out.first_sample;
      if (row >= 0 && row < out.num_samples) R.row(row) = Psi.row(j);
    }
    return R;
  };

  out.committed = restricted(l - 1);
  for (int k = 0; k < partition.length(l - 1); ++k) {
    out.committed_columns.emplace_back(l - 1, k);
  }

  long total_cols = 0;
  for (int p = l; p <= r; ++p) total_cols += partition.length(p);
  out.active.resize(out.num_samples, total_cols);
  long col = 0;
  for (int p = l; p <= r; ++p) {
    out.active.middleCols(col, partition.length(p)) = restricted(p);
    for (int k = 0; k < partition.length(p); ++k) out.active_columns.emplace_back(p, k);
    col += partition.length(p);
  }
  return out;
}

}  // namespace l1stream

#pragma once

#include <Eigen/Dense>

namespace l1stream {

enum class DaubechiesVariant {
  EightTap,       // 4 vanishing moments (D4 in tap-pair naming)
  SixteenTap,     // 8 vanishing moments; default, Wavelab-style "Daubechies-8"
};

/// Orthogonal block wavelet: periodized filter-bank transform.
struct WaveletSpec {
  DaubechiesVariant variant = DaubechiesVariant::SixteenTap;
  int levels = 5;
  int block_length = 256;  // power of two, divisible by 2^levels

  Eigen::VectorXd lowpass() const;  // scaling filter, unit l2 norm
  void validate() const;
};

/// Periodized orthogonal DWT of one block. Layout:
/// [approx_J | detail_J | detail_{J-1} | ... | detail_1].
Eigen::VectorXd dwt_block(const Eigen::VectorXd& x, const WaveletSpec& spec);
Eigen::VectorXd idwt_block(const Eigen::VectorXd& coeffs, const WaveletSpec& spec);

/// Orthonormal DCT-II block transform and inverse.
Eigen::VectorXd dct_block(const Eigen::VectorXd& x);
Eigen::VectorXd idct_block(const Eigen::VectorXd& coeffs);

/// Dense synthesis matrices (columns = basis vectors), for system assembly.
Eigen::MatrixXd idwt_matrix(const WaveletSpec& spec);
Eigen::MatrixXd idct_matrix(int n);

}  // namespace l1stream

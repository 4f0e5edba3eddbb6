#include "l1stream/wavelet.hpp"

#include <cmath>

#include "l1stream/errors.hpp"

namespace l1stream {

namespace {

// Daubechies scaling filters (minimum phase, sum = sqrt(2)), obtained by
// spectral factorization of the maxflat half-band polynomial and checked
// by the double-shift orthogonality tests.
constexpr double kDb4Tap8[] = {
    2.3037781330889615e-01, 7.1484657055291478e-01, 6.3088076792985859e-01,
    -2.7983769416858730e-02, -1.8703481171909234e-01, 3.0841381835560702e-02,
    3.2883011666885113e-02, -1.0597401785069000e-02,
};
constexpr double kDb8Tap16[] = {
    5.4415842243148098e-02, 3.1287159091453731e-01, 6.7563073629773207e-01,
    5.8535468365440102e-01, -1.5829105256741395e-02, -2.8401554296203257e-01,
    4.7248457384968160e-04, 1.2874742662057520e-01, -1.7369301001850204e-02,
    -4.4088253930845048e-02, 1.3981027917414101e-02, 8.7460940474145561e-03,
    -4.8703529934568252e-03, -3.9174037337722363e-04, 6.7544940645129000e-04,
    -1.1747678412489912e-04,
};

Eigen::VectorXd highpass_from_lowpass(const Eigen::VectorXd& h) {
  const Eigen::Index L = h.size();
  Eigen::VectorXd g(L);
  for (Eigen::Index k = 0; k < L; ++k) {
    g(k) = (k % 2 == 0 ? 1.0 : -1.0) * h(L - 1 - k);
  }
  return g;
}

}  // namespace

Eigen::VectorXd WaveletSpec::lowpass() const {
  if (variant == DaubechiesVariant::EightTap) {
    return Eigen::Map<const Eigen::VectorXd>(kDb4Tap8, 8);
  }
  return Eigen::Map<const Eigen::VectorXd>(kDb8Tap16, 16);
}

void WaveletSpec::validate() const {
  if (levels < 1) throw std::invalid_argument("WaveletSpec: levels >= 1");
  if (block_length <= 0 || (block_length & (block_length - 1)) != 0) {
    throw std::invalid_argument("WaveletSpec: block_length must be a power of two");
  }
  if (block_length % (1 << levels) != 0) {
    throw std::invalid_argument("WaveletSpec: block_length not divisible by 2^levels");
  }
}

Eigen::VectorXd dwt_block(const Eigen::VectorXd& x, const WaveletSpec& spec) {
  spec.validate();
  if (x.size() != spec.block_length) {
    throw DimensionMismatchError("dwt_block: length mismatch");
  }
  const Eigen::VectorXd h = spec.lowpass();
  const Eigen::VectorXd g = highpass_from_lowpass(h);
  const Eigen::Index L = h.size();

  Eigen::VectorXd out(x.size());
  Eigen::VectorXd approx = x;
  Eigen::Index write_end = x.size();
  for (int lev = 0; lev < spec.levels; ++lev) {
    const Eigen::Index n = approx.size();
    const Eigen::Index half = n / 2;
    Eigen::VectorXd a(half), d(half);
    for (Eigen::Index i = 0; i < half; ++i) {
      double sa = 0.0, sd = 0.0;
      for (Eigen::Index k = 0; k < L; ++k) {
        const double v = approx((2 * i + k) % n);
        sa += h(k) * v;
        sd += g(k) * v;
      }
      a(i) = sa;
      d(i) = sd;
    }
    out.segment(write_end - half, half) = d;
    write_end -= half;
    approx = std::move(a);
  }
  out.head(write_end) = approx;
  return out;
}

Eigen::VectorXd idwt_block(const Eigen::VectorXd& coeffs, const WaveletSpec& spec) {
  spec.validate();
  if (coeffs.size() != spec.block_length) {
    throw DimensionMismatchError("idwt_block: length mismatch");
  }
  const Eigen::VectorXd h = spec.lowpass();
  const Eigen::VectorXd g = highpass_from_lowpass(h);
  const Eigen::Index L = h.size();

  const Eigen::Index coarse = coeffs.size() >> spec.levels;
  Eigen::VectorXd approx = coeffs.head(coarse);
  Eigen::Index read_begin = coarse;
  for (int lev = 0; lev < spec.levels; ++lev) {
    const Eigen::Index half = approx.size();
    const Eigen::VectorXd d = coeffs.segment(read_begin, half);
    read_begin += half;
    const Eigen::Index n = 2 * half;
    Eigen::VectorXd up = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < half; ++i) {
      for (Eigen::Index k = 0; k < L; ++k) {
        up((2 * i + k) % n) += h(k) * approx(i) + g(k) * d(i);
      }
    }
    approx = std::move(up);
  }
  return approx;
}

Eigen::VectorXd dct_block(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd c(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      s += x(j) * std::cos(M_PI * (2.0 * j + 1.0) * k / (2.0 * n));
    }
    c(k) = s * (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n));
  }
  return c;
}

Eigen::VectorXd idct_block(const Eigen::VectorXd& coeffs) {
  return idct_matrix(static_cast<int>(coeffs.size())) * coeffs;
}

Eigen::MatrixXd idwt_matrix(const WaveletSpec& spec) {
  const int n = spec.block_length;
  Eigen::MatrixXd Psi(n, n);
  for (int k = 0; k < n; ++k) {
    Psi.col(k) = idwt_block(Eigen::VectorXd::Unit(n, k), spec);
  }
  return Psi;
}

Eigen::MatrixXd idct_matrix(int n) {
  Eigen::MatrixXd Psi(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      Psi(j, k) = (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n)) *
                  std::cos(M_PI * (2.0 * j + 1.0) * k / (2.0 * n));
    }
  }
  return Psi;
}

}  // namespace l1stream

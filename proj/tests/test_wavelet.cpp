#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "l1stream/rng.hpp"
#include "l1stream/wavelet.hpp"

using namespace l1stream;

namespace {

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  CounterRng rng(seed, 31);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.gaussian();
  return x;
}

}  // namespace

TEST_CASE("scaling filter identities") {
  for (auto variant : {DaubechiesVariant::EightTap, DaubechiesVariant::SixteenTap}) {
    WaveletSpec spec;
    spec.variant = variant;
    const Eigen::VectorXd h = spec.lowpass();
    CHECK(h.size() == (variant == DaubechiesVariant::EightTap ? 8 : 16));
    // unit energy and sum sqrt(2) (lowpass normalization)
    CHECK(std::abs(h.squaredNorm() - 1.0) <= 1e-11);
    CHECK(std::abs(h.sum() - std::sqrt(2.0)) <= 1e-11);
    // double-shift orthogonality: <h, h(. - 2k)> = delta_k
    for (int k = 1; 2 * k < h.size(); ++k) {
      double dot = 0.0;
      for (int n = 2 * k; n < h.size(); ++n) dot += h(n) * h(n - 2 * k);
      CHECK(std::abs(dot) <= 1e-11);
    }
  }
}

TEST_CASE("perfect reconstruction and parseval") {
  WaveletSpec spec;  // 16-tap, 5 levels, N = 256
  const Eigen::VectorXd x = random_vector(256, 1);
  const Eigen::VectorXd a = dwt_block(x, spec);
  CHECK((idwt_block(a, spec) - x).norm() <= 1e-10);
  CHECK(std::abs(a.squaredNorm() - x.squaredNorm()) <= 1e-10 * x.squaredNorm());

  WaveletSpec small;
  small.variant = DaubechiesVariant::EightTap;
  small.levels = 3;
  small.block_length = 64;
  const Eigen::VectorXd xs = random_vector(64, 2);
  const Eigen::VectorXd as = dwt_block(xs, small);
  CHECK((idwt_block(as, small) - xs).norm() <= 1e-10);
  CHECK(std::abs(as.squaredNorm() - xs.squaredNorm()) <= 1e-10 * xs.squaredNorm());
}

TEST_CASE("constant blocks land entirely in the approximation band") {
  WaveletSpec spec;
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(256, 1.7);
  const Eigen::VectorXd a = dwt_block(x, spec);
  const int approx = 256 >> spec.levels;
  CHECK(a.tail(256 - approx).lpNorm<Eigen::Infinity>() <= 1e-10);
  CHECK(std::abs(a.head(approx).squaredNorm() - x.squaredNorm()) <= 1e-10 * x.squaredNorm());
}

TEST_CASE("synthesis matrix is orthonormal and matches the transform") {
  WaveletSpec spec;
  spec.levels = 4;
  spec.block_length = 128;
  const Eigen::MatrixXd Psi = idwt_matrix(spec);
  CHECK((Psi.transpose() * Psi - Eigen::MatrixXd::Identity(128, 128)).norm() <= 1e-10);
  const Eigen::VectorXd a = random_vector(128, 3);
  CHECK((Psi * a - idwt_block(a, spec)).norm() <= 1e-12);
  // analysis is the adjoint
  const Eigen::VectorXd x = random_vector(128, 4);
  CHECK((Psi.transpose() * x - dwt_block(x, spec)).norm() <= 1e-10);
}

TEST_CASE("orthonormal dct block transform") {
  const Eigen::VectorXd x = random_vector(256, 5);
  const Eigen::VectorXd c = dct_block(x);
  CHECK((idct_block(c) - x).norm() <= 1e-10);
  CHECK(std::abs(c.squaredNorm() - x.squaredNorm()) <= 1e-10 * x.squaredNorm());

  const Eigen::MatrixXd Psi = idct_matrix(64);
  CHECK((Psi.transpose() * Psi - Eigen::MatrixXd::Identity(64, 64)).norm() <= 1e-10);
  const Eigen::VectorXd a = random_vector(64, 6);
  CHECK((Psi * a - idct_block(a)).norm() <= 1e-12);
}

TEST_CASE("spec validation") {
  WaveletSpec bad;
  bad.block_length = 48;  // not a power of two
  CHECK_THROWS(bad.validate());
  WaveletSpec bad2;
  bad2.block_length = 16;
  bad2.levels = 5;  // 16 not divisible by 2^5
  CHECK_THROWS(bad2.validate());
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "l1stream/errors.hpp"
#include "l1stream/lot.hpp"
#include "l1stream/rng.hpp"

using namespace l1stream;

namespace {

Eigen::VectorXd random_vector(long n, std::uint64_t seed) {
  CounterRng rng(seed, 41);
  Eigen::VectorXd x(n);
  for (long i = 0; i < n; ++i) x(i) = rng.gaussian();
  return x;
}

// All basis vectors of the partition as columns of one ambient matrix
// over [cover_begin, cover_end).
Eigen::MatrixXd full_basis(const LotPartition& part) {
  const long n = part.cover_end() - part.cover_begin();
  long cols = 0;
  for (int p = 0; p < part.num_intervals(); ++p) cols += part.length(p);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, cols);
  long c = 0;
  for (int p = 0; p < part.num_intervals(); ++p) {
    for (int k = 0; k < part.length(p); ++k) {
      const LotBasisVector v = lot_basis_vector(part, p, k);
      B.col(c++).segment(v.first_sample - part.cover_begin(), v.values.size()) =
          v.values;
    }
  }
  return B;
}

}  // namespace

TEST_CASE("uniform partition geometry") {
  // taper_edges = false squares off the stream ends: no transition
  // outside the covered region, so the basis is complete over the span
  const LotPartition part = LotPartition::uniform(4, 256, 128, 127.5, false);
  REQUIRE(part.num_intervals() == 4);
  CHECK(part.split(0) == 127.5);
  CHECK(part.split(1) == 383.5);
  CHECK(part.length(2) == 256);
  CHECK(part.eta(0) == 0);
  CHECK(part.eta(4) == 0);
  CHECK(part.eta(1) == 128);
  CHECK(part.first_sample(1) == 256);           // ceil(383.5 - 128)
  CHECK(part.support_length(1) == 256 + 256);   // l + eta_l + eta_r
  CHECK(part.cover_begin() == 128);
  CHECK(part.cover_end() == 128 + 4 * 256);

  // the default tapers both stream edges instead
  const LotPartition tapered = LotPartition::uniform(4, 256, 128, 127.5);
  CHECK(tapered.eta(0) == 128);
  CHECK(tapered.cover_begin() == 0);
  CHECK(tapered.cover_end() == 1280);
}

TEST_CASE("basis orthonormality at N=256, eta=128") {
  for (bool taper_edges : {false, true}) {
    const LotPartition part = LotPartition::uniform(4, 256, 128, 127.5, taper_edges);
    const Eigen::MatrixXd B = full_basis(part);
    REQUIRE(B.cols() == 4 * 256);
    const Eigen::MatrixXd G = B.transpose() * B;
    CHECK((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).lpNorm<Eigen::Infinity>() <=
          1e-10);
  }
}

TEST_CASE("analysis/synthesis perfect reconstruction and parseval") {
  const LotPartition part = LotPartition::uniform(4, 256, 128, 127.5, false);
  const long n = part.cover_end() - part.cover_begin();
  const Eigen::VectorXd x = random_vector(n, 1);

  const LotCoefficients coeffs = lot_analysis(x, part, part.cover_begin());
  REQUIRE(coeffs.total_size() == 4 * 256);
  const LotSignal rec = lot_synthesis(coeffs, part);
  CHECK(rec.first_sample == part.cover_begin());
  CHECK((rec.values - x).lpNorm<Eigen::Infinity>() <= 1e-10);

  double energy = 0.0;
  for (const auto& a : coeffs.alpha) energy += a.squaredNorm();
  CHECK(std::abs(energy - x.squaredNorm()) <= 1e-10 * x.squaredNorm());
}

TEST_CASE("coverage is enforced unless zero extension is requested") {
  const LotPartition part = LotPartition::uniform(4, 256, 128, 127.5, false);
  const Eigen::VectorXd x = random_vector(512, 2);
  CHECK_THROWS_AS(lot_analysis(x, part, part.cover_begin()), CoverageError);
  CHECK_NOTHROW(lot_analysis(x, part, part.cover_begin(), true));
}

TEST_CASE("active synthesis matrix matches overlap-add on the window") {
  const LotPartition part = LotPartition::uniform(6, 256, 128, 127.5);
  const int l = 2, r = 4;
  const ActiveSynthesis act = active_synthesis_matrix(part, l, r);

  REQUIRE(act.committed.cols() == part.length(l - 1));
  long active_cols = 0;
  for (int p = l; p <= r; ++p) active_cols += part.length(p);
  REQUIRE(act.active.cols() == active_cols);
  REQUIRE(act.committed.rows() == act.num_samples);
  CHECK(act.committed_columns.front() == std::pair<int, int>{l - 1, 0});
  CHECK(act.active_columns.front() == std::pair<int, int>{l, 0});
  CHECK(act.active_columns.back() == std::pair<int, int>{r, part.length(r) - 1});

  // Populate intervals l-1..r with random coefficients, zero elsewhere,
  // and compare the full overlap-add restricted to the window samples.
  LotCoefficients coeffs;
  for (int p = 0; p < part.num_intervals(); ++p) {
    coeffs.alpha.push_back(p >= l - 1 && p <= r
                               ? random_vector(part.length(p), 10 + p)
                               : Eigen::VectorXd::Zero(part.length(p)));
  }
  const LotSignal full = lot_synthesis(coeffs, part);

  Eigen::VectorXd alpha_active(active_cols);
  long c = 0;
  for (int p = l; p <= r; ++p) {
    alpha_active.segment(c, part.length(p)) = coeffs.alpha[p];
    c += part.length(p);
  }
  const Eigen::VectorXd window =
      act.committed * coeffs.alpha[l - 1] + act.active * alpha_active;
  const Eigen::VectorXd want =
      full.values.segment(act.first_sample - full.first_sample, act.num_samples);
  CHECK((window - want).lpNorm<Eigen::Infinity>() <= 1e-10);
}

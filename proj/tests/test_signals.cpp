#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>

#include "l1stream/errors.hpp"
#include "l1stream/rng.hpp"
#include "l1stream/signals.hpp"

using namespace l1stream;

TEST_CASE("generated streams start with a zero block") {
  for (auto kind : {SignalKind::LinChirp, SignalKind::MishMash, SignalKind::HeaviSine,
                    SignalKind::PieceRegular}) {
    SignalSpec spec;
    spec.kind = kind;
    spec.total_length = 1024;
    spec.block_length = 256;
    const Eigen::VectorXd x = gen_signal(spec);
    REQUIRE(x.size() == 256 + 1024);
    CHECK(x.head(256).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(x.tail(1024).lpNorm<Eigen::Infinity>() > 0.1);
    // deterministic
    CHECK((gen_signal(spec) - x).norm() == 0.0);
  }
  SignalSpec bad;
  bad.total_length = 1000;  // not divisible by N
  CHECK_THROWS_AS(gen_signal(bad), ConfigError);
}

TEST_CASE("signal kind names round trip") {
  for (auto kind : {SignalKind::LinChirp, SignalKind::MishMash, SignalKind::HeaviSine,
                    SignalKind::PieceRegular}) {
    CHECK(signal_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(signal_kind_from_string("nope"), ConfigError);
}

TEST_CASE("dynamic sequence is the shifted interpolant of the seed block") {
  const int n = 64, T = 12;
  CounterRng seed_rng(9, 7);
  Eigen::VectorXd x0(n);
  for (int i = 0; i < n; ++i) x0(i) = seed_rng.gaussian();

  const auto blocks = gen_dynamic_sequence(x0, T, 5);
  REQUIRE(static_cast<int>(blocks.size()) == T);

  // Reproduce with the documented draw sequence: shifts accumulate as
  // eps_t ~ uniform(0.5, 1.5) on stream 1 of the seed.
  CounterRng rng(5, 1);
  double shift = 0.0;
  for (int t = 0; t < T; ++t) {
    shift += rng.uniform(0.5, 1.5);
    const double w = std::fmod(shift, double(n));
    const long k = static_cast<long>(std::floor(w));
    const double f = w - double(k);
    for (int i = 0; i < n; ++i) {
      const double want = (1.0 - f) * x0((i + k) % n) + f * x0((i + k + 1) % n);
      CHECK(blocks[t](i) == doctest::Approx(want).epsilon(1e-15));
    }
    // linear interpolation of a circular shift cannot gain energy
    CHECK(blocks[t].norm() <= x0.norm() + 1e-12);
  }

  // a constant block is invariant under any shift
  const auto flat = gen_dynamic_sequence(Eigen::VectorXd::Constant(n, 2.5), 4, 1);
  for (const auto& b : flat) {
    CHECK((b - Eigen::VectorXd::Constant(n, 2.5)).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("measurement matrices are scaled sign flips with calibrated noise") {
  const int N = 256, R = 4, T = 8;
  SignalSpec sspec;
  sspec.kind = SignalKind::HeaviSine;
  sspec.total_length = T * N;
  sspec.block_length = N;
  const auto blocks = split_blocks(gen_signal(sspec).tail(T * N), N);

  MeasurementSpec mspec;
  mspec.block_length = N;
  mspec.compression = R;
  mspec.snr_db = 35.0;
  mspec.seed = 3;
  REQUIRE(mspec.measurements() == 64);
  const MeasurementStream meas = gen_measurements(blocks, mspec);
  REQUIRE(meas.Phi.size() == static_cast<std::size_t>(T));

  double clean_energy = 0.0;
  for (int t = 0; t < T; ++t) {
    REQUIRE(meas.Phi[t].rows() == 64);
    REQUIRE(meas.Phi[t].cols() == N);
    // every entry is +-1/sqrt(M) = +-1/8
    CHECK((meas.Phi[t].array().abs() - 0.125).abs().maxCoeff() <= 1e-15);
    clean_energy += (meas.Phi[t] * blocks[t]).squaredNorm();
  }
  // sigma calibrated against the realized mean measurement energy
  const double snr =
      10.0 * std::log10(clean_energy / T / 64.0 / (meas.sigma * meas.sigma));
  CHECK(std::abs(snr - 35.0) <= 1e-9);

  // noiseless mode reproduces Phi x exactly
  mspec.snr_db = std::numeric_limits<double>::infinity();
  const MeasurementStream clean = gen_measurements(blocks, mspec);
  CHECK(clean.sigma == 0.0);
  CHECK((clean.y[2] - clean.Phi[2] * blocks[2]).norm() == 0.0);
  // same seed, same matrices
  CHECK((clean.Phi[2] - meas.Phi[2]).norm() == 0.0);

  MeasurementSpec bad;
  bad.block_length = 256;
  bad.compression = 3;  // must divide N
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("signal-to-error ratio") {
  Eigen::VectorXd x(4);
  x << 1, 2, 3, 4;
  CHECK(ser_db(x, x) == 300.0);
  CHECK(ser_db(x, Eigen::VectorXd::Zero(4)) == doctest::Approx(0.0));
  CHECK(ser_db(x, 0.5 * x) == doctest::Approx(-10.0 * std::log10(0.25)));
  // scaling the error by 1/sqrt(10) gains exactly 10 dB
  CHECK(ser_db(x, x - 0.1 * x) - ser_db(x, x - 0.1 * std::sqrt(10.0) * x) ==
        doctest::Approx(10.0));
  CHECK_THROWS_AS(ser_db(Eigen::VectorXd::Zero(4), x), ZeroReferenceError);
  CHECK_THROWS_AS(ser_db(x, Eigen::VectorXd::Zero(3)), DimensionMismatchError);
}

TEST_CASE("binary and csv export round trip") {
  CounterRng rng(11, 8);
  Eigen::VectorXd x(100);
  for (int i = 0; i < 100; ++i) x(i) = rng.gaussian();
  const std::string path = "test_signals_roundtrip.bin";
  write_signal_binary(path, x, 10, 5, 10);
  const Eigen::VectorXd back = read_signal_binary(path);
  CHECK((back - x).norm() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("block splitting") {
  Eigen::VectorXd x(6);
  x << 1, 2, 3, 4, 5, 6;
  const auto blocks = split_blocks(x, 3);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[1](0) == 4.0);
  CHECK_THROWS_AS(split_blocks(x, 4), DimensionMismatchError);
}

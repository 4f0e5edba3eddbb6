#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace l1stream {

enum class SignalKind { LinChirp, MishMash, HeaviSine, PieceRegular };

SignalKind signal_kind_from_string(const std::string& name);
std::string to_string(SignalKind kind);

struct SignalSpec {
  SignalKind kind = SignalKind::LinChirp;
  long total_length = 1 << 15;  // generated samples, before the zero prefix
  int block_length = 256;       // N; the stream is prepended with N zeros
};

/// Deterministic test-signal generator. The output has length
/// block_length + total_length; the first block_length samples are zero.
Eigen::VectorXd gen_signal(const SignalSpec& spec, std::uint64_t seed = 0);

/// Blocks x_1..x_T from a seed block x_0 by repeated non-integer
/// left-circular shifts eps_t ~ uniform(0.5, 1.5), linear interpolation.
std::vector<Eigen::VectorXd> gen_dynamic_sequence(const Eigen::VectorXd& x0, int T,
                                                  std::uint64_t seed);

struct MeasurementSpec {
  int block_length = 256;  // N
  int compression = 4;     // R; M = N/R
  double snr_db = 35.0;    // infinity() => noiseless
  std::uint64_t seed = 0;
  int measurements() const { return block_length / compression; }
  void validate() const;
};

/// Per-block Rademacher (+-1/sqrt(M)) measurements of a block stream.
/// sigma is set from the realized clean measurement energy so that
/// 10*log10(mean ||Phi x||^2 / (M sigma^2)) equals snr_db.
struct MeasurementStream {
  std::vector<Eigen::MatrixXd> Phi;  // M x N per block
  std::vector<Eigen::VectorXd> y;    // noisy measurements
  double sigma = 0.0;
};
MeasurementStream gen_measurements(const std::vector<Eigen::VectorXd>& blocks,
                                   const MeasurementSpec& spec);

/// Signal-to-error ratio in dB: -10 log10(||x - xhat||^2 / ||x||^2),
/// capped at 300 dB for exact recovery. Throws ZeroReferenceError on x = 0.
double ser_db(const Eigen::VectorXd& x_true, const Eigen::VectorXd& x_est);

/// Flat binary export: magic "L1SB", int64 N, M, T header, then
/// little-endian doubles. CSV export is one value per line.
void write_signal_binary(const std::string& path, const Eigen::VectorXd& x, long n,
                         long m, long t);
void write_signal_csv(const std::string& path, const Eigen::VectorXd& x);
Eigen::VectorXd read_signal_binary(const std::string& path);

/// Splits a sample stream into consecutive length-N blocks.
std::vector<Eigen::VectorXd> split_blocks(const Eigen::VectorXd& x, int n);

}  // namespace l1stream

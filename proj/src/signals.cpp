#include "l1stream/signals.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "l1stream/errors.hpp"
#include "l1stream/rng.hpp"

namespace l1stream {

SignalKind signal_kind_from_string(const std::string& name) {
  if (name == "LinChirp" || name == "linchirp") return SignalKind::LinChirp;
  if (name == "MishMash" || name == "mishmash") return SignalKind::MishMash;
  if (name == "HeaviSine" || name == "heavisine") return SignalKind::HeaviSine;
  if (name == "PieceRegular" || name == "pieceregular") return SignalKind::PieceRegular;
  throw ConfigError("unknown signal kind: " + name);
}

std::string to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::LinChirp: return "LinChirp";
    case SignalKind::MishMash: return "MishMash";
    case SignalKind::HeaviSine: return "HeaviSine";
    case SignalKind::PieceRegular: return "PieceRegular";
  }
  return "?";
}

namespace {

double linchirp(double n, double length) {
  // instantaneous frequency n/(2L) cycles/sample: 0 -> Nyquist/... 0.5 at n=L
  return std::sin(M_PI * n * n / (2.0 * length));
}

double quadchirp(double n, double length) {
  return std::sin((M_PI / 3.0) * n * n * n / (length * length));
}

double heavisine(double t) {
  const double s = 4.0 * std::sin(4.0 * M_PI * t);
  const auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  return s - sign(t - 0.3) - sign(0.72 - t);
}

double piece_regular(double t) {
  // Deterministic piecewise polynomial/heavisine composite with jumps.
  if (t < 0.15) return 10.0 * t * (1.0 - 4.0 * t);
  if (t < 0.3) return -1.5 + 20.0 * (t - 0.15) * (t - 0.15);
  if (t < 0.45) return 0.5 * heavisine((t - 0.3) / 0.15);
  if (t < 0.6) return 3.0 - 12.0 * (t - 0.45);
  if (t < 0.8) {
    const double s = (t - 0.6) / 0.2;
    return -1.0 + 6.0 * s * s * (1.0 - s);
  }
  return 2.0 * std::sin(10.0 * M_PI * (t - 0.8)) * (1.0 - t) / 0.2;
}

}  // namespace

Eigen::VectorXd gen_signal(const SignalSpec& spec, std::uint64_t /*seed*/) {
  const long L = spec.total_length;
  const long prefix = spec.block_length;
  if (L % spec.block_length != 0) {
    throw ConfigError("gen_signal: total_length must be divisible by block_length");
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(prefix + L);
  for (long n = 0; n < L; ++n) {
    const double t = static_cast<double>(n) / static_cast<double>(L);
    double v = 0.0;
    switch (spec.kind) {
      case SignalKind::LinChirp:
        v = linchirp(static_cast<double>(n), static_cast<double>(L));
        break;
      case SignalKind::MishMash:
        v = linchirp(static_cast<double>(n), static_cast<double>(L)) +
            quadchirp(static_cast<double>(n), static_cast<double>(L)) +
            std::sin(0.6902 * M_PI * static_cast<double>(n));
        break;
      case SignalKind::HeaviSine:
        v = heavisine(t);
        break;
      case SignalKind::PieceRegular:
        v = piece_regular(t);
        break;
    }
    x(prefix + n) = v;
  }
  return x;
}

std::vector<Eigen::VectorXd> gen_dynamic_sequence(const Eigen::VectorXd& x0, int T,
                                                  std::uint64_t seed) {
  const Eigen::Index n = x0.size();
  CounterRng rng(seed, /*stream=*/1);
  std::vector<Eigen::VectorXd> blocks;
  blocks.reserve(T);
  // Each block samples the underlying circularly shifted signal at the
  // accumulated offset, so the recurrence x_{t+1}[i] = x_t[i + eps_t] holds
  // without compounding interpolation error (which would progressively
  // low-pass the signal and erase its sharp features).
  double shift = 0.0;
  for (int t = 0; t < T; ++t) {
    shift += rng.uniform(0.5, 1.5);
    const double wrapped = std::fmod(shift, static_cast<double>(n));
    const long whole = static_cast<long>(std::floor(wrapped));
    const double frac = wrapped - static_cast<double>(whole);
    Eigen::VectorXd next(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index a = (i + whole) % n;
      const Eigen::Index b = (i + whole + 1) % n;
      next(i) = (1.0 - frac) * x0(a) + frac * x0(b);
    }
    blocks.push_back(std::move(next));
  }
  return blocks;
}

void MeasurementSpec::validate() const {
  if (block_length <= 0 || compression <= 0 || block_length % compression != 0) {
    throw ConfigError("MeasurementSpec: R must divide N");
  }
  if (measurements() < 1) throw ConfigError("MeasurementSpec: M >= 1");
}

MeasurementStream gen_measurements(const std::vector<Eigen::VectorXd>& blocks,
                                   const MeasurementSpec& spec) {
  spec.validate();
  const int N = spec.block_length;
  const int M = spec.measurements();
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));

  MeasurementStream out;
  CounterRng matrix_rng(spec.seed, /*stream=*/2);
  double clean_energy = 0.0;
  std::vector<Eigen::VectorXd> clean;
  for (const auto& x : blocks) {
    if (x.size() != N) throw DimensionMismatchError("gen_measurements: block length");
    Eigen::MatrixXd Phi(M, N);
    for (int i = 0; i < M; ++i) {
      for (int j = 0; j < N; ++j) Phi(i, j) = scale * matrix_rng.rademacher();
    }
    Eigen::VectorXd yc = Phi * x;
    clean_energy += yc.squaredNorm();
    out.Phi.push_back(std::move(Phi));
    clean.push_back(std::move(yc));
  }

  const double mean_energy = clean_energy / static_cast<double>(blocks.size());
  if (std::isinf(spec.snr_db)) {
    out.sigma = 0.0;
  } else {
    out.sigma = std::sqrt(mean_energy / M / std::pow(10.0, spec.snr_db / 10.0));
  }

  CounterRng noise_rng(spec.seed, /*stream=*/3);
  for (auto& yc : clean) {
    Eigen::VectorXd y = yc;
    if (out.sigma > 0.0) {
      for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += out.sigma * noise_rng.gaussian();
    }
    out.y.push_back(std::move(y));
  }
  return out;
}

double ser_db(const Eigen::VectorXd& x_true, const Eigen::VectorXd& x_est) {
  if (x_true.size() != x_est.size()) {
    throw DimensionMismatchError("ser_db: length mismatch");
  }
  const double ref = x_true.squaredNorm();
  if (ref == 0.0) throw ZeroReferenceError("ser_db: zero reference signal");
  const double err = (x_true - x_est).squaredNorm();
  if (err == 0.0) return 300.0;
  return std::min(300.0, -10.0 * std::log10(err / ref));
}

void write_signal_binary(const std::string& path, const Eigen::VectorXd& x, long n,
                         long m, long t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  const char magic[4] = {'L', '1', 'S', 'B'};
  f.write(magic, 4);
  const std::int64_t hdr[3] = {n, m, t};
  f.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
  f.write(reinterpret_cast<const char*>(x.data()),
          static_cast<std::streamsize>(x.size() * sizeof(double)));
}

Eigen::VectorXd read_signal_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw std::runtime_error("cannot open " + path);
  const auto bytes = static_cast<long>(f.tellg()) - 4 - 3 * 8;
  f.seekg(0);
  char magic[4];
  f.read(magic, 4);
  if (std::memcmp(magic, "L1SB", 4) != 0) throw std::runtime_error("bad magic: " + path);
  std::int64_t hdr[3];
  f.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
  Eigen::VectorXd x(bytes / 8);
  f.read(reinterpret_cast<char*>(x.data()), bytes);
  return x;
}

void write_signal_csv(const std::string& path, const Eigen::VectorXd& x) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f.precision(17);
  for (Eigen::Index i = 0; i < x.size(); ++i) f << x(i) << "\n";
}

std::vector<Eigen::VectorXd> split_blocks(const Eigen::VectorXd& x, int n) {
  if (x.size() % n != 0) throw DimensionMismatchError("split_blocks: length % N != 0");
  std::vector<Eigen::VectorXd> blocks;
  for (Eigen::Index i = 0; i + n <= x.size(); i += n) blocks.push_back(x.segment(i, n));
  return blocks;
}

}  // namespace l1stream

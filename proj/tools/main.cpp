#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "l1stream/experiment.hpp"
#include "l1stream/homotopy.hpp"
#include "l1stream/lot.hpp"
#include "l1stream/prox.hpp"
#include "l1stream/rng.hpp"
#include "l1stream/signals.hpp"
#include "l1stream/wavelet.hpp"

using namespace l1stream;

namespace {

int cmd_run(const ExperimentConfig& cfg) {
  const std::vector<TrialRecord> records = run_experiment(cfg);
  write_outputs(cfg, records);
  for (const auto& rec : records) {
    std::printf("%-8s %-12s R=%d trial=%d %-10s SER=%7.2f dB  matvecs=%.0f steps=%ld\n",
                rec.pipeline.c_str(), rec.signal.c_str(), rec.R, rec.trial,
                rec.method.c_str(), rec.ser_db, rec.matvecs, rec.steps);
  }
  std::printf("wrote %s/results.csv (%zu rows)\n", cfg.out_dir.c_str(), records.size());
  return 0;
}

int cmd_gen(const std::string& signal, long length, int N, int R, double snr,
            std::uint64_t seed, const std::string& out) {
  SignalSpec sspec;
  sspec.kind = signal_kind_from_string(signal);
  sspec.total_length = length;
  sspec.block_length = N;
  const Eigen::VectorXd x = gen_signal(sspec, seed);

  MeasurementSpec mspec;
  mspec.block_length = N;
  mspec.compression = R;
  mspec.snr_db = snr;
  mspec.seed = seed;
  const MeasurementStream meas = gen_measurements(split_blocks(x, N), mspec);

  write_signal_binary(out + ".bin", x, N, mspec.measurements(),
                      static_cast<long>(meas.y.size()));
  write_signal_csv(out + ".csv", x);
  Eigen::VectorXd ally(static_cast<long>(meas.y.size()) * mspec.measurements());
  for (std::size_t t = 0; t < meas.y.size(); ++t) {
    ally.segment(static_cast<long>(t) * mspec.measurements(), mspec.measurements()) =
        meas.y[t];
  }
  write_signal_binary(out + "_meas.bin", ally, N, mspec.measurements(),
                      static_cast<long>(meas.y.size()));
  std::printf("wrote %s.bin, %s.csv, %s_meas.bin (sigma=%.6g)\n", out.c_str(),
              out.c_str(), out.c_str(), meas.sigma);
  return 0;
}

int cmd_verify() {
  int failures = 0;
  const auto report = [&](const char* name, bool ok) {
    std::printf("%-40s %s\n", name, ok ? "pass" : "FAIL");
    if (!ok) ++failures;
  };

  {  // solver optimality on random instances
    bool ok = true;
    for (int inst = 0; inst < 10 && ok; ++inst) {
      CounterRng rng(1000 + inst, 2);
      const int M = 40, N = 96;
      Eigen::MatrixXd A(M, N);
      for (int i = 0; i < M; ++i)
        for (int j = 0; j < N; ++j) A(i, j) = rng.gaussian() / std::sqrt(double(M));
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(N);
      for (int k = 0; k < 8; ++k) x0(static_cast<int>(rng.uniform(0, N))) = rng.gaussian();
      Eigen::VectorXd y = A * x0;
      for (int i = 0; i < M; ++i) y(i) += 0.01 * rng.gaussian();
      DenseOperator op(A);
      WeightedL1Problem prob{&op, y, Eigen::VectorXd::Constant(N, 0.05), false};
      const SolveResult res =
          homotopy_solve(prob, compute_warm_start(prob, Eigen::VectorXd::Zero(N)));
      ok = res.kkt_residual <= 1e-6;
    }
    report("homotopy KKT on random instances", ok);
  }

  {  // transform round trips
    CounterRng rng(7, 3);
    Eigen::VectorXd x(256);
    for (int i = 0; i < 256; ++i) x(i) = rng.gaussian();
    WaveletSpec wspec;
    const bool wave_ok = (idwt_block(dwt_block(x, wspec), wspec) - x).norm() < 1e-10;
    report("wavelet perfect reconstruction", wave_ok);
    const bool dct_ok = (idct_block(dct_block(x)) - x).norm() < 1e-10;
    report("dct perfect reconstruction", dct_ok);
    const LotPartition part = LotPartition::uniform(4, 256, 128, 127.5);
    Eigen::VectorXd xs(part.cover_end() - part.cover_begin());
    for (long i = 0; i < xs.size(); ++i) xs(i) = rng.gaussian();
    const LotSignal rt = lot_synthesis(lot_analysis(xs, part, 0, true), part);
    // reconstruction is exact away from the untiled boundary tapers
    const bool lot_ok =
        (rt.values.segment(256, 768) - xs.segment(256, 768)).norm() < 1e-10;
    report("lot analysis/synthesis round trip", lot_ok);
  }

  {  // determinism of a small run
    ExperimentConfig cfg;
    cfg.pipeline = "lot";
    cfg.signal = "LinChirp";
    cfg.length = 1L << 11;
    cfg.R = {2};
    cfg.trials = 1;
    cfg.record_timing = false;
    const auto a = run_trial(cfg, 2, 0, "lot");
    const auto b = run_trial(cfg, 2, 0, "lot");
    report("repeat-run determinism", to_csv_row(a) == to_csv_row(b));
  }

  std::printf(failures == 0 ? "all checks passed\n" : "%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming sparse recovery toolkit"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run an experiment and write result files");
  std::string config_path;
  run->add_option("config", config_path, "key=value config file");
  ExperimentConfig cli;
  auto* oR = run->add_option("--R", cli.R, "compression factors");
  auto* osig = run->add_option("--signal", cli.signal, "signal kind");
  auto* opipe = run->add_option("--pipeline", cli.pipeline, "lot | dynamic");
  auto* otr = run->add_option("--trials", cli.trials, "independent trials");
  auto* oseed = run->add_option("--seed", cli.seed, "base seed");
  auto* osolver = run->add_option("--solver", cli.solver, "homotopy | prox-oracle");
  auto* obase = run->add_option("--baselines", cli.baselines, "baseline methods");
  auto* oout = run->add_option("--out", cli.out_dir, "output directory");
  auto* olen = run->add_option("--length", cli.length, "stream length in samples");
  auto* oN = run->add_option("--N", cli.N, "block length");
  auto* oP = run->add_option("--P", cli.P, "window size in blocks");
  auto* osnr = run->add_option("--snr", cli.snr_db, "measurement SNR in dB");
  auto* olam = run->add_option("--lambda", cli.lambda, "dynamics weight");
  auto* othr = run->add_option("--threads", cli.threads, "worker threads");
  bool no_timing = false;
  auto* otim = run->add_flag("--no-timing", no_timing, "write wall_ms = 0");

  // gen
  auto* gen = app.add_subcommand("gen", "emit signal and measurement files");
  std::string gsignal = "LinChirp", gout = "signal";
  long glength = 1L << 13;
  int gN = 256, gR = 2;
  double gsnr = 35.0;
  std::uint64_t gseed = 0;
  gen->add_option("--signal", gsignal, "signal kind");
  gen->add_option("--length", glength, "samples (before the zero prefix)");
  gen->add_option("--N", gN, "block length");
  gen->add_option("--R", gR, "compression factor");
  gen->add_option("--snr", gsnr, "SNR in dB");
  gen->add_option("--seed", gseed, "seed");
  gen->add_option("--out", gout, "output path prefix");

  // verify
  auto* verify = app.add_subcommand("verify", "run built-in property checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) {
      ExperimentConfig cfg;
      if (!config_path.empty()) cfg = load_config(config_path, cfg);
      // CLI overrides beat the file, which beats defaults
      if (oR->count()) cfg.R = cli.R;
      if (osig->count()) cfg.signal = cli.signal;
      if (opipe->count()) cfg.pipeline = cli.pipeline;
      if (otr->count()) cfg.trials = cli.trials;
      if (oseed->count()) cfg.seed = cli.seed;
      if (osolver->count()) cfg.solver = cli.solver;
      if (obase->count()) cfg.baselines = cli.baselines;
      if (oout->count()) cfg.out_dir = cli.out_dir;
      if (olen->count()) cfg.length = cli.length;
      if (oN->count()) cfg.N = cli.N;
      if (oP->count()) cfg.P = cli.P;
      if (osnr->count()) cfg.snr_db = cli.snr_db;
      if (olam->count()) cfg.lambda = cli.lambda;
      if (othr->count()) cfg.threads = cli.threads;
      if (otim->count()) cfg.record_timing = !no_timing;
      cfg.validate();
      return cmd_run(cfg);
    }
    if (app.got_subcommand(gen)) {
      return cmd_gen(gsignal, glength, gN, gR, gsnr, gseed, gout);
    }
    if (app.got_subcommand(verify)) return cmd_verify();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "l1stream/streaming_dynamic.hpp"
#include "l1stream/streaming_lot.hpp"

namespace l1stream {

/// Flat experiment description. Precedence: CLI overrides > config file
/// > these defaults. P = 0 picks the pipeline default (5 for lot, 3 for
/// dynamic). `length` is the generated stream length in samples.
struct ExperimentConfig {
  std::string pipeline = "lot";  // lot | dynamic
  std::string signal = "LinChirp";
  int N = 256;
  int P = 0;
  std::vector<int> R = {2};
  double snr_db = 35.0;
  double lambda = 0.5;
  int trials = 1;
  std::uint64_t seed = 0;        // trial k uses seed + k
  std::string solver = "homotopy";  // homotopy | prox-oracle
  std::vector<std::string> baselines;  // subset of {dct, ls-kalman, dwt-only}
  std::string out_dir = "out";
  long length = 1L << 13;
  int threads = 0;               // 0 = hardware concurrency
  bool record_timing = true;     // false writes wall_ms = 0 (reproducible files)

  int window() const { return P != 0 ? P : (pipeline == "dynamic" ? 3 : 5); }
  void validate() const;
};

/// key=value lines; '#' comments; list values comma-separated.
ExperimentConfig parse_config_text(const std::string& text, const ExperimentConfig& base);
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base);

struct TrialRecord {
  std::string pipeline;
  std::string signal;
  int R = 0;
  int trial = 0;
  std::string method;  // lot | dct | l1-dynamic | ls-kalman | dwt-only
  double ser_db = 0.0;
  double matvecs = 0.0;
  long steps = 0;
  double wall_ms = 0.0;
  std::vector<IterationRecord> iters;  // not part of the CSV row
};

std::string results_csv_header();
std::string to_csv_row(const TrialRecord& rec);
TrialRecord trial_from_csv_row(const std::string& line);

/// Runs one (R, trial, method) cell. Deterministic given the config.
TrialRecord run_trial(const ExperimentConfig& cfg, int R, int trial,
                      const std::string& method);

/// All (R, trial, method) cells, trials fanned out over a worker pool;
/// output order is fixed (R-major, then trial, then method).
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

/// results.csv, iters.jsonl, plotdata/<method>.csv under cfg.out_dir.
void write_outputs(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records);

}  // namespace l1stream

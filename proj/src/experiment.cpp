#include "l1stream/experiment.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "l1stream/errors.hpp"

namespace l1stream {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError("bad boolean value: " + v);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (pipeline != "lot" && pipeline != "dynamic") {
    throw ConfigError("pipeline must be lot or dynamic, got " + pipeline);
  }
  if (solver != "homotopy" && solver != "prox-oracle") {
    throw ConfigError("solver must be homotopy or prox-oracle, got " + solver);
  }
  signal_kind_from_string(signal);
  if (N <= 0 || trials <= 0 || length <= 0 || snr_db <= 0.0 || lambda < 0.0) {
    throw ConfigError("N, trials, length, snr_db must be positive; lambda >= 0");
  }
  if (R.empty()) throw ConfigError("R list is empty");
  for (int r : R) {
    if (r <= 0 || N % r != 0) throw ConfigError("each R must divide N");
  }
  if (length % N != 0) throw ConfigError("length must be divisible by N");
  for (const auto& b : baselines) {
    const bool lot_ok = pipeline == "lot" && b == "dct";
    const bool dyn_ok = pipeline == "dynamic" && (b == "ls-kalman" || b == "dwt-only");
    if (!lot_ok && !dyn_ok) {
      throw ConfigError("baseline '" + b + "' not valid for pipeline " + pipeline);
    }
  }
}

ExperimentConfig parse_config_text(const std::string& text, const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "pipeline") cfg.pipeline = val;
      else if (key == "signal") cfg.signal = val;
      else if (key == "N") cfg.N = std::stoi(val);
      else if (key == "P") cfg.P = std::stoi(val);
      else if (key == "R") {
        cfg.R.clear();
        for (const auto& tok : split(val, ',')) cfg.R.push_back(std::stoi(tok));
      } else if (key == "snr_db") cfg.snr_db = std::stod(val);
      else if (key == "lambda") cfg.lambda = std::stod(val);
      else if (key == "trials") cfg.trials = std::stoi(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "solver") cfg.solver = val;
      else if (key == "baselines") cfg.baselines = split(val, ',');
      else if (key == "out") cfg.out_dir = val;
      else if (key == "length") cfg.length = std::stol(val);
      else if (key == "threads") cfg.threads = std::stoi(val);
      else if (key == "record_timing") cfg.record_timing = parse_bool(val);
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ", key '" + key +
                        "': " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), base);
}

std::string results_csv_header() {
  return "pipeline,signal,R,trial,method,ser_db,matvecs,steps,wall_ms";
}

std::string to_csv_row(const TrialRecord& rec) {
  std::ostringstream os;
  os.precision(17);
  os << rec.pipeline << ',' << rec.signal << ',' << rec.R << ',' << rec.trial << ','
     << rec.method << ',' << rec.ser_db << ',' << rec.matvecs << ',' << rec.steps << ','
     << rec.wall_ms;
  return os.str();
}

TrialRecord trial_from_csv_row(const std::string& line) {
  std::stringstream ss(line);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (fields.size() != 9) throw ConfigError("bad results row: " + line);
  TrialRecord rec;
  rec.pipeline = fields[0];
  rec.signal = fields[1];
  rec.R = std::stoi(fields[2]);
  rec.trial = std::stoi(fields[3]);
  rec.method = fields[4];
  rec.ser_db = std::stod(fields[5]);
  rec.matvecs = std::stod(fields[6]);
  rec.steps = std::stol(fields[7]);
  rec.wall_ms = std::stod(fields[8]);
  return rec;
}

namespace {

std::vector<std::string> methods_for(const ExperimentConfig& cfg) {
  std::vector<std::string> m;
  m.push_back(cfg.pipeline == "lot" ? "lot" : "l1-dynamic");
  for (const auto& b : cfg.baselines) m.push_back(b);
  return m;
}

StreamingSolveOptions solve_options(const ExperimentConfig& cfg) {
  StreamingSolveOptions s;
  s.solver = cfg.solver == "prox-oracle" ? StreamingSolver::ProxOracle
                                         : StreamingSolver::Homotopy;
  return s;
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, int R, int trial,
                      const std::string& method) {
  TrialRecord rec;
  rec.pipeline = cfg.pipeline;
  rec.signal = cfg.signal;
  rec.R = R;
  rec.trial = trial;
  rec.method = method;

  const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(trial);
  MeasurementSpec mspec;
  mspec.block_length = cfg.N;
  mspec.compression = R;
  mspec.snr_db = cfg.snr_db;
  mspec.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  if (cfg.pipeline == "lot") {
    SignalSpec sspec;
    sspec.kind = signal_kind_from_string(cfg.signal);
    sspec.total_length = cfg.length;
    sspec.block_length = cfg.N;
    const Eigen::VectorXd signal = gen_signal(sspec, seed);
    const MeasurementStream meas = gen_measurements(split_blocks(signal, cfg.N), mspec);

    LotPipelineOptions popts;
    popts.N = cfg.N;
    popts.P = cfg.window();
    popts.basis = method == "dct" ? StreamingBasis::Dct : StreamingBasis::Lot;
    popts.solve = solve_options(cfg);
    LotStreamingPipeline pipe(popts, signal, meas);
    while (!pipe.done()) rec.iters.push_back(pipe.step());
    pipe.flush();
    rec.ser_db = pipe.stream_ser();
  } else {
    SignalSpec sspec;
    sspec.kind = signal_kind_from_string(cfg.signal);
    sspec.total_length = cfg.N;
    sspec.block_length = cfg.N;
    const Eigen::VectorXd x0 = gen_signal(sspec, seed).tail(cfg.N);
    const int T = static_cast<int>(cfg.length / cfg.N);
    const std::vector<Eigen::VectorXd> blocks = gen_dynamic_sequence(x0, T, seed);
    const MeasurementStream meas = gen_measurements(blocks, mspec);

    DynamicPipelineOptions popts;
    popts.N = cfg.N;
    popts.P = cfg.window();
    popts.lambda = method == "dwt-only" ? 0.0 : cfg.lambda;
    popts.method = method == "ls-kalman" ? DynamicMethod::LsKalman
                   : method == "dwt-only" ? DynamicMethod::DwtOnly
                                          : DynamicMethod::L1Dynamic;
    popts.solve = solve_options(cfg);
    DynamicStreamingPipeline pipe(popts, x0, blocks, meas);
    while (!pipe.done()) rec.iters.push_back(pipe.step());
    pipe.flush();
    rec.ser_db = pipe.stream_ser();
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();

  for (auto& it : rec.iters) {
    rec.matvecs += it.matvecs;
    rec.steps += it.steps;
    if (!cfg.record_timing) it.wall_ms = 0.0;
  }
  if (!cfg.record_timing) rec.wall_ms = 0.0;
  return rec;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Task {
    int R;
    int trial;
    std::string method;
  };
  std::vector<Task> tasks;
  for (int R : cfg.R) {
    for (int trial = 0; trial < cfg.trials; ++trial) {
      for (const auto& m : methods_for(cfg)) tasks.push_back({R, trial, m});
    }
  }

  std::vector<TrialRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mu;

  const unsigned hw = std::thread::hardware_concurrency();
  const unsigned workers = std::min<std::size_t>(
      tasks.size(), cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                    : (hw > 0 ? hw : 2));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size() || failed.load()) return;
        try {
          records[i] = run_trial(cfg, tasks[i].R, tasks[i].trial, tasks[i].method);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lk(error_mu);
          error = e.what();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) throw std::runtime_error("experiment trial failed: " + error);
  return records;
}

void write_outputs(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  fs::create_directories(fs::path(cfg.out_dir) / "plotdata");

  std::ofstream csv(fs::path(cfg.out_dir) / "results.csv");
  csv << results_csv_header() << "\n";
  for (const auto& rec : records) csv << to_csv_row(rec) << "\n";

  std::ofstream jsonl(fs::path(cfg.out_dir) / "iters.jsonl");
  for (const auto& rec : records) {
    for (const auto& it : rec.iters) {
      nlohmann::json j{{"pipeline", rec.pipeline}, {"signal", rec.signal},
                       {"R", rec.R},               {"trial", rec.trial},
                       {"method", rec.method},     {"t", it.t},
                       {"committed_begin", it.committed_begin},
                       {"committed_length", it.committed_length},
                       {"ser_so_far", it.ser_so_far},
                       {"steps", it.steps},        {"matvecs", it.matvecs},
                       {"objective", it.objective},
                       {"kkt_residual", it.kkt_residual},
                       {"support_size", it.support_size},
                       {"wall_ms", it.wall_ms}};
      jsonl << j.dump() << "\n";
    }
  }

  // per-method, per-R means over trials
  std::map<std::string, std::map<int, std::vector<const TrialRecord*>>> by_method;
  for (const auto& rec : records) by_method[rec.method][rec.R].push_back(&rec);
  for (const auto& [method, by_r] : by_method) {
    std::ofstream plot(fs::path(cfg.out_dir) / "plotdata" / (method + ".csv"));
    plot << "R,ser_db,matvecs,steps,wall_ms\n";
    plot.precision(17);
    for (const auto& [R, rows] : by_r) {
      double ser = 0.0, mv = 0.0, steps = 0.0, wall = 0.0;
      for (const auto* r : rows) {
        ser += r->ser_db;
        mv += r->matvecs;
        steps += static_cast<double>(r->steps);
        wall += r->wall_ms;
      }
      const double n = static_cast<double>(rows.size());
      plot << R << ',' << ser / n << ',' << mv / n << ',' << steps / n << ','
           << wall / n << "\n";
    }
  }
}

}  // namespace l1stream

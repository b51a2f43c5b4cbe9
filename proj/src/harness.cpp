// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#include "pace/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pace/baselines.hpp"
#include "pace/errors.hpp"
#include "pace/metrics.hpp"

namespace pace {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kPaceGgm: return "pace_ggm";
    case EstimatorKind::kSsp: return "ssp";
    case EstimatorKind::kDiagonal: return "diagonal";
  }
  throw std::logic_error("unreachable estimator kind");
}

EstimatorKind estimator_from_name(std::string_view name) {
  if (name == "pace_ggm") return EstimatorKind::kPaceGgm;
  if (name == "ssp") return EstimatorKind::kSsp;
  if (name == "diagonal") return EstimatorKind::kDiagonal;
  throw ConfigError("unknown estimator: " + std::string(name));
}

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::kIpm: return "ipm";
    case SolverKind::kPgdZeros: return "pgd_zeros";
    case SolverKind::kPgdOnes: return "pgd_ones";
  }
  throw std::logic_error("unreachable solver kind");
}

SolverKind solver_from_name(std::string_view name) {
  if (name == "ipm") return SolverKind::kIpm;
  if (name == "pgd_zeros") return SolverKind::kPgdZeros;
  if (name == "pgd_ones") return SolverKind::kPgdOnes;
  throw ConfigError("unknown solver: " + std::string(name));
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (rhos.empty()) throw ConfigError("config: at least one rho is required");
  for (double r : rhos) {
    if (!(r > 0.0)) throw ConfigError("config: rho values must be positive");
  }
  if (estimators.empty()) {
    throw ConfigError("config: at least one estimator is required");
  }
  if (dataset_path.empty() && !synthetic.has_value()) {
    throw ConfigError("config: either a dataset path or a synthetic spec is required");
  }
  if (!dataset_path.empty() && synthetic.has_value()) {
    throw ConfigError("config: dataset path and synthetic spec are mutually exclusive");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("config: alpha must be in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("config: beta must be in (0, 1)");
  if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
}

ExperimentConfig ExperimentConfig::from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");

  static const std::set<std::string> known = {
      "dataset",  "synthetic", "synthetic_seed", "csv",    "rho",
      "estimators", "trials",  "seed",           "alpha",  "beta",
      "T",        "solver",    "components",     "output", "jobs"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  try {
    if (doc.contains("dataset")) cfg.dataset_path = doc["dataset"].get<std::string>();
    if (doc.contains("synthetic")) {
      const auto& s = doc["synthetic"];
      SyntheticSpec spec;
      spec.d = s.at("d").get<int>();
      spec.n = s.at("n").get<std::int64_t>();
      spec.corr = s.at("corr").get<double>();
      cfg.synthetic = spec;
    }
    if (doc.contains("synthetic_seed")) {
      cfg.synthetic_seed = doc["synthetic_seed"].get<std::uint64_t>();
    }
    if (doc.contains("csv")) {
      const auto& c = doc["csv"];
      if (c.contains("delimiter")) {
        const auto delim = c["delimiter"].get<std::string>();
        if (delim.size() != 1) throw ConfigError("config: delimiter must be one character");
        cfg.csv.delimiter = delim[0];
      }
      if (c.contains("header")) cfg.csv.header = c["header"].get<bool>();
    }
    if (doc.contains("rho")) {
      cfg.rhos.clear();
      if (doc["rho"].is_array()) {
        for (const auto& r : doc["rho"]) cfg.rhos.push_back(r.get<double>());
      } else {
        cfg.rhos.push_back(doc["rho"].get<double>());
      }
    }
    if (doc.contains("estimators")) {
      cfg.estimators.clear();
      for (const auto& e : doc["estimators"]) {
        cfg.estimators.push_back(estimator_from_name(e.get<std::string>()));
      }
    }
    if (doc.contains("trials")) cfg.trials = doc["trials"].get<int>();
    if (doc.contains("seed")) cfg.base_seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("alpha")) cfg.alpha = doc["alpha"].get<double>();
    if (doc.contains("beta")) cfg.beta = doc["beta"].get<double>();
    if (doc.contains("T")) cfg.max_rounds = doc["T"].get<int>();
    if (doc.contains("solver")) cfg.solver = solver_from_name(doc["solver"].get<std::string>());
    if (doc.contains("components")) cfg.use_components = doc["components"].get<bool>();
    if (doc.contains("output")) cfg.output_path = doc["output"].get<std::string>();
    if (doc.contains("jobs")) cfg.jobs = doc["jobs"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string TrialRecord::key() const {
  return estimator + "|" + format_double(rho) + "|" + std::to_string(trial);
}

std::string TrialRecord::to_json() const {
  nlohmann::json rec{{"dataset", dataset},
                     {"estimator", estimator},
                     {"rho", rho},
                     {"trial", trial},
                     {"seed", seed},
                     {"frobenius", frobenius},
                     {"mahalanobis", mahalanobis},
                     {"wall_seconds", wall_seconds},
                     {"solver_flags", solver_flags}};
  if (diag_count >= 0) rec["diag_count"] = diag_count;
  if (offdiag_count >= 0) rec["offdiag_count"] = offdiag_count;
  if (rounds >= 0) rec["rounds"] = rounds;
  if (!error.empty()) rec["error"] = error;
  return rec.dump();
}

TrialRecord TrialRecord::from_json(std::string_view line) {
  nlohmann::json rec;
  try {
    rec = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid record line: ") + e.what());
  }
  TrialRecord out;
  out.dataset = rec.value("dataset", "");
  out.estimator = rec.at("estimator").get<std::string>();
  out.rho = rec.at("rho").get<double>();
  out.trial = rec.at("trial").get<int>();
  out.seed = rec.value("seed", std::uint64_t{0});
  out.frobenius = rec.value("frobenius", 0.0);
  out.mahalanobis = rec.value("mahalanobis", 0.0);
  out.diag_count = rec.value("diag_count", -1);
  out.offdiag_count = rec.value("offdiag_count", -1);
  out.rounds = rec.value("rounds", -1);
  out.wall_seconds = rec.value("wall_seconds", 0.0);
  out.solver_flags = rec.value("solver_flags", 0);
  out.error = rec.value("error", "");
  return out;
}

std::uint64_t derive_trial_seed(std::uint64_t base_seed,
                                std::string_view estimator, double rho,
                                int trial) {
  const std::string tag = std::string(estimator) + "|" + format_double(rho) +
                          "|" + std::to_string(trial);
  return base_seed ^ fnv1a64(tag);
}

Dataset load_dataset(const ExperimentConfig& config) {
  if (config.synthetic.has_value()) {
    const SyntheticSpec& s = *config.synthetic;
    return synth_ar1(s.d, s.n, s.corr, config.synthetic_seed);
  }
  return preprocess(load_csv(config.dataset_path, config.csv),
                    config.dataset_path);
}

namespace {

TrialRecord run_single_trial(const ExperimentConfig& config,
                             const Dataset& dataset,
                             const Eigen::MatrixXd& truth,
                             EstimatorKind estimator, double rho, int trial) {
  TrialRecord record;
  record.dataset = dataset.name;
  record.estimator = estimator_name(estimator);
  record.rho = rho;
  record.trial = trial;
  record.seed = derive_trial_seed(config.base_seed, record.estimator, rho, trial);

  const auto start = std::chrono::steady_clock::now();
  try {
    Eigen::MatrixXd estimate;
    switch (estimator) {
      case EstimatorKind::kPaceGgm: {
        PaceConfig pc;
        pc.rho = rho;
        pc.bound = dataset.bound;
        pc.alpha = config.alpha;
        pc.beta = config.beta;
        pc.max_rounds = config.max_rounds;
        pc.seed = record.seed;
        pc.solver = config.solver;
        pc.use_components = config.use_components;
        const PaceResult res = pace_ggm_run(dataset.X, pc);
        estimate = res.sigma_hat;
        record.diag_count = res.diagonal_measurements;
        record.offdiag_count = res.offdiagonal_measurements;
        record.rounds = res.rounds;
        record.solver_flags = res.solver_warnings;
        break;
      }
      case EstimatorKind::kSsp: {
        RngStream rng(record.seed);
        estimate = ssp_estimate(dataset.X, rho, dataset.bound, rng);
        break;
      }
      case EstimatorKind::kDiagonal: {
        RngStream rng(record.seed);
        estimate = diagonal_only_estimate(dataset.X, rho, dataset.bound, rng);
        break;
      }
    }
    record.frobenius = frobenius_error(estimate, truth);
    record.mahalanobis = mahalanobis_error(estimate, truth);
  } catch (const std::exception& e) {
    record.error = e.what();
  }
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return record;
}

}  // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config,
                                        std::ostream* progress) {
  config.validate();
  const Dataset dataset = load_dataset(config);
  const Eigen::MatrixXd truth = second_moment(dataset.X);

  // Resume: skip keys already present in the output file.
  std::set<std::string> done;
  std::vector<TrialRecord> existing;
  if (!config.output_path.empty()) {
    std::ifstream probe(config.output_path);
    if (probe.good()) {
      existing = read_jsonl(config.output_path);
      for (const TrialRecord& r : existing) done.insert(r.key());
    }
  }

  struct Task {
    EstimatorKind estimator;
    double rho;
    int trial;
  };
  std::vector<Task> tasks;
  for (EstimatorKind est : config.estimators) {
    for (double rho : config.rhos) {
      for (int trial = 0; trial < config.trials; ++trial) {
        TrialRecord probe;
        probe.estimator = estimator_name(est);
        probe.rho = rho;
        probe.trial = trial;
        if (done.contains(probe.key())) continue;
        tasks.push_back({est, rho, trial});
      }
    }
  }

  std::vector<TrialRecord> fresh(tasks.size());
  const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(tasks.size())));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      fresh[i] = run_single_trial(config, dataset, truth, tasks[i].estimator,
                                  tasks[i].rho, tasks[i].trial);
      if (progress) {
        *progress << fresh[i].key()
                  << (fresh[i].error.empty() ? " done" : " FAILED") << "\n";
      }
    }
  } else {
    std::atomic<std::size_t> next(0);
    std::mutex progress_mutex;
    auto worker = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        fresh[i] = run_single_trial(config, dataset, truth, tasks[i].estimator,
                                    tasks[i].rho, tasks[i].trial);
        if (progress) {
          std::lock_guard lock(progress_mutex);
          *progress << fresh[i].key()
                    << (fresh[i].error.empty() ? " done" : " FAILED") << "\n";
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  // Records were produced in task order, which is the deterministic config
  // order; append them to the output file in that order.
  if (!config.output_path.empty() && !fresh.empty()) {
    std::ofstream out(config.output_path, std::ios::app);
    if (!out) throw DataError("cannot open output file: " + config.output_path);
    for (const TrialRecord& r : fresh) out << r.to_json() << "\n";
  }

  std::vector<TrialRecord> all = std::move(existing);
  all.insert(all.end(), fresh.begin(), fresh.end());
  return all;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  struct Group {
    std::string dataset;
    std::vector<double> frobenius;
    std::vector<double> mahalanobis;
    std::vector<double> rounds;
    std::vector<double> diag;
    std::vector<double> offdiag;
    double wall = 0.0;
    int count = 0;
  };
  std::map<std::pair<std::string, double>, Group> groups;
  for (const TrialRecord& r : records) {
    if (!r.error.empty()) continue;
    Group& g = groups[{r.estimator, r.rho}];
    g.dataset = r.dataset;
    g.frobenius.push_back(r.frobenius);
    g.mahalanobis.push_back(r.mahalanobis);
    if (r.rounds >= 0) g.rounds.push_back(r.rounds);
    if (r.diag_count >= 0) g.diag.push_back(r.diag_count);
    if (r.offdiag_count >= 0) g.offdiag.push_back(r.offdiag_count);
    g.wall += r.wall_seconds;
    g.count += 1;
  }

  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const auto sample_stderr =
      [&](const std::vector<double>& v) -> std::optional<double> {
    if (v.size() < 2) return std::nullopt;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return sd / std::sqrt(static_cast<double>(v.size()));
  };
  const auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };

  std::vector<SummaryRow> rows;
  for (const auto& [key, g] : groups) {
    SummaryRow row;
    row.dataset = g.dataset;
    row.estimator = key.first;
    row.rho = key.second;
    row.trials = g.count;
    row.frobenius_mean = mean(g.frobenius);
    row.frobenius_stderr = sample_stderr(g.frobenius);
    row.frobenius_median = median(g.frobenius);
    row.mahalanobis_mean = mean(g.mahalanobis);
    row.mahalanobis_stderr = sample_stderr(g.mahalanobis);
    row.mahalanobis_median = median(g.mahalanobis);
    if (!g.diag.empty()) {
      std::ostringstream fmt;
      fmt.setf(std::ios::fixed);
      fmt.precision(1);
      fmt << mean(g.diag) << " + " << mean(g.offdiag);
      row.measurements = fmt.str();
    }
    if (!g.rounds.empty()) row.rounds_mean = mean(g.rounds);
    row.wall_seconds_mean = g.wall / g.count;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "dataset,estimator,rho,trials,frobenius_mean,frobenius_stderr,"
         "frobenius_median,mahalanobis_mean,mahalanobis_stderr,"
         "mahalanobis_median,measurements,rounds_mean,wall_seconds_mean\n";
  for (const SummaryRow& r : rows) {
    out << '"' << r.dataset << '"' << ',' << r.estimator << ','
        << format_double(r.rho) << ',' << r.trials << ','
        << format_double(r.frobenius_mean) << ','
        << (r.frobenius_stderr ? format_double(*r.frobenius_stderr) : "") << ','
        << format_double(r.frobenius_median) << ','
        << format_double(r.mahalanobis_mean) << ','
        << (r.mahalanobis_stderr ? format_double(*r.mahalanobis_stderr) : "")
        << ',' << format_double(r.mahalanobis_median) << ','
        << '"' << r.measurements << '"' << ',' << format_double(r.rounds_mean)
        << ',' << format_double(r.wall_seconds_mean) << '\n';
  }
  return out.str();
}

std::vector<TrialRecord> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open records file: " + path);
  std::vector<TrialRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(TrialRecord::from_json(line));
  }
  return records;
}

}  // namespace pace

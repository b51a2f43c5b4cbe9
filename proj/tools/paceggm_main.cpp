// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line harness: `paceggm run` executes a seeded sweep and writes
// JSON-lines trial records; `paceggm summarize` aggregates records to a
// plot-ready CSV.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pace/errors.hpp"
#include "pace/harness.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;

pace::SyntheticSpec parse_synthetic(const std::string& spec) {
  // "d=32,n=8192,corr=0.5"
  pace::SyntheticSpec out;
  bool saw_d = false, saw_n = false, saw_corr = false;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    const std::size_t next = spec.find(',', pos);
    const std::string item = spec.substr(pos, next - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw pace::ConfigError("synthetic spec items must look like key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "d") {
        out.d = std::stoi(value);
        saw_d = true;
      } else if (key == "n") {
        out.n = std::stoll(value);
        saw_n = true;
      } else if (key == "corr") {
        out.corr = std::stod(value);
        saw_corr = true;
      } else {
        throw pace::ConfigError("unknown synthetic key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw pace::ConfigError("invalid synthetic value for " + key);
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (!saw_d || !saw_n || !saw_corr) {
    throw pace::ConfigError("synthetic spec needs d=..,n=..,corr=..");
  }
  return out;
}

int run_command(const std::string& config_path, const std::string& dataset,
                const std::string& synthetic,
                const std::vector<double>& rhos,
                const std::vector<std::string>& estimators,
                std::optional<int> trials, std::optional<std::uint64_t> seed,
                std::optional<double> alpha, std::optional<double> beta,
                std::optional<int> max_rounds, const std::string& solver,
                std::optional<bool> components, const std::string& output,
                std::optional<int> jobs, bool quiet) {
  pace::ExperimentConfig config;
  if (!config_path.empty()) {
    config = pace::ExperimentConfig::from_json_file(config_path);
  }
  if (!dataset.empty()) {
    config.dataset_path = dataset;
    config.synthetic.reset();
  }
  if (!synthetic.empty()) {
    config.synthetic = parse_synthetic(synthetic);
    config.dataset_path.clear();
  }
  if (!rhos.empty()) config.rhos = rhos;
  if (!estimators.empty()) {
    config.estimators.clear();
    for (const std::string& e : estimators) {
      config.estimators.push_back(pace::estimator_from_name(e));
    }
  }
  if (trials) config.trials = *trials;
  if (seed) config.base_seed = *seed;
  if (alpha) config.alpha = *alpha;
  if (beta) config.beta = *beta;
  if (max_rounds) config.max_rounds = *max_rounds;
  if (!solver.empty()) config.solver = pace::solver_from_name(solver);
  if (components) config.use_components = *components;
  if (!output.empty()) config.output_path = output;
  if (jobs) config.jobs = *jobs;

  const std::vector<pace::TrialRecord> records =
      pace::run_experiment(config, quiet ? nullptr : &std::cerr);
  if (config.output_path.empty()) {
    for (const pace::TrialRecord& r : records) {
      std::cout << r.to_json() << "\n";
    }
  } else if (!quiet) {
    std::cerr << records.size() << " records in " << config.output_path
              << "\n";
  }
  return 0;
}

int summarize_command(const std::string& input, const std::string& output) {
  const std::vector<pace::TrialRecord> records = pace::read_jsonl(input);
  const std::string csv = pace::summary_to_csv(pace::summarize(records));
  if (output.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(output);
    if (!out) throw pace::DataError("cannot open output file: " + output);
    out << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private covariance estimation benchmark"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run a seeded estimation sweep");
  std::string config_path, dataset, synthetic, solver, output;
  std::vector<double> rhos;
  std::vector<std::string> estimators;
  std::optional<int> trials, max_rounds, jobs;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, beta;
  std::optional<bool> components;
  bool quiet = false;
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--dataset", dataset, "CSV dataset path");
  run->add_option("--synthetic", synthetic, "Synthetic spec d=..,n=..,corr=..");
  run->add_option("--rho", rhos, "Privacy budgets (repeatable)");
  run->add_option("--estimators", estimators,
                  "Estimators: pace_ggm, ssp, diagonal");
  run->add_option("--trials", trials, "Trials per configuration");
  run->add_option("--seed", seed, "Base seed");
  run->add_option("--alpha", alpha, "Diagonal budget fraction");
  run->add_option("--beta", beta, "Selection budget fraction");
  run->add_option("--max-rounds", max_rounds, "Round cap override");
  run->add_option("--solver", solver, "Solver: ipm, pgd_zeros, pgd_ones");
  run->add_option("--components", components,
                  "Use connected-component decomposition");
  run->add_option("--output", output, "JSON-lines output path");
  run->add_option("--jobs", jobs, "Parallel trial workers");
  run->add_flag("--quiet", quiet, "Suppress progress output");

  // summarize
  auto* summ = app.add_subcommand("summarize", "Aggregate records to CSV");
  std::string input, summary_output;
  summ->add_option("--input", input, "JSON-lines records file")->required();
  summ->add_option("--output", summary_output, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (run->parsed()) {
      return run_command(config_path, dataset, synthetic, rhos, estimators,
                         trials, seed, alpha, beta, max_rounds, solver,
                         components, output, jobs, quiet);
    }
    return summarize_command(input, summary_output);
  } catch (const pace::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const pace::DataError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

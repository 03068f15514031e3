// Copyright 2026 The synthdb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end:
//
//   synthdb run --config cfg.json [--epsilon E] [--delta D] [--K K]
//               [--sigma S ...] [--C C] [--R R] [--subset pca|uniform]
//               [--seed S] [--jobs J] [--m-max M] [--out DIR]
//
// Flags override the matching config keys. Exit status: 0 when every cell
// succeeded, 2 when some cell failed, 1 on configuration errors.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "synthdb/harness.h"

namespace {

int Run(const std::string& config_path, const CLI::App& run) {
  nlohmann::json j;
  {
    std::ifstream in(config_path);
    if (!in) throw synthdb::ConfigError("cannot open config " + config_path);
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw synthdb::ConfigError(std::string("config parse error: ") + e.what());
    }
  }
  synthdb::ExperimentConfig cfg = synthdb::ConfigFromJson(j);
  // Relative dataset paths resolve against the config file's directory.
  if (!cfg.dataset.empty()) {
    std::filesystem::path p(cfg.dataset);
    if (p.is_relative()) {
      cfg.dataset = (std::filesystem::path(config_path).parent_path() / p).string();
    }
  }
  auto opt = [&](const char* name) { return run.get_option(name); };
  if (*opt("--epsilon")) cfg.epsilon = opt("--epsilon")->as<double>();
  if (*opt("--delta")) {
    cfg.delta = opt("--delta")->as<double>();
    cfg.mode = synthdb::PrivacyMode::kApprox;
  }
  if (*opt("--K")) cfg.K = opt("--K")->as<std::uint64_t>();
  if (*opt("--sigma")) cfg.sigmas = opt("--sigma")->as<std::vector<double>>();
  if (*opt("--C")) cfg.C = opt("--C")->as<std::size_t>();
  if (*opt("--R")) cfg.R = opt("--R")->as<std::uint64_t>();
  if (*opt("--subset")) {
    cfg.subset = opt("--subset")->as<std::string>() == "uniform"
                     ? synthdb::SubsetSource::kUniformHypercube
                     : synthdb::SubsetSource::kPcaEllipsoid;
  }
  if (*opt("--seed")) cfg.seed = opt("--seed")->as<std::uint64_t>();
  if (*opt("--jobs")) cfg.jobs = opt("--jobs")->as<std::size_t>();
  if (*opt("--m-max")) cfg.m_max = opt("--m-max")->as<std::uint64_t>();
  if (*opt("--out")) cfg.out_dir = opt("--out")->as<std::string>();

  const auto outcome = synthdb::run_experiment(cfg);
  std::size_t failed = 0;
  for (const auto& c : outcome.cells) {
    if (!c.ok) {
      ++failed;
      std::cerr << "cell sigma=" << c.sigma << " seed=" << c.seed << " failed: " << c.error << "\n";
    }
  }
  std::cout << outcome.cells.size() - failed << "/" << outcome.cells.size()
            << " cells ok; report in " << cfg.out_dir << "/report.json\n";
  return failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthdb: differentially private synthetic data for smooth queries"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run an experiment sweep from a JSON config");
  std::string config_path;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  double epsilon = 0, delta = 0;
  std::uint64_t K = 0, R = 0, seed = 0, m_max = 0;
  std::vector<double> sigmas;
  std::size_t C = 0, jobs = 0;
  std::string subset, out;
  run->add_option("--epsilon", epsilon, "Privacy parameter epsilon");
  run->add_option("--delta", delta, "Privacy parameter delta (selects approx mode)");
  run->add_option("--K", K, "Smoothness order (default floor(sigma^2))");
  run->add_option("--sigma", sigmas, "Query bandwidths to sweep");
  run->add_option("--C", C, "Grid subset size (accelerated variant)");
  run->add_option("--R", R, "Basis subset size override");
  run->add_option("--subset", subset, "Grid subset source")->check(CLI::IsMember({"pca", "uniform"}));
  run->add_option("--seed", seed, "Base seed");
  run->add_option("--jobs", jobs, "Concurrent cells");
  run->add_option("--m-max", m_max, "Cap on the synthetic sample size");
  run->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  try {
    return Run(config_path, *run);
  } catch (const synthdb::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 2;
  }
}

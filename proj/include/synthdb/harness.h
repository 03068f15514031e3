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

// CSV ingestion, experiment configuration and the benchmark sweep behind
// `synthdb run`.
//
// Output layout (all files UTF-8):
//   synthetic.csv   synthetic points of the first cell, one per line,
//                   comma-separated, %.17g, normalized [-1,1] coordinates,
//                   no header
//   report.json     {config, params, cells[], aggregate}
//   workload.json   query workload of the first cell (see WorkloadToJson)
//   cells/          per-cell synthetic CSVs when write_cell_synthetic is set
//   artifacts/      moments.csv, design.csv, lp.txt for the first cell when
//                   dump_artifacts is set. moments.csv rows are
//                   "r_1,...,r_d,value" with the rounded noisy moment;
//                   design.csv holds the rounded design matrix, one basis
//                   function per line; lp.txt is StandardLP::Dump.

#ifndef SYNTHDB_HARNESS_H_
#define SYNTHDB_HARNESS_H_

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "synthdb/core.h"
#include "synthdb/lp.h"
#include "synthdb/mechanism.h"
#include "synthdb/queries.h"
#include "synthdb/random.h"

namespace synthdb {

inline constexpr int kReportSchemaVersion = 1;

// Error raised for invalid configuration or unreadable input; maps to exit
// code 1 in the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Column selector: by zero-based index or by header name.
struct ColumnRef {
  std::optional<std::size_t> index;
  std::string name;
};

namespace internal {

inline std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(Trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(Trim(cur));
  return out;
}

inline std::optional<double> ParseDouble(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace internal

// Reads the selected columns (all columns when empty). A first row that
// fails to parse as numbers is taken as the header.
inline Dataset load_csv(const std::filesystem::path& path, const std::vector<ColumnRef>& columns = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_csv: cannot open " + path.string());
  std::vector<std::string> header;
  std::vector<std::size_t> selected;
  std::vector<double> coords;
  std::size_t width = 0;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;

  auto resolve = [&](std::size_t fields) {
    width = fields;
    if (columns.empty()) {
      for (std::size_t i = 0; i < fields; ++i) selected.push_back(i);
      return;
    }
    for (const auto& c : columns) {
      if (c.index) {
        if (*c.index >= fields) {
          throw ConfigError("load_csv: column index " + std::to_string(*c.index) + " out of range");
        }
        selected.push_back(*c.index);
        continue;
      }
      auto it = std::find(header.begin(), header.end(), c.name);
      if (it == header.end()) throw ConfigError("load_csv: no column named '" + c.name + "'");
      selected.push_back(static_cast<std::size_t>(it - header.begin()));
    }
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (internal::Trim(line).empty()) continue;
    auto fields = internal::SplitCsvLine(line);
    if (first) {
      first = false;
      bool numeric = true;
      for (const auto& f : fields) numeric = numeric && internal::ParseDouble(f).has_value();
      bool named = false;
      for (const auto& c : columns) named = named || !c.index;
      if (!numeric) {
        header = fields;
        resolve(fields.size());
        continue;
      }
      if (named) throw ConfigError("load_csv: column names given but file has no header");
      resolve(fields.size());
    }
    if (fields.size() != width) {
      throw ConfigError("load_csv: line " + std::to_string(lineno) + ": expected " +
                        std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c : selected) {
      auto v = internal::ParseDouble(fields[c]);
      if (!v) {
        throw ConfigError("load_csv: line " + std::to_string(lineno) + ": non-numeric value '" +
                          fields[c] + "' in column " + std::to_string(c));
      }
      coords.push_back(*v);
    }
  }
  if (selected.empty()) throw ConfigError("load_csv: no columns selected");
  if (coords.empty()) throw ConfigError("load_csv: no data rows in " + path.string());
  return Dataset(selected.size(), std::move(coords), Stage::kRaw);
}

inline void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto p = data.point(i);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out << ',';
      out << internal::FormatDouble(p[j]);
    }
    out << '\n';
  }
}

inline nlohmann::json WorkloadToJson(const std::vector<GaussianKernelQuery>& queries) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& q : queries) {
    nlohmann::json centers = nlohmann::json::array();
    for (std::size_t j = 0; j < q.kernels(); ++j) {
      auto c = q.center(j);
      centers.push_back(std::vector<double>(c.begin(), c.end()));
    }
    arr.push_back({{"sigma", q.sigma},
                   {"weights", q.weights},
                   {"centers", centers},
                   {"norm_certified", q.norm_certified}});
  }
  return arr;
}

inline std::vector<GaussianKernelQuery> WorkloadFromJson(const nlohmann::json& arr) {
  std::vector<GaussianKernelQuery> out;
  for (const auto& item : arr) {
    GaussianKernelQuery q;
    q.sigma = item.at("sigma").get<double>();
    q.weights = item.at("weights").get<std::vector<double>>();
    q.norm_certified = item.value("norm_certified", false);
    for (const auto& c : item.at("centers")) {
      auto v = c.get<std::vector<double>>();
      if (q.dim == 0) q.dim = v.size();
      if (v.size() != q.dim) throw ConfigError("workload: ragged centers");
      q.centers.insert(q.centers.end(), v.begin(), v.end());
    }
    q.Validate();
    out.push_back(std::move(q));
  }
  return out;
}

enum class Variant { kAccelerated, kFull };

struct ExperimentConfig {
  std::string dataset;
  std::vector<ColumnRef> columns;
  std::optional<std::vector<AttributeRange>> ranges;
  PrivacyMode mode = PrivacyMode::kPure;
  double epsilon = 1.0;
  double delta = 1e-10;  // used when mode is approx
  double pca_fraction = 0.5;
  Variant variant = Variant::kAccelerated;
  std::vector<double> sigmas = {2, 4, 6, 8, 10};
  std::optional<std::uint64_t> K;
  std::size_t C = 10000;
  std::optional<std::uint64_t> R;
  SubsetSource subset = SubsetSource::kPcaEllipsoid;
  std::size_t query_count = 10000;
  std::size_t J = 10;
  AlphaSampling alpha = AlphaSampling::kRaw;
  std::uint64_t seed = 1;
  std::size_t rounds = 1;  // seeds seed, seed+1, ...
  std::optional<std::uint64_t> m_max;
  std::string out_dir = "out";
  std::size_t jobs = 1;
  bool strict_sensitivity = false;
  std::size_t psi_k = 1;
  std::size_t psi_iterations = 1;
  bool write_cell_synthetic = false;
  bool dump_artifacts = false;
  bool nonprivate_diagnostics = false;

  PrivacyBudget Budget() const {
    return {epsilon, mode == PrivacyMode::kPure ? 0.0 : delta, pca_fraction};
  }

  void Validate() const {
    try {
      Budget().Validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (mode == PrivacyMode::kApprox && !(delta > 0.0 && delta < 1.0)) {
      throw ConfigError("config: approx mode needs delta in (0,1)");
    }
    if (sigmas.empty()) throw ConfigError("config: need at least one sigma");
    for (double s : sigmas) {
      if (!(s > 0.0)) throw ConfigError("config: sigma values must be > 0");
    }
    if (K && *K == 0) throw ConfigError("config: K must be >= 1");
    if (C == 0) throw ConfigError("config: C must be >= 1");
    if (R && *R == 0) throw ConfigError("config: R must be >= 1");
    if (query_count == 0 || J == 0) throw ConfigError("config: queries and J must be >= 1");
    if (rounds == 0) throw ConfigError("config: rounds must be >= 1");
    if (jobs == 0) throw ConfigError("config: jobs must be >= 1");
    if (psi_iterations == 0) throw ConfigError("config: psi_iterations must be >= 1");
    if (ranges) {
      for (const auto& r : *ranges) {
        if (!(r.hi > r.lo)) throw ConfigError("config: degenerate attribute range");
      }
    }
  }
};

inline ExperimentConfig ConfigFromJson(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.dataset = j.value("dataset", std::string{});
    if (j.contains("columns")) {
      for (const auto& col : j.at("columns")) {
        ColumnRef ref;
        if (col.is_number_integer()) {
          ref.index = col.get<std::size_t>();
        } else {
          ref.name = col.get<std::string>();
        }
        c.columns.push_back(ref);
      }
    }
    if (j.contains("ranges") && !j.at("ranges").is_null()) {
      std::vector<AttributeRange> rs;
      for (const auto& r : j.at("ranges")) rs.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
      c.ranges = rs;
    }
    const std::string mode = j.value("mode", std::string("pure"));
    if (mode == "pure") {
      c.mode = PrivacyMode::kPure;
    } else if (mode == "approx") {
      c.mode = PrivacyMode::kApprox;
    } else {
      throw ConfigError("config: mode must be 'pure' or 'approx'");
    }
    c.epsilon = j.value("epsilon", c.epsilon);
    c.delta = j.value("delta", c.delta);
    c.pca_fraction = j.value("pca_fraction", c.pca_fraction);
    const std::string variant = j.value("variant", std::string("accelerated"));
    if (variant == "accelerated") {
      c.variant = Variant::kAccelerated;
    } else if (variant == "full") {
      c.variant = Variant::kFull;
    } else {
      throw ConfigError("config: variant must be 'accelerated' or 'full'");
    }
    if (j.contains("sigma")) {
      const auto& s = j.at("sigma");
      c.sigmas = s.is_array() ? s.get<std::vector<double>>() : std::vector<double>{s.get<double>()};
    }
    if (j.contains("K") && !j.at("K").is_null()) c.K = j.at("K").get<std::uint64_t>();
    c.C = j.value("C", c.C);
    if (j.contains("R") && !j.at("R").is_null()) c.R = j.at("R").get<std::uint64_t>();
    const std::string subset = j.value("subset", std::string("pca"));
    if (subset == "pca") {
      c.subset = SubsetSource::kPcaEllipsoid;
    } else if (subset == "uniform") {
      c.subset = SubsetSource::kUniformHypercube;
    } else {
      throw ConfigError("config: subset must be 'pca' or 'uniform'");
    }
    c.query_count = j.value("queries", c.query_count);
    c.J = j.value("J", c.J);
    const std::string alpha = j.value("alpha", std::string("raw"));
    if (alpha == "raw") {
      c.alpha = AlphaSampling::kRaw;
    } else if (alpha == "certified") {
      c.alpha = AlphaSampling::kNormCertified;
    } else {
      throw ConfigError("config: alpha must be 'raw' or 'certified'");
    }
    c.seed = j.value("seed", c.seed);
    c.rounds = j.value("rounds", c.rounds);
    if (j.contains("m_max") && !j.at("m_max").is_null()) c.m_max = j.at("m_max").get<std::uint64_t>();
    c.out_dir = j.value("out", c.out_dir);
    c.jobs = j.value("jobs", c.jobs);
    c.strict_sensitivity = j.value("strict_sensitivity", c.strict_sensitivity);
    c.psi_k = j.value("psi_k", c.psi_k);
    c.psi_iterations = j.value("psi_iterations", c.psi_iterations);
    c.write_cell_synthetic = j.value("write_cell_synthetic", c.write_cell_synthetic);
    c.dump_artifacts = j.value("dump_artifacts", c.dump_artifacts);
    c.nonprivate_diagnostics = j.value("nonprivate_diagnostics", c.nonprivate_diagnostics);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

inline nlohmann::json ConfigToJson(const ExperimentConfig& c) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& col : c.columns) {
    if (col.index) {
      cols.push_back(*col.index);
    } else {
      cols.push_back(col.name);
    }
  }
  nlohmann::json j = {
      {"schema_version", kReportSchemaVersion},
      {"dataset", c.dataset},
      {"columns", cols},
      {"mode", ModeName(c.mode)},
      {"epsilon", c.epsilon},
      {"delta", c.mode == PrivacyMode::kPure ? 0.0 : c.delta},
      {"pca_fraction", c.pca_fraction},
      {"variant", c.variant == Variant::kAccelerated ? "accelerated" : "full"},
      {"sigma", c.sigmas},
      {"K", c.K ? nlohmann::json(*c.K) : nlohmann::json(nullptr)},
      {"C", c.C},
      {"R", c.R ? nlohmann::json(*c.R) : nlohmann::json(nullptr)},
      {"subset", SubsetSourceName(c.subset)},
      {"queries", c.query_count},
      {"J", c.J},
      {"alpha", c.alpha == AlphaSampling::kRaw ? "raw" : "certified"},
      {"seed", c.seed},
      {"rounds", c.rounds},
      {"m_max", c.m_max ? nlohmann::json(*c.m_max) : nlohmann::json(nullptr)},
      {"strict_sensitivity", c.strict_sensitivity},
      {"psi_k", c.psi_k},
      {"psi_iterations", c.psi_iterations},
  };
  if (c.ranges) {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : *c.ranges) rs.push_back({r.lo, r.hi});
    j["ranges"] = rs;
  } else {
    j["ranges"] = nullptr;
  }
  return j;
}

inline nlohmann::json ParamsToJson(const MechanismParams& p) {
  nlohmann::json j = {{"mode", ModeName(p.mode)}, {"t", p.t},         {"N", p.N},
                      {"L", p.L},                 {"m", p.m},         {"m_formula", p.m_formula}};
  if (p.accelerated) {
    j["C"] = p.accelerated->C;
    j["R"] = p.accelerated->R;
  }
  return j;
}

inline nlohmann::json DiagnosticsToJson(const DiagnosticsReport& d) {
  return {{"noise_l1", d.noise_l1 ? nlohmann::json(*d.noise_l1) : nlohmann::json(nullptr)},
          {"lp_objective", d.lp_objective},
          {"sampling_linf", d.sampling_linf},
          {"rounding_bound", d.rounding_bound},
          {"discretization_bound", d.discretization_bound},
          {"approximation_error", "not computed; theoretical O(t^-(K+1))"},
          {"support_size", d.support_size},
          {"basis_count", d.basis_count},
          {"lp_iterations", d.lp_iterations},
          {"lp_optimal", d.lp_optimal},
          {"degraded", d.degraded},
          {"non_private", d.non_private}};
}

struct CellResult {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t K = 0;
  bool ok = false;
  std::string error;
  double seconds = 0.0;
  MechanismParams params;
  DiagnosticsReport diagnostics;
  std::vector<std::string> warnings;
  double worst_abs = 0.0;
  double worst_rel = 0.0;
  double median_rel = 0.0;
  std::size_t excluded_relative = 0;
  Dataset synthetic;
  std::vector<GaussianKernelQuery> workload;
  std::optional<RunArtifacts> artifacts;
};

struct ExperimentOutcome {
  nlohmann::json report;
  std::vector<CellResult> cells;
  bool any_failed = false;
};

// Runs one (sigma, seed) cell on already-normalized data.
inline CellResult RunCell(const Dataset& data, const ExperimentConfig& cfg, double sigma,
                          std::uint64_t seed, bool keep_artifacts) {
  CellResult cell;
  cell.sigma = sigma;
  cell.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const StreamFactory cell_streams =
        StreamFactory(seed).Child("sigma:" + internal::FormatDouble(sigma));
    cell.K = cfg.K ? *cfg.K
                   : std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(sigma * sigma)));
    MechanismOptions opt;
    opt.strict_sensitivity = cfg.strict_sensitivity;
    opt.m_max = cfg.m_max;
    opt.psi_k = cfg.psi_k;
    opt.psi_iterations = cfg.psi_iterations;
    opt.subset_streams = StreamFactory(seed).Child("subset");
    opt.retain_artifacts = keep_artifacts;
    opt.retain_true_moments = cfg.nonprivate_diagnostics;
    const PrivacyBudget budget = cfg.Budget();
    ReleaseResult res;
    if (cfg.variant == Variant::kFull) {
      res = run_full(data, cell.K, budget, cell_streams.Child("mechanism"), opt);
    } else {
      AcceleratedConfig ac;
      ac.sigma = sigma;
      ac.K = cfg.K;
      ac.C = cfg.C;
      ac.R = cfg.R;
      ac.subset = cfg.subset;
      res = run_accelerated(data, ac, budget, cell_streams.Child("mechanism"), opt);
    }
    cell.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    RandomStream qrng = cell_streams.Stream("queries");
    cell.workload = random_queries(cfg.query_count, cfg.J, data.dim(), sigma, cfg.alpha, qrng);
    const auto truth = EvaluateWorkload(cell.workload, data);
    const auto synth = EvaluateWorkload(cell.workload, res.db.points);
    const auto rep = error_metrics(truth, synth);
    cell.worst_abs = rep.worst_abs;
    cell.worst_rel = rep.worst_rel;
    cell.median_rel = rep.MedianRelative();
    cell.excluded_relative = rep.excluded_relative;
    cell.params = res.db.params;
    cell.diagnostics = res.diagnostics;
    cell.warnings = res.warnings;
    cell.synthetic = std::move(res.db.points);
    cell.artifacts = std::move(res.artifacts);
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
    cell.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return cell;
}

inline nlohmann::json CellToJson(const CellResult& c) {
  nlohmann::json j = {{"sigma", c.sigma}, {"seed", c.seed}, {"K", c.K},
                      {"status", c.ok ? "ok" : "failed"}, {"time_s", c.seconds}};
  if (!c.ok) {
    j["error"] = c.error;
    return j;
  }
  j["params"] = ParamsToJson(c.params);
  j["diagnostics"] = DiagnosticsToJson(c.diagnostics);
  j["warnings"] = c.warnings;
  j["worst_abs"] = c.worst_abs;
  j["worst_rel"] = c.worst_rel;
  j["median_rel"] = c.median_rel;
  j["excluded_relative"] = c.excluded_relative;
  j["synthetic_size"] = c.synthetic.size();
  return j;
}

// The sweep over (sigma, seed) cells on normalized data. Cells run on up to
// cfg.jobs threads; results are ordered by (sigma, seed) regardless.
inline ExperimentOutcome RunSweep(const Dataset& data, const ExperimentConfig& cfg,
                                  nlohmann::json data_info = nlohmann::json::object()) {
  cfg.Validate();
  struct Job {
    double sigma;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double s : cfg.sigmas) {
    for (std::size_t r = 0; r < cfg.rounds; ++r) jobs.push_back({s, cfg.seed + r});
  }
  ExperimentOutcome out;
  out.cells.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      out.cells[i] = RunCell(data, cfg, jobs[i].sigma, jobs[i].seed,
                             i == 0 && cfg.dump_artifacts);
    }
  };
  const std::size_t threads = std::min(cfg.jobs, jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  nlohmann::json per_sigma = nlohmann::json::array();
  nlohmann::json aggregate = nlohmann::json::array();
  std::size_t failed = 0;
  for (double s : cfg.sigmas) {
    nlohmann::json params = nullptr;
    double sum_abs = 0, sum_rel = 0, sum_med = 0, sum_t = 0;
    std::size_t ok = 0, bad = 0;
    for (const auto& c : out.cells) {
      if (c.sigma != s) continue;
      if (!c.ok) {
        ++bad;
        continue;
      }
      if (params.is_null()) {
        params = ParamsToJson(c.params);
        params["sigma"] = s;
        params["K"] = c.K;
      }
      ++ok;
      sum_abs += c.worst_abs;
      sum_rel += c.worst_rel;
      sum_med += c.median_rel;
      sum_t += c.seconds;
    }
    failed += bad;
    if (!params.is_null()) per_sigma.push_back(params);
    const double k = ok ? static_cast<double>(ok) : 1.0;
    aggregate.push_back({{"sigma", s},
                         {"rounds_ok", ok},
                         {"rounds_failed", bad},
                         {"mean_worst_abs", ok ? nlohmann::json(sum_abs / k) : nlohmann::json(nullptr)},
                         {"mean_worst_rel", ok ? nlohmann::json(sum_rel / k) : nlohmann::json(nullptr)},
                         {"mean_median_rel", ok ? nlohmann::json(sum_med / k) : nlohmann::json(nullptr)},
                         {"mean_time_s", ok ? nlohmann::json(sum_t / k) : nlohmann::json(nullptr)}});
  }
  out.any_failed = failed > 0;

  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : out.cells) cells.push_back(CellToJson(c));
  data_info["n"] = data.size();
  data_info["d"] = data.dim();
  data_info["per_sigma"] = per_sigma;
  out.report = {{"config", ConfigToJson(cfg)},
                {"params", data_info},
                {"cells", cells},
                {"aggregate", {{"per_sigma", aggregate}, {"failed_cells", failed}}}};
  return out;
}

inline void WriteOutputs(const ExperimentOutcome& outcome, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  {
    std::ofstream rep(dir / "report.json", std::ios::binary);
    rep << outcome.report.dump(2) << '\n';
  }
  if (outcome.cells.empty()) return;
  const CellResult& first = outcome.cells.front();
  write_csv(dir / "synthetic.csv", first.ok ? first.synthetic : Dataset());
  if (first.ok) {
    std::ofstream wl(dir / "workload.json", std::ios::binary);
    wl << WorkloadToJson(first.workload).dump() << '\n';
  }
  if (cfg.write_cell_synthetic) {
    fs::create_directories(dir / "cells");
    for (std::size_t i = 0; i < outcome.cells.size(); ++i) {
      const auto& c = outcome.cells[i];
      if (!c.ok) continue;
      write_csv(dir / "cells" / ("cell_" + std::to_string(i) + ".csv"), c.synthetic);
    }
  }
  if (cfg.dump_artifacts && first.ok && first.artifacts) {
    const RunArtifacts& a = *first.artifacts;
    fs::create_directories(dir / "artifacts");
    std::ofstream mom(dir / "artifacts" / "moments.csv", std::ios::binary);
    for (std::size_t r = 0; r < a.basis.size(); ++r) {
      for (auto v : a.basis.indices[r]) mom << v << ',';
      mom << internal::FormatDouble(a.rounded_moments.values[r]) << '\n';
    }
    std::ofstream des(dir / "artifacts" / "design.csv", std::ios::binary);
    for (std::size_t r = 0; r < a.design_rounded.rows; ++r) {
      auto row = a.design_rounded.row(r);
      for (std::size_t k = 0; k < row.size(); ++k) des << (k ? "," : "") << internal::FormatDouble(row[k]);
      des << '\n';
    }
    std::ofstream lp(dir / "artifacts" / "lp.txt", std::ios::binary);
    to_standard_form(a.design_rounded, a.rounded_moments.values, a.lattice).Dump(lp);
  }
}

// Loads, normalizes and sweeps. Normalization ranges come from the config;
// without them the observed min/max is used and a warning is printed, since
// those ranges are not covered by the privacy budget.
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg, std::ostream& log = std::cerr) {
  cfg.Validate();
  if (cfg.dataset.empty()) throw ConfigError("config: dataset path is required");
  const Dataset raw = load_csv(cfg.dataset, cfg.columns);
  std::vector<AttributeRange> ranges;
  bool data_ranges = false;
  if (cfg.ranges) {
    if (cfg.ranges->size() != raw.dim()) {
      throw ConfigError("config: ranges has " + std::to_string(cfg.ranges->size()) +
                        " entries for " + std::to_string(raw.dim()) + " columns");
    }
    ranges = *cfg.ranges;
  } else {
    ranges = ObservedRanges(raw);
    data_ranges = true;
    log << "WARNING: attribute ranges computed from the data; they leak information "
           "beyond the stated privacy budget. Supply public ranges in the config.\n";
  }
  const Dataset data = normalize_dataset(raw, ranges);
  nlohmann::json info;
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : ranges) rs.push_back({r.lo, r.hi});
  info["ranges"] = rs;
  info["data_dependent_ranges"] = data_ranges;
  auto outcome = RunSweep(data, cfg, info);
  WriteOutputs(outcome, cfg);
  return outcome;
}

}  // namespace synthdb

#endif  // SYNTHDB_HARNESS_H_

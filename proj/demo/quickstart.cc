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

// Releases a synthetic version of a small two-dimensional dataset and
// compares a few Gaussian kernel queries on both.
//
//   ./quickstart [n] [epsilon]

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "synthdb/synthdb.h"

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 2000;
  const double epsilon = argc > 2 ? std::atof(argv[2]) : 1.0;

  // Correlated points inside the unit square.
  synthdb::StreamFactory streams(42);
  synthdb::RandomStream gen = streams.Stream("data");
  std::vector<double> coords;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 0.5 * gen.Gaussian();
    const double b = 0.8 * a + 0.2 * gen.Gaussian();
    coords.push_back(std::clamp(a, -1.0, 1.0));
    coords.push_back(std::clamp(b, -1.0, 1.0));
  }
  const synthdb::Dataset data(2, std::move(coords), synthdb::Stage::kNormalized);

  synthdb::AcceleratedConfig cfg;
  cfg.sigma = 2.0;
  cfg.C = 500;
  synthdb::MechanismOptions opt;
  opt.m_max = 100000;
  const auto res = synthdb::run_accelerated(data, cfg, synthdb::PrivacyBudget{epsilon, 0.0},
                                            streams.Child("release"), opt);
  const auto& p = res.db.params;
  std::printf("n=%zu  t=%llu N=%llu L=%llu m=%llu  R=%llu C=%llu\n", n,
              static_cast<unsigned long long>(p.t), static_cast<unsigned long long>(p.N),
              static_cast<unsigned long long>(p.L), static_cast<unsigned long long>(p.m),
              static_cast<unsigned long long>(p.accelerated->R),
              static_cast<unsigned long long>(p.accelerated->C));
  for (const auto& w : res.warnings) std::printf("warning: %s\n", w.c_str());

  synthdb::RandomStream qrng = streams.Stream("queries");
  const auto queries =
      synthdb::random_queries(200, 10, 2, cfg.sigma, synthdb::AlphaSampling::kRaw, qrng);
  const auto report = synthdb::error_metrics(synthdb::EvaluateWorkload(queries, data),
                                             synthdb::EvaluateWorkload(queries, res.db.points));
  std::printf("worst abs %.4g  worst rel %.4g  median rel %.4g\n", report.worst_abs,
              report.worst_rel, report.MedianRelative());
  return 0;
}

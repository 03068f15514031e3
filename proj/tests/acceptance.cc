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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Optional arguments select criteria by
// number.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lp_oracle.h"
#include "synthdb/synthdb.h"

namespace synthdb {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome ParameterDerivation() {
  const auto p = derive_params_pure(256, 1, 2);
  const auto a = derive_params_approx(10000, 1, 2, std::exp(-1.0));
  const bool ok = p.t == 4 && p.N == 16 && p.m == 16384 && p.L == 64 && a.t == 14 && a.N == 194;
  std::ostringstream os;
  os << "pure (t,N,m,L)=(" << p.t << ',' << p.N << ',' << p.m << ',' << p.L << "), approx (t,N)=("
     << a.t << ',' << a.N << ')';
  return {ok, os.str()};
}

Outcome LpOracle() {
  RandomStream rng(7);
  const Lattice lat(40);
  double worst_gap = 0.0, worst_resid = 0.0, worst_vertex = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 2 + rng.UniformIndex(5);
    const std::size_t cols = 2 + rng.UniformIndex(7);
    const auto in = testing::RandomInstance(rng, rows, cols, lat);
    const auto res = solve_l1_fit(in.w, in.b);
    // Simplex feasibility and consistency of the reported objective.
    double sum = 0.0, resid = 0.0;
    for (double u : res.weights) {
      sum += u;
      resid = std::max(resid, std::max(0.0, -u));
    }
    resid = std::max(resid, std::abs(sum - 1.0));
    resid = std::max(resid, std::abs(res.objective - testing::L1Residual(in.w, in.b, res.weights)));
    // Integer standard form residuals at the fitted point, in lattice units.
    const auto lp = to_standard_form(in.w, in.b, lat);
    const auto wu = in.w.Apply(res.weights);
    std::vector<double> x(lp.cols, 0.0);
    for (std::size_t k = 0; k < cols; ++k) x[k] = res.weights[k];
    for (std::size_t r = 0; r < rows; ++r) {
      x[cols + r] = std::max(in.b[r] - wu[r], 0.0);
      x[cols + rows + r] = std::max(wu[r] - in.b[r], 0.0);
    }
    for (std::size_t r = 0; r < lp.rows; ++r) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < lp.cols; ++j) lhs += static_cast<double>(lp.at(r, j)) * x[j];
      resid = std::max(resid, std::abs(lhs - static_cast<double>(lp.b[r])) / lat.resolution());
    }
    // Grid brute force at resolution 1/200: every grid point with at most
    // four nonzero weights, plus a descent over grid points near the fitted
    // weights. LP optimum <= full grid minimum <= this value, so a gap below
    // 1e-2 here bounds the gap to the full grid as well.
    const double grid = std::min(testing::SparseGridOracle(in.w, in.b, 200, 4),
                                 testing::GridLocalSearch(in.w, in.b, 200, res.weights));
    const double gap = grid - res.objective;
    const double vertex = std::abs(res.objective - testing::VertexOracle(in.w, in.b));
    worst_gap = std::max(worst_gap, std::abs(gap));
    worst_resid = std::max(worst_resid, resid);
    worst_vertex = std::max(worst_vertex, vertex);
    ok = ok && res.optimal && gap >= -1e-9 && gap <= 1e-2 && resid <= 1e-9 && vertex <= 1e-9;
  }
  return {ok, "50 instances, max |grid - lp| " + Fmt("%.3g", worst_gap) + ", max residual " +
                  Fmt("%.3g", worst_resid) + ", max |vertex - lp| " + Fmt("%.3g", worst_vertex)};
}

Outcome NoiselessIdentifiability() {
  const ChebGrid grid(16);
  const BasisSet basis = enumerate_basis(4, 1);
  int passed = 0;
  double worst = 0.0, bound = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng(1000 + seed);
    std::vector<double> c(256);
    for (double& x : c) x = grid.values()[rng.UniformIndex(16)];
    const Dataset data(1, std::move(c), Stage::kNormalized);
    const auto res = run_full(data, 2, PrivacyBudget{1e6, 0.0}, StreamFactory(seed));
    const auto& p = res.db.params;
    bound = 2.0 * static_cast<double>(p.t) / static_cast<double>(p.L) +
            3.0 / std::sqrt(static_cast<double>(p.m));
    const auto a = compute_moments(data, basis);
    const auto b = compute_moments(res.db.points, basis);
    double err = 0.0;
    for (std::size_t r = 0; r < basis.size(); ++r) err = std::max(err, std::abs(a.values[r] - b.values[r]));
    worst = std::max(worst, err);
    passed += err <= bound;
  }
  return {passed == 20, std::to_string(passed) + "/20 seeds, worst " + Fmt("%.4g", worst) +
                            " <= bound " + Fmt("%.4g", bound)};
}

Outcome DpAudit() {
  // One basis moment (T_1) with t^d = 2 in one dimension; neighbors move a
  // point from -1 to 1, the largest change of T_1.
  const std::size_t n = 100;
  std::vector<double> base(n, 0.0);
  base[0] = -1.0;
  std::vector<double> moved = base;
  moved[0] = 1.0;
  const Dataset d(1, base, Stage::kDiscretized);
  const Dataset dn(1, moved, Stage::kDiscretized);
  const BasisSet basis = enumerate_basis(2, 1);
  const double scale = moment_noise_scale(PrivacyMode::kPure, basis.size(), n, 1.0);
  auto release = [&](double s) {
    return [&basis, s](const Dataset& x, RandomStream& r) {
      return compute_moments(x, basis).values[1] + laplace_sample(s, r);
    };
  };
  const double est = epsilon_audit(release(scale), d, dn, 100000, 50, StreamFactory(4), 2000.0);
  const double halved = epsilon_audit(release(scale / 2.0), d, dn, 100000, 50, StreamFactory(5), 2000.0);
  return {est <= 1.1 && halved >= 1.2,
          "estimate " + Fmt("%.3f", est) + ", halved scale " + Fmt("%.3f", halved)};
}

Outcome NoiseConcentration() {
  const std::uint64_t td = 16, n = 1000;
  const double scale = moment_noise_scale(PrivacyMode::kPure, td, n, 1.0);
  const double bound = 2.0 * td * td / static_cast<double>(n);
  const double p = 1.0 - 10.0 * std::exp(-static_cast<double>(td) / 5.0);
  RandomStream rng(5);
  int hits = 0;
  std::vector<double> norms;
  for (int trial = 0; trial < 1000; ++trial) {
    double l1 = 0.0;
    for (std::uint64_t r = 0; r < td; ++r) l1 += std::abs(laplace_sample(scale, rng));
    hits += l1 <= bound;
    norms.push_back(l1);
  }
  const double freq = hits / 1000.0;
  const double ratio = Median(norms) / (static_cast<double>(td) * scale);
  return {freq >= p && ratio >= 0.75 && ratio <= 1.25,
          "frequency " + Fmt("%.3f", freq) + " >= " + Fmt("%.3f", p) + ", median/(t^d scale) " +
              Fmt("%.3f", ratio)};
}

Outcome SamplingConcentration() {
  const BasisSet basis = enumerate_basis(4, 2);
  const ChebGrid grid(8);
  std::vector<double> c;
  for (double x : grid.values()) {
    for (double y : grid.values()) c.insert(c.end(), {x, y});
  }
  const Dataset support(2, std::move(c), Stage::kDiscretized);
  RandomStream wrng(6);
  std::vector<double> w(support.size());
  double total = 0.0;
  for (double& x : w) total += (x = wrng.Uniform());
  for (double& x : w) x /= total;
  const ProbabilityVector u{support, w};
  const auto expected = build_design_matrix(basis, support).Apply(w);
  const std::uint64_t m = 10000;
  const double tau = std::sqrt(2.0 * std::log(2.0 * basis.size() / 0.05) / static_cast<double>(m));
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RandomStream rng(seed);
    const auto synth = compute_moments(sample_synthetic(u, m, rng), basis);
    double linf = 0.0;
    for (std::size_t r = 0; r < basis.size(); ++r) linf = std::max(linf, std::abs(synth.values[r] - expected[r]));
    hits += linf <= tau;
  }
  return {basis.size() == 16 && hits >= 190,
          std::to_string(hits) + "/200 trials within " + Fmt("%.4f", tau)};
}

double SinTheta(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = a.normalized().dot(b.normalized());
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

Outcome PsiCorrectness() {
  RandomStream rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd g(10, 10);
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) g(i, j) = rng.Gaussian();
    }
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    Eigen::VectorXd lam(10);
    lam(0) = 1.0 + rng.Uniform();
    for (int i = 1; i < 10; ++i) lam(i) = (lam(0) - 0.5) * rng.Uniform();
    const Eigen::MatrixXd a = q * lam.asDiagonal() * q.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const auto it = subspace_iteration(a, 1, 100, 0.0, NoiseKind::kLaplace, rng);
    worst = std::max(worst, SinTheta(it.X.col(0), es.eigenvectors().col(9)));
  }
  // Spike along (1,-1,0,0); the data are fixed per n, the PSI noise varies.
  const Eigen::Vector4d spike(1, -1, 0, 0);
  std::vector<double> medians;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    RandomStream data_rng(70);
    std::vector<double> c;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = 0.5 * data_rng.Gaussian();
      c.push_back(std::clamp(f + 0.05 * data_rng.Gaussian(), -1.0, 1.0));
      c.push_back(std::clamp(-f + 0.05 * data_rng.Gaussian(), -1.0, 1.0));
      c.push_back(std::clamp(0.05 * data_rng.Gaussian(), -1.0, 1.0));
      c.push_back(std::clamp(0.05 * data_rng.Gaussian(), -1.0, 1.0));
    }
    const Dataset data(4, std::move(c), Stage::kNormalized);
    std::vector<double> s;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RandomStream prng(seed);
      PsiOptions opt;
      opt.k = 1;
      opt.iterations = 4;
      const auto sub = psi(data, opt, 1.0, 0.0, prng);
      s.push_back(SinTheta(sub.X.col(0), spike));
    }
    medians.push_back(Median(s));
  }
  const bool ok = worst <= 1e-6 && medians[0] > medians[1] && medians[1] > medians[2];
  return {ok, "noiseless max sin " + Fmt("%.2g", worst) + ", private medians " + Fmt("%.3f", medians[0]) +
                  " > " + Fmt("%.3f", medians[1]) + " > " + Fmt("%.4f", medians[2])};
}

Outcome KNormNumeric() {
  RandomStream rng(8);
  double wide = 0.0, narrow = 1e300;
  for (int i = 0; i < 20; ++i) {
    auto q = random_queries(1, 10, 2, 2.0, AlphaSampling::kNormCertified, rng).front();
    wide = std::max(wide, knorm_estimate(q, 4));
    q.sigma = 0.5;
    narrow = std::min(narrow, knorm_estimate(q, 4));
  }
  return {wide <= 1.05 && narrow > 1.0,
          "sigma=2 max " + Fmt("%.4f", wide) + ", sigma=0.5 min " + Fmt("%.3f", narrow)};
}

// Two-factor data in five dimensions, clamped to the cube.
Dataset TrendData() {
  RandomStream g = StreamFactory(99).Stream("data");
  std::vector<double> c;
  for (std::size_t i = 0; i < 2000; ++i) {
    const double f = g.Gaussian();
    const double f2 = g.Gaussian();
    for (std::size_t j = 0; j < 5; ++j) {
      const double load = (j % 2 ? -1.0 : 1.0) * 0.3;
      const double v = load * f + 0.09 * f2 * (j < 2 ? 1.0 : -0.5) + 0.02 * g.Gaussian();
      c.push_back(std::clamp(v, -1.0, 1.0));
    }
  }
  return Dataset(5, std::move(c), Stage::kNormalized);
}

ExperimentConfig TrendConfig() {
  ExperimentConfig cfg;
  cfg.epsilon = 1.0;
  cfg.C = 2000;
  cfg.query_count = 200;
  cfg.rounds = 20;
  cfg.seed = 1;
  return cfg;
}

Outcome TrendReproduction() {
  const Dataset data = TrendData();
  const auto out = RunSweep(data, TrendConfig());
  const auto& sig = TrendConfig().sigmas;
  int monotone = 0;
  double rel10 = 0.0;
  int ok_cells = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<double> med;
    for (double s : sig) {
      for (const auto& c : out.cells) {
        if (c.seed == seed && c.sigma == s) {
          med.push_back(c.median_rel);
          ok_cells += c.ok;
          if (s == 10.0) rel10 = std::max(rel10, c.worst_rel);
        }
      }
    }
    int pairs = 0;
    for (std::size_t i = 0; i + 1 < med.size(); ++i) pairs += med[i + 1] <= med[i];
    monotone += pairs == 4;
  }
  return {ok_cells == 100 && monotone > 10 && rel10 <= 0.05,
          std::to_string(monotone) + "/20 seeds nonincreasing in 4/4 pairs, max worst rel at sigma=10 " +
              Fmt("%.4f", rel10)};
}

Outcome SubsetQuality() {
  const Dataset data = TrendData();
  ExperimentConfig cfg = TrendConfig();
  cfg.sigmas = {4.0};
  const auto pca = RunSweep(data, cfg);
  cfg.subset = SubsetSource::kUniformHypercube;
  const auto uni = RunSweep(data, cfg);
  int wins = 0;
  bool all_ok = true;
  for (std::size_t i = 0; i < pca.cells.size(); ++i) {
    all_ok = all_ok && pca.cells[i].ok && uni.cells[i].ok && pca.cells[i].seed == uni.cells[i].seed;
    wins += pca.cells[i].worst_rel < uni.cells[i].worst_rel;
  }
  return {all_ok && wins >= 15, "ellipsoid better in " + std::to_string(wins) + "/20 seeds"};
}

Outcome CliDeterminism(const std::string& cli, const std::string& config, const std::string& work) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(work) / "acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string files[2];
  int codes[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("run" + std::to_string(i));
    const std::string cmd = "\"" + cli + "\" run --config \"" + config + "\" --seed 3 --out \"" +
                            out.string() + "\" > \"" + (dir / "log.txt").string() + "\" 2>&1";
    codes[i] = std::system(cmd.c_str());
    std::ifstream in(out / "synthetic.csv", std::ios::binary);
    files[i].assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  const bool ok = codes[0] == 0 && codes[1] == 0 && !files[0].empty() && files[0] == files[1];
  return {ok, "exit codes " + std::to_string(codes[0]) + "," + std::to_string(codes[1]) + ", " +
                  std::to_string(files[0].size()) + " bytes, identical: " + (files[0] == files[1] ? "yes" : "no")};
}

}  // namespace
}  // namespace synthdb

int main(int argc, char** argv) {
  using synthdb::Outcome;
  const std::string cli = SYNTHDB_CLI_PATH;
  const std::string config = SYNTHDB_SAMPLE_CONFIG;
  const std::string work = SYNTHDB_WORK_DIR;
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "parameter derivation exactness", 1, synthdb::ParameterDerivation},
      {2, "LP oracle equivalence", 60, synthdb::LpOracle},
      {3, "noiseless identifiability", 60, synthdb::NoiselessIdentifiability},
      {4, "DP audit", 30, synthdb::DpAudit},
      {5, "noise-sum concentration", 30, synthdb::NoiseConcentration},
      {6, "sampling concentration", 60, synthdb::SamplingConcentration},
      {7, "PSI correctness", 120, synthdb::PsiCorrectness},
      {8, "K-norm numeric", 60, synthdb::KNormNumeric},
      {9, "smoothness trend", 300, synthdb::TrendReproduction},
      {10, "subset quality", 300, synthdb::SubsetQuality},
      {11, "CLI determinism", 60, [&] { return synthdb::CliDeterminism(cli, config, work); }},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.limit_s;
    failures += !pass;
    std::printf("%s criterion %d (%s): %s; %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

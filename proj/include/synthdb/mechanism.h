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

// End-to-end release: moments of the discretized data, Laplace (or
// Gaussian-calibrated) noise, lattice rounding, the L1 fit over a support of
// grid points, and sampling of the synthetic database.

#ifndef SYNTHDB_MECHANISM_H_
#define SYNTHDB_MECHANISM_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthdb/basis.h"
#include "synthdb/core.h"
#include "synthdb/lp.h"
#include "synthdb/noise.h"
#include "synthdb/pca.h"
#include "synthdb/random.h"

namespace synthdb {

struct SyntheticDatabase {
  Dataset points;
  MechanismParams params;
  std::uint64_t seed = 0;
  PrivacyBudget budget;
};

struct DiagnosticsReport {
  // ||noisy - true||_1. Only filled when true moments were retained, and
  // then the report is flagged non-private.
  std::optional<double> noise_l1;
  double lp_objective = 0.0;
  double sampling_linf = 0.0;
  double rounding_bound = 0.0;
  double discretization_bound = 0.0;
  std::size_t support_size = 0;
  std::size_t basis_count = 0;
  std::size_t lp_iterations = 0;
  bool lp_optimal = true;
  bool degraded = false;
  bool non_private = false;
};

// Intermediate values of one run, kept for diagnostics and tests.
struct RunArtifacts {
  BasisSet basis;
  Dataset support;
  Lattice lattice{1};
  std::optional<MomentVector> true_moments;
  MomentVector noisy_moments;
  MomentVector rounded_moments;
  DesignMatrix design;
  DesignMatrix design_rounded;
  L1FitResult lp;
  ProbabilityVector distribution;
  double noise_scale = 0.0;
  std::uint64_t grid_size = 0;
};

enum class SubsetSource { kPcaEllipsoid, kUniformHypercube };

inline const char* SubsetSourceName(SubsetSource s) {
  return s == SubsetSource::kPcaEllipsoid ? "pca" : "uniform";
}

struct MechanismOptions {
  bool strict_sensitivity = false;
  std::optional<std::uint64_t> m_max;
  std::uint64_t max_lp_columns = 1'000'000;
  bool retain_artifacts = false;
  // Also keep the un-noised moments, which makes the diagnostics non-private.
  bool retain_true_moments = false;
  double smoothness_bound = 1.0;  // B in the discretization bound d B / N
  L1FitOptions lp;
  std::size_t psi_k = 1;  // 0 selects max(1, floor(d/2))
  std::size_t psi_iterations = 1;
  double pca_psi_share = 0.8;  // of the PCA budget; the rest goes to the mean
  // Streams for the grid-subset stage of run_accelerated. Defaults to the
  // run's own streams; a sweep can pin it per round so every cell of the
  // round shares one subset.
  std::optional<StreamFactory> subset_streams;
};

struct ReleaseResult {
  SyntheticDatabase db;
  DiagnosticsReport diagnostics;
  std::optional<RunArtifacts> artifacts;
  std::vector<std::string> warnings;
};

// m i.i.d. draws from the distribution. Sees nothing but (u*, support, m).
inline Dataset sample_synthetic(const ProbabilityVector& u, std::uint64_t m, RandomStream& rng) {
  u.Validate();
  const std::size_t d = u.support.dim();
  std::vector<double> cdf(u.weights.size());
  std::partial_sum(u.weights.begin(), u.weights.end(), cdf.begin());
  const double total = cdf.empty() ? 0.0 : cdf.back();
  std::vector<double> coords;
  coords.reserve(m * d);
  for (std::uint64_t i = 0; i < m; ++i) {
    const double x = rng.Uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    std::size_t k = static_cast<std::size_t>(it - cdf.begin());
    if (k >= cdf.size()) k = cdf.size() - 1;
    // Skip zero-weight entries that share a cdf value with their successor.
    while (u.weights[k] == 0.0 && k + 1 < cdf.size()) ++k;
    auto p = u.support.point(k);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  const Stage stage = u.support.stage() == Stage::kRaw ? Stage::kNormalized : u.support.stage();
  return Dataset(d, std::move(coords), stage);
}

inline DiagnosticsReport error_diagnostics(const std::optional<RunArtifacts>& artifacts,
                                           const Dataset& synthetic, const MechanismParams& params,
                                           double smoothness_bound = 1.0) {
  if (!artifacts) throw std::invalid_argument("error_diagnostics: run artifacts were not retained");
  const RunArtifacts& a = *artifacts;
  DiagnosticsReport rep;
  if (a.true_moments) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.noisy_moments.size(); ++r) {
      s += std::abs(a.noisy_moments.values[r] - a.true_moments->values[r]);
    }
    rep.noise_l1 = s;
    rep.non_private = true;
  }
  rep.lp_objective = a.lp.objective;
  if (!synthetic.empty()) {
    const auto synth = compute_moments(synthetic, a.basis);
    const auto expected = a.design.Apply(a.distribution.weights);
    for (std::size_t r = 0; r < expected.size(); ++r) {
      rep.sampling_linf = std::max(rep.sampling_linf, std::abs(synth.values[r] - expected[r]));
    }
  }
  rep.basis_count = a.basis.size();
  rep.support_size = a.support.size();
  rep.rounding_bound = static_cast<double>(a.basis.size()) / static_cast<double>(params.L);
  rep.discretization_bound =
      static_cast<double>(a.basis.d) * smoothness_bound / static_cast<double>(params.N);
  rep.lp_iterations = a.lp.iterations;
  rep.lp_optimal = a.lp.optimal;
  rep.degraded = a.lp.degraded;
  return rep;
}

namespace internal {

inline Dataset FullGrid(const ChebGrid& grid, std::size_t d) {
  const std::uint64_t count = CheckedPow(grid.size(), d);
  std::vector<double> coords;
  coords.reserve(count * d);
  std::vector<std::uint64_t> idx(d, 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < d; ++j) coords.push_back(grid.values()[idx[j]]);
    for (std::size_t j = d; j-- > 0;) {
      if (++idx[j] < grid.size()) break;
      idx[j] = 0;
    }
  }
  return Dataset(d, std::move(coords), Stage::kDiscretized);
}

// Drops repeated points, keeping first occurrences in order.
inline Dataset Deduplicate(const Dataset& pts) {
  std::set<std::vector<double>> seen;
  std::vector<double> coords;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto p = pts.point(i);
    std::vector<double> key(p.begin(), p.end());
    if (seen.insert(key).second) coords.insert(coords.end(), p.begin(), p.end());
  }
  return Dataset(pts.dim(), std::move(coords), pts.stage());
}

inline void CheckInput(const Dataset& data, const PrivacyBudget& budget) {
  budget.Validate();
  if (data.stage() == Stage::kRaw) {
    throw std::invalid_argument("mechanism: dataset must be normalized to [-1,1]^d");
  }
  if (data.size() < 2) throw std::invalid_argument("mechanism: need n >= 2");
}

inline MechanismParams DeriveParams(const Dataset& data, std::uint64_t k, double delta,
                                    const MechanismOptions& opt) {
  MechanismParams p = delta == 0.0 ? derive_params_pure(data.size(), data.dim(), k)
                                   : derive_params_approx(data.size(), data.dim(), k, delta);
  if (opt.m_max && p.m > *opt.m_max) p.m = *opt.m_max;
  return p;
}

// Steps shared by both variants, from the discretized data to the sampled
// synthetic points.
inline ReleaseResult ReleaseOnSupport(const Dataset& discretized, BasisSet basis, Dataset support,
                                      const MechanismParams& params, const PrivacyBudget& moment_budget,
                                      const PrivacyBudget& full_budget, const StreamFactory& streams,
                                      const MechanismOptions& opt) {
  RunArtifacts art;
  art.lattice = Lattice(params.L);
  art.basis = std::move(basis);
  art.support = std::move(support);

  const MomentVector true_moments = compute_moments(discretized, art.basis);
  art.noise_scale = moment_noise_scale(params.mode, art.basis.size(), discretized.size(),
                                       moment_budget.epsilon, moment_budget.delta,
                                       opt.strict_sensitivity);
  RandomStream noise_rng = streams.Stream("moments");
  art.noisy_moments = privatize_moments(true_moments, {NoiseKind::kLaplace, art.noise_scale},
                                        noise_rng);
  if (opt.retain_true_moments) art.true_moments = true_moments;

  // Post-processing only from here on.
  art.rounded_moments = RoundMoments(art.noisy_moments, art.lattice);
  art.design = build_design_matrix(art.basis, art.support);
  art.design_rounded = art.design.Rounded(art.lattice);
  art.lp = solve_l1_fit(art.design_rounded, art.rounded_moments.values, opt.lp);
  art.distribution = ProbabilityVector{art.support, art.lp.weights};

  RandomStream sample_rng = streams.Stream("sampling");
  ReleaseResult out;
  out.db.points = sample_synthetic(art.distribution, params.m, sample_rng);
  out.db.params = params;
  out.db.seed = streams.root_seed();
  out.db.budget = full_budget;
  std::optional<RunArtifacts> holder(std::move(art));
  out.diagnostics = error_diagnostics(holder, out.db.points, params, opt.smoothness_bound);
  if (opt.retain_artifacts || opt.retain_true_moments) out.artifacts = std::move(holder);
  return out;
}

}  // namespace internal

// Full grid and full basis. Suitable while N^d stays within
// max_lp_columns; larger problems need run_accelerated.
inline ReleaseResult run_full(const Dataset& data, std::uint64_t k, const PrivacyBudget& budget,
                              const StreamFactory& streams, const MechanismOptions& opt = {}) {
  internal::CheckInput(data, budget);
  const MechanismParams params = internal::DeriveParams(data, k, budget.delta, opt);
  const std::uint64_t columns = CheckedPow(params.N, data.dim());
  const std::uint64_t rows = CheckedPow(params.t, data.dim());
  if (columns > opt.max_lp_columns || rows > opt.max_lp_columns) {
    throw std::invalid_argument(
        "run_full: grid of " + std::to_string(params.N) + "^" + std::to_string(data.dim()) +
        " points exceeds the LP size bound; use run_accelerated");
  }
  const ChebGrid grid(params.N);
  const Dataset discretized = discretize(data, grid);
  auto out = internal::ReleaseOnSupport(discretized, enumerate_basis(params.t, data.dim()),
                                        internal::FullGrid(grid, data.dim()), params, budget,
                                        budget, streams, opt);
  if (out.artifacts) out.artifacts->grid_size = params.N;
  return out;
}

struct AcceleratedConfig {
  double sigma = 0.0;              // kernel bandwidth; K defaults to floor(sigma^2)
  std::optional<std::uint64_t> K;  // explicit smoothness order
  std::size_t C = 10000;
  std::optional<std::uint64_t> R;
  SubsetSource subset = SubsetSource::kPcaEllipsoid;
};

// R = ceil(0.5 n^{d/(2d+s)}) for pure and ceil(0.5 n^{2d/(3d+2s)}) for
// approximate privacy, where s is sigma^2 (or K).
inline std::uint64_t default_basis_subset_size(std::uint64_t n, std::size_t d, double smoothness,
                                               PrivacyMode mode) {
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  const double e = mode == PrivacyMode::kPure ? dd / (2.0 * dd + smoothness)
                                              : 2.0 * dd / (3.0 * dd + 2.0 * smoothness);
  return std::max<std::uint64_t>(1, SnappedCeil(0.5 * std::pow(nn, e)));
}

inline ReleaseResult run_accelerated(const Dataset& data, const AcceleratedConfig& cfg,
                                     const PrivacyBudget& budget, const StreamFactory& streams,
                                     const MechanismOptions& opt = {}) {
  internal::CheckInput(data, budget);
  if (cfg.C == 0) throw std::invalid_argument("run_accelerated: C must be >= 1");
  const double smoothness = cfg.K ? static_cast<double>(*cfg.K) : cfg.sigma * cfg.sigma;
  if (!(smoothness > 0.0)) throw std::invalid_argument("run_accelerated: need sigma > 0 or K >= 1");
  const std::uint64_t k =
      cfg.K ? *cfg.K : std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(smoothness)));
  const std::size_t d = data.dim();
  std::vector<std::string> warnings;

  const bool use_pca = cfg.subset == SubsetSource::kPcaEllipsoid;
  const PrivacyBudget moment_budget = use_pca ? budget.Scaled(1.0 - budget.pca_fraction) : budget;
  MechanismParams params = internal::DeriveParams(data, k, moment_budget.delta, opt);

  const std::uint64_t full_basis = CheckedPow(params.t, d);
  std::uint64_t r = cfg.R ? *cfg.R : default_basis_subset_size(data.size(), d, smoothness, params.mode);
  if (r > full_basis) {
    warnings.push_back("R=" + std::to_string(r) + " exceeds t^d=" + std::to_string(full_basis) +
                       "; clamped");
    r = full_basis;
  }
  params.accelerated = AcceleratedParams{cfg.C, r};

  const ChebGrid grid(params.N);
  const StreamFactory subset_streams = opt.subset_streams.value_or(streams);
  Dataset subset;
  if (use_pca) {
    const PrivacyBudget pca_budget = budget.Scaled(budget.pca_fraction);
    const PrivacyBudget psi_budget = pca_budget.Scaled(opt.pca_psi_share);
    const PrivacyBudget mean_budget = pca_budget.Scaled(1.0 - opt.pca_psi_share);
    PsiOptions po;
    po.k = opt.psi_k ? opt.psi_k : std::max<std::size_t>(1, d / 2);
    po.iterations = opt.psi_iterations;
    po.noise_kind = budget.pure() ? NoiseKind::kLaplace : NoiseKind::kGaussian;
    if (2 * po.k > d) {
      warnings.push_back("PCA rank k=" + std::to_string(po.k) + " exceeds d/2");
    }
    RandomStream psi_rng = subset_streams.Stream("psi");
    PrivateSubspace sub = psi(data, po, psi_budget.epsilon, psi_budget.delta, psi_rng);
    RandomStream mean_rng = subset_streams.Stream("mean");
    sub.center = private_mean(data, mean_budget.epsilon, mean_rng);
    RandomStream ell_rng = subset_streams.Stream("ellipsoid");
    subset = discretize(sample_ellipsoid(sub, cfg.C, ell_rng).points, grid);
  } else {
    RandomStream cube_rng = subset_streams.Stream("hypercube");
    subset = uniform_hypercube_subset(grid, d, cfg.C, cube_rng);
  }
  subset = internal::Deduplicate(subset);

  const Dataset discretized = discretize(data, grid);
  auto out = internal::ReleaseOnSupport(discretized, enumerate_basis(params.t, d, r),
                                        std::move(subset), params, moment_budget, budget, streams,
                                        opt);
  if (out.artifacts) out.artifacts->grid_size = params.N;
  out.warnings = std::move(warnings);
  return out;
}

}  // namespace synthdb

#endif  // SYNTHDB_MECHANISM_H_

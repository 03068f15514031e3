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

// Private subspace iteration and the grid subsets used by the accelerated
// mechanism.

#ifndef SYNTHDB_PCA_H_
#define SYNTHDB_PCA_H_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "synthdb/core.h"
#include "synthdb/noise.h"
#include "synthdb/random.h"

namespace synthdb {

struct CovarianceMatrix {
  Eigen::MatrixXd A;
  // Spectral-norm change from swapping one point of the dataset.
  double sensitivity_bound = 0.0;
};

// A = (1/n) sum (x - mean)(x - mean)^T.
inline CovarianceMatrix covariance(const Dataset& data) {
  if (data.size() < 2) throw std::invalid_argument("covariance: need n >= 2");
  const std::size_t d = data.dim();
  const std::size_t n = data.size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < n; ++i) {
    mean += Eigen::Map<const Eigen::VectorXd>(data.point(i).data(), d);
  }
  mean /= static_cast<double>(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(data.point(i).data(), d) - mean;
    a.noalias() += c * c.transpose();
  }
  a /= static_cast<double>(n);
  a = 0.5 * (a + a.transpose());
  return {a, 5.0 * static_cast<double>(d) / static_cast<double>(n)};
}

struct GramSchmidtResult {
  Eigen::MatrixXd Q;
  std::vector<std::size_t> resampled;  // columns replaced by fresh Gaussian draws
};

// Modified Gram-Schmidt with one re-orthogonalization pass. A column whose
// residual collapses (norm <= 1e-12 relative) is redrawn from N(0, I).
inline GramSchmidtResult gram_schmidt(const Eigen::MatrixXd& m, RandomStream& rng) {
  const auto d = m.rows();
  const auto k = m.cols();
  if (k > d) throw std::invalid_argument("gram_schmidt: more columns than rows");
  GramSchmidtResult out{Eigen::MatrixXd::Zero(d, k), {}};
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd v = m.col(j);
    bool redrawn = false;
    for (int attempt = 0;; ++attempt) {
      const double scale = std::max(1.0, v.norm());
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i < j; ++i) v -= out.Q.col(i).dot(v) * out.Q.col(i);
      }
      const double norm = v.norm();
      if (norm > 1e-12 * scale) {
        out.Q.col(j) = v / norm;
        break;
      }
      if (attempt > 16) throw std::runtime_error("gram_schmidt: could not complete the basis");
      redrawn = true;
      for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.Gaussian();
    }
    if (redrawn) out.resampled.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

// Per-entry noise scale for subspace iteration.
inline double psi_noise_sigma(NoiseKind kind, std::size_t d, std::size_t k, std::size_t iterations,
                              std::uint64_t n, double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("psi: epsilon must be > 0");
  const double dd = static_cast<double>(d);
  const double kk = static_cast<double>(k);
  const double ll = static_cast<double>(iterations);
  const double ne = static_cast<double>(n) * epsilon;
  if (kind == NoiseKind::kGaussian) {
    if (!(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("psi: gaussian noise needs delta in (0,1)");
    }
    return 5.0 * dd * std::sqrt(4.0 * kk * ll * std::log(1.0 / delta)) / ne;
  }
  return 50.0 * std::pow(dd, 1.5) * kk * ll / ne;
}

struct SubspaceIterate {
  Eigen::MatrixXd X;       // orthonormal d x k
  Eigen::MatrixXd W_last;  // final noisy iterate before orthonormalization
  double max_orthonormality_error = 0.0;
  bool resampled = false;
};

// Noisy power iteration on a symmetric matrix:
//   W = A X + ||X||_max G,  X = GS(W).
// sigma = 0 gives plain subspace iteration.
inline SubspaceIterate subspace_iteration(const Eigen::MatrixXd& a, std::size_t k,
                                          std::size_t iterations, double sigma, NoiseKind kind,
                                          RandomStream& rng) {
  const auto d = a.rows();
  if (k == 0 || static_cast<Eigen::Index>(k) > d) {
    throw std::invalid_argument("psi: k must lie in [1, d]");
  }
  if (iterations == 0) throw std::invalid_argument("psi: need at least one iteration");
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd g0(d, kk);
  for (Eigen::Index j = 0; j < kk; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g0(i, j) = rng.Gaussian();
  }
  auto gs = gram_schmidt(g0, rng);
  SubspaceIterate out;
  out.X = gs.Q;
  out.resampled = !gs.resampled.empty();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(kk, kk);
  for (std::size_t l = 0; l < iterations; ++l) {
    Eigen::MatrixXd w = a * out.X;
    if (sigma > 0.0) {
      const double amp = out.X.cwiseAbs().maxCoeff();
      for (Eigen::Index j = 0; j < kk; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) w(i, j) += amp * SampleNoise(kind, sigma, rng);
      }
    }
    out.W_last = w;
    gs = gram_schmidt(w, rng);
    out.X = gs.Q;
    out.resampled = out.resampled || !gs.resampled.empty();
    out.max_orthonormality_error = std::max(
        out.max_orthonormality_error, (out.X.transpose() * out.X - eye).cwiseAbs().maxCoeff());
  }
  return out;
}

// Private estimator: column norms of the last noisy iterate.
inline std::vector<double> estimate_eigenvalues(const Eigen::MatrixXd& w_last) {
  std::vector<double> out(static_cast<std::size_t>(w_last.cols()));
  for (Eigen::Index j = 0; j < w_last.cols(); ++j) out[static_cast<std::size_t>(j)] = w_last.col(j).norm();
  return out;
}

// sqrt(x^T A^2 x). Reads the raw covariance; for tests only.
inline std::vector<double> estimate_eigenvalues_exact(const Eigen::MatrixXd& x,
                                                      const Eigen::MatrixXd& a) {
  std::vector<double> out(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) out[static_cast<std::size_t>(j)] = (a * x.col(j)).norm();
  return out;
}

struct PrivateSubspace {
  Eigen::MatrixXd X;               // d x k, orthonormal columns
  std::vector<double> lambda_hat;  // nonincreasing
  Eigen::VectorXd center;          // private mean
  NoiseKind noise_kind = NoiseKind::kLaplace;
  double sigma = 0.0;
  bool resampled = false;
};

struct PsiOptions {
  std::size_t k = 1;
  std::size_t iterations = 4;
  NoiseKind noise_kind = NoiseKind::kLaplace;
  // Replaces the calibrated sigma when set; test hook.
  std::optional<double> sigma_override;
};

// Private top-k eigenpairs of the data covariance. The center is left at
// zero; see private_mean.
inline PrivateSubspace psi(const Dataset& data, const PsiOptions& opt, double epsilon,
                           double delta, RandomStream& rng) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("psi: epsilon must be > 0");
  const auto cov = covariance(data);
  const double sigma =
      opt.sigma_override ? *opt.sigma_override
                         : psi_noise_sigma(opt.noise_kind, data.dim(), opt.k, opt.iterations,
                                           data.size(), epsilon, delta);
  auto it = subspace_iteration(cov.A, opt.k, opt.iterations, sigma, opt.noise_kind, rng);
  auto lambda = estimate_eigenvalues(it.W_last);
  std::vector<std::size_t> order(lambda.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambda[a] > lambda[b]; });
  PrivateSubspace out;
  out.X.resize(it.X.rows(), it.X.cols());
  out.lambda_hat.resize(lambda.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    out.X.col(static_cast<Eigen::Index>(j)) = it.X.col(static_cast<Eigen::Index>(order[j]));
    out.lambda_hat[j] = lambda[order[j]];
  }
  out.center = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data.dim()));
  out.noise_kind = opt.noise_kind;
  out.sigma = sigma;
  out.resampled = it.resampled;
  return out;
}

inline double private_mean_scale(std::size_t d, std::uint64_t n, double epsilon) {
  return 2.0 * static_cast<double>(d) / (static_cast<double>(n) * epsilon);
}

// Mean plus Laplace(2d / (n eps)) per coordinate, clamped to the cube.
inline Eigen::VectorXd private_mean(const Dataset& data, double epsilon, RandomStream& rng) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("private_mean: epsilon must be > 0");
  if (data.empty()) throw std::invalid_argument("private_mean: empty dataset");
  const std::size_t d = data.dim();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < data.size(); ++i) {
    mean += Eigen::Map<const Eigen::VectorXd>(data.point(i).data(), static_cast<Eigen::Index>(d));
  }
  mean /= static_cast<double>(data.size());
  const double scale = private_mean_scale(d, data.size(), epsilon);
  for (Eigen::Index j = 0; j < mean.size(); ++j) {
    mean(j) = std::clamp(mean(j) + laplace_sample(scale, rng), -1.0, 1.0);
  }
  return mean;
}

inline constexpr double kEigenvalueFloor = 1e-6;

struct EllipsoidSubset {
  Dataset points;                  // clipped to [-1,1]^d
  std::vector<double> unclipped;   // row-major, before clipping
};

// Uniform draws from the solid k-dimensional ellipsoid with axes X and
// radii sqrt(max(lambda_hat, floor)), centered at subspace.center.
inline EllipsoidSubset sample_ellipsoid(const PrivateSubspace& subspace, std::size_t count,
                                        RandomStream& rng) {
  if (count == 0) throw std::invalid_argument("sample_ellipsoid: C must be >= 1");
  const auto d = subspace.X.rows();
  const auto k = subspace.X.cols();
  if (subspace.center.size() != d) throw std::invalid_argument("sample_ellipsoid: center size mismatch");
  Eigen::MatrixXd axes = subspace.X;
  for (Eigen::Index s = 0; s < k; ++s) {
    axes.col(s) *= std::sqrt(std::max(subspace.lambda_hat[static_cast<std::size_t>(s)], kEigenvalueFloor));
  }
  EllipsoidSubset out;
  out.unclipped.resize(count * static_cast<std::size_t>(d));
  std::vector<double> clipped(out.unclipped.size());
  Eigen::VectorXd z(k);
  for (std::size_t i = 0; i < count; ++i) {
    double norm2;
    do {
      for (Eigen::Index s = 0; s < k; ++s) z(s) = rng.Gaussian();
      norm2 = z.squaredNorm();
    } while (norm2 == 0.0);
    const double radius = std::pow(rng.Uniform(), 1.0 / static_cast<double>(k));
    z *= radius / std::sqrt(norm2);
    Eigen::VectorXd x = subspace.center + axes * z;
    for (Eigen::Index j = 0; j < d; ++j) {
      const std::size_t pos = i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j);
      out.unclipped[pos] = x(j);
      clipped[pos] = std::clamp(x(j), -1.0, 1.0);
    }
  }
  out.points = Dataset(static_cast<std::size_t>(d), std::move(clipped), Stage::kNormalized);
  return out;
}

// C i.i.d. uniform draws from the N^d grid.
inline Dataset uniform_hypercube_subset(const ChebGrid& grid, std::size_t d, std::size_t count,
                                        RandomStream& rng) {
  if (count == 0) throw std::invalid_argument("uniform_hypercube_subset: C must be >= 1");
  if (d == 0) throw std::invalid_argument("uniform_hypercube_subset: d must be >= 1");
  std::vector<double> coords(count * d);
  for (double& x : coords) x = grid.values()[rng.UniformIndex(grid.size())];
  return Dataset(d, std::move(coords), Stage::kDiscretized);
}

}  // namespace synthdb

#endif  // SYNTHDB_PCA_H_

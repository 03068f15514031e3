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

#include "synthdb/pca.h"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "synthdb/core.h"
#include "synthdb/random.h"

namespace synthdb {
namespace {

double SinTheta(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = a.normalized().dot(b.normalized());
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

Eigen::MatrixXd RandomPsdWithGap(RandomStream& rng, int d, double ratio) {
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = rng.Gaussian();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd lam(d);
  lam(0) = 1.0 + rng.Uniform();
  // lambda_1 / lambda_2 >= ratio.
  for (int i = 1; i < d; ++i) lam(i) = lam(0) / ratio * rng.Uniform();
  return q * lam.asDiagonal() * q.transpose();
}

TEST(CovarianceTest, Examples) {
  const auto c = covariance(Dataset(2, {1, 0, -1, 0}, Stage::kNormalized));
  EXPECT_TRUE(c.A.isApprox(Eigen::Matrix2d(Eigen::Vector2d(1, 0).asDiagonal()), 1e-15));
  EXPECT_DOUBLE_EQ(c.sensitivity_bound, 5.0 * 2 / 2);
  const auto same = covariance(Dataset(3, {0.2, -0.4, 0.9, 0.2, -0.4, 0.9, 0.2, -0.4, 0.9},
                                       Stage::kNormalized));
  EXPECT_LE(same.A.cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(covariance(Dataset(2, {0.1, 0.2}, Stage::kNormalized)), std::invalid_argument);
}

TEST(CovarianceTest, SymmetricPsdAndSwapSensitivity) {
  RandomStream rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> c;
    for (int i = 0; i < 200; ++i) c.push_back(2.0 * rng.Uniform() - 1.0);
    const Dataset d(2, c, Stage::kNormalized);
    const auto a = covariance(d);
    EXPECT_LE((a.A - a.A.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.A);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    // Swap one point for a corner.
    auto c2 = c;
    const auto i = rng.UniformIndex(100);
    c2[2 * i] = trial % 2 ? 1.0 : -1.0;
    c2[2 * i + 1] = trial % 3 ? 1.0 : -1.0;
    const auto a2 = covariance(Dataset(2, c2, Stage::kNormalized));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> diff(a.A - a2.A);
    EXPECT_LE(diff.eigenvalues().cwiseAbs().maxCoeff(), 10.0 / 100.0);
  }
}

TEST(GramSchmidtTest, Examples) {
  RandomStream rng(1);
  auto r = gram_schmidt(Eigen::MatrixXd::Identity(3, 3), rng);
  EXPECT_TRUE(r.Q.isApprox(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_TRUE(r.resampled.empty());

  r = gram_schmidt(Eigen::MatrixXd::Ones(2, 1), rng);
  EXPECT_NEAR(r.Q(0, 0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.Q(1, 0), 1.0 / std::sqrt(2.0), 1e-15);

  Eigen::MatrixXd dup(3, 2);
  dup << 1, 1, 2, 2, 3, 3;
  r = gram_schmidt(dup, rng);
  EXPECT_EQ(r.resampled, std::vector<std::size_t>{1});
  EXPECT_LE((r.Q.transpose() * r.Q - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GramSchmidtTest, OrthonormalAndSpanPreserving) {
  RandomStream rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd m(8, 4);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 4; ++j) m(i, j) = rng.Gaussian();
    }
    const auto r = gram_schmidt(m, rng);
    EXPECT_LE((r.Q.transpose() * r.Q - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10);
    // M = Q (Q^T M) when spans agree.
    EXPECT_LE((m - r.Q * (r.Q.transpose() * m)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(PsiNoiseSigmaTest, Examples) {
  EXPECT_NEAR(psi_noise_sigma(NoiseKind::kGaussian, 2, 1, 4, 1000, 1.0, std::exp(-1.0)), 0.04,
              1e-15);
  EXPECT_NEAR(psi_noise_sigma(NoiseKind::kLaplace, 4, 2, 5, 100000, 1.0, 0.0), 0.04, 1e-15);
  EXPECT_THROW(psi_noise_sigma(NoiseKind::kGaussian, 2, 1, 4, 1000, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(psi_noise_sigma(NoiseKind::kLaplace, 2, 1, 4, 1000, 0.0, 0.0), std::invalid_argument);
}

TEST(SubspaceIterationTest, NoiselessDiagonal) {
  RandomStream rng(3);
  Eigen::MatrixXd a = Eigen::Vector4d(4, 1, 0.1, 0.01).asDiagonal();
  const auto it = subspace_iteration(a, 1, 100, 0.0, NoiseKind::kLaplace, rng);
  EXPECT_LE(SinTheta(it.X.col(0), Eigen::Vector4d::UnitX()), 1e-6);
  EXPECT_LE(it.max_orthonormality_error, 1e-9);
}

// Oracle: dense symmetric eigendecomposition.
TEST(SubspaceIterationTest, NoiselessRandomPsdWithGap) {
  RandomStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = RandomPsdWithGap(rng, 10, 1.5);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const Eigen::VectorXd top = es.eigenvectors().col(9);
    const auto it = subspace_iteration(a, 1, 100, 0.0, NoiseKind::kLaplace, rng);
    EXPECT_LE(SinTheta(it.X.col(0), top), 1e-6) << "trial " << trial;
  }
}

TEST(SubspaceIterationTest, NoisyIteratesStayOrthonormal) {
  RandomStream rng(5);
  const auto a = RandomPsdWithGap(rng, 6, 2.0);
  for (auto kind : {NoiseKind::kLaplace, NoiseKind::kGaussian}) {
    const auto it = subspace_iteration(a, 3, 20, 0.5, kind, rng);
    EXPECT_LE(it.max_orthonormality_error, 1e-9);
    EXPECT_EQ(it.W_last.cols(), 3);
  }
  EXPECT_THROW(subspace_iteration(a, 0, 5, 0.0, NoiseKind::kLaplace, rng), std::invalid_argument);
  EXPECT_THROW(subspace_iteration(a, 1, 0, 0.0, NoiseKind::kLaplace, rng), std::invalid_argument);
}

TEST(EstimateEigenvaluesTest, ExactExamples) {
  const Eigen::MatrixXd a = Eigen::Vector2d(4, 1).asDiagonal();
  EXPECT_NEAR(estimate_eigenvalues_exact(Eigen::Vector2d(1, 0), a)[0], 4.0, 1e-15);
  EXPECT_NEAR(estimate_eigenvalues_exact(Eigen::Vector2d(1, 1).normalized(), a)[0],
              std::sqrt(8.5), 1e-12);
  // sigma = 0 on an eigenvector: ||A x|| = lambda.
  RandomStream rng(6);
  Eigen::MatrixXd x = Eigen::Vector2d(1, 0);
  EXPECT_NEAR(estimate_eigenvalues(a * x)[0], 4.0, 1e-15);
}

TEST(EstimateEigenvaluesTest, ExactOnTrueEigenvectors) {
  RandomStream rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = RandomPsdWithGap(rng, 7, 1.2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const auto est = estimate_eigenvalues_exact(es.eigenvectors(), a);
    for (int j = 0; j < 7; ++j) EXPECT_NEAR(est[j], std::abs(es.eigenvalues()(j)), 1e-10);
  }
}

Dataset SpikedData(RandomStream& rng, std::size_t n) {
  std::vector<double> c;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = 0.5 * rng.Gaussian();
    c.push_back(std::clamp(f + 0.05 * rng.Gaussian(), -1.0, 1.0));
    c.push_back(std::clamp(-f + 0.05 * rng.Gaussian(), -1.0, 1.0));
    c.push_back(std::clamp(0.05 * rng.Gaussian(), -1.0, 1.0));
    c.push_back(std::clamp(0.05 * rng.Gaussian(), -1.0, 1.0));
  }
  return Dataset(4, std::move(c), Stage::kNormalized);
}

TEST(PsiTest, OutputInvariants) {
  RandomStream data_rng(8);
  const auto data = SpikedData(data_rng, 5000);
  for (auto kind : {NoiseKind::kLaplace, NoiseKind::kGaussian}) {
    RandomStream rng(9);
    PsiOptions opt;
    opt.k = 2;
    opt.iterations = 3;
    opt.noise_kind = kind;
    const auto sub = psi(data, opt, 1.0, 1e-6, rng);
    EXPECT_LE((sub.X.transpose() * sub.X - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(),
              1e-9);
    ASSERT_EQ(sub.lambda_hat.size(), 2u);
    EXPECT_GE(sub.lambda_hat[0], sub.lambda_hat[1]);
    EXPECT_GE(sub.lambda_hat[1], 0.0);
    EXPECT_GT(sub.sigma, 0.0);
  }
  RandomStream rng(1);
  PsiOptions gauss;
  gauss.noise_kind = NoiseKind::kGaussian;
  EXPECT_THROW(psi(data, gauss, 1.0, 0.0, rng), std::invalid_argument);
  EXPECT_THROW(psi(data, PsiOptions{}, 0.0, 0.0, rng), std::invalid_argument);
}

TEST(PsiTest, NoiselessRecoversSpike) {
  RandomStream data_rng(10);
  const auto data = SpikedData(data_rng, 2000);
  RandomStream rng(11);
  PsiOptions opt;
  opt.iterations = 50;
  opt.sigma_override = 0.0;
  const auto sub = psi(data, opt, 1.0, 0.0, rng);
  const Eigen::Vector4d spike(1, -1, 0, 0);
  EXPECT_LE(SinTheta(sub.X.col(0), spike), 0.02);
}

TEST(PrivateMeanTest, ScaleAndClamp) {
  EXPECT_DOUBLE_EQ(private_mean_scale(2, 100, 1.0), 0.04);
  RandomStream rng(12);
  const Dataset sym(1, {-0.5, 0.5, -0.5, 0.5}, Stage::kNormalized);
  double total = 0.0;
  for (int i = 0; i < 2000; ++i) total += private_mean(sym, 1.0, rng)(0);
  EXPECT_NEAR(total / 2000, 0.0, 0.05);
  const Dataset edge(2, {1, 1, 1, 1}, Stage::kNormalized);
  for (int i = 0; i < 200; ++i) {
    const auto m = private_mean(edge, 0.01, rng);
    EXPECT_LE(m.cwiseAbs().maxCoeff(), 1.0);
  }
  EXPECT_THROW(private_mean(edge, 0.0, rng), std::invalid_argument);
}

PrivateSubspace MakeSubspace(Eigen::MatrixXd x, std::vector<double> lambda, Eigen::VectorXd center) {
  PrivateSubspace s;
  s.X = std::move(x);
  s.lambda_hat = std::move(lambda);
  s.center = std::move(center);
  return s;
}

TEST(SampleEllipsoidTest, UnitSegment) {
  RandomStream rng(13);
  const auto s = MakeSubspace(Eigen::Vector3d::UnitX(), {1.0}, Eigen::Vector3d::Zero());
  const auto out = sample_ellipsoid(s, 1000, rng);
  ASSERT_EQ(out.points.size(), 1000u);
  for (std::size_t i = 0; i < 1000; ++i) {
    auto p = out.points.point(i);
    EXPECT_LE(std::abs(p[0]), 1.0);
    EXPECT_EQ(p[1], 0.0);
    EXPECT_EQ(p[2], 0.0);
  }
  EXPECT_THROW(sample_ellipsoid(s, 0, rng), std::invalid_argument);
}

TEST(SampleEllipsoidTest, MembershipAndClipping) {
  RandomStream rng(14);
  Eigen::MatrixXd g(5, 2);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 2; ++j) g(i, j) = rng.Gaussian();
  }
  const Eigen::MatrixXd x = gram_schmidt(g, rng).Q;
  Eigen::VectorXd center(5);
  center << 0.2, -0.1, 0.0, 0.5, -0.9;
  const std::vector<double> lambda = {2.5, 0.0};  // second axis hits the floor
  const auto s = MakeSubspace(x, lambda, center);
  const auto out = sample_ellipsoid(s, 5000, rng);
  ASSERT_EQ(out.points.size(), 5000u);
  for (double v : out.points.coords()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
  // Radii are sqrt(max(lambda, floor)).
  for (std::size_t i = 0; i < 5000; ++i) {
    Eigen::VectorXd p(5);
    for (int j = 0; j < 5; ++j) p(j) = out.unclipped[i * 5 + j];
    double q = 0.0;
    for (int a = 0; a < 2; ++a) {
      const double proj = (p - center).dot(x.col(a));
      q += proj * proj / std::max(lambda[a], kEigenvalueFloor);
    }
    EXPECT_LE(q, 1.0 + 1e-9);
    // Points stay on the affine subspace through the center.
    const Eigen::VectorXd off = (p - center) - x * (x.transpose() * (p - center));
    EXPECT_LE(off.norm(), 1e-9);
  }
}

TEST(SampleEllipsoidTest, EmpiricalMeanNearCenter) {
  RandomStream rng(15);
  Eigen::Vector2d center(0.1, -0.2);
  const auto s = MakeSubspace(Eigen::Matrix2d::Identity(), {0.04, 0.01}, center);
  const auto out = sample_ellipsoid(s, 100000, rng);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    mean += Eigen::Vector2d(out.points.point(i)[0], out.points.point(i)[1]);
  }
  mean /= 100000.0;
  EXPECT_NEAR(mean(0), center(0), 3 * 0.2 / std::sqrt(1e5));
  EXPECT_NEAR(mean(1), center(1), 3 * 0.1 / std::sqrt(1e5));
}

TEST(UniformHypercubeTest, Examples) {
  RandomStream rng(16);
  const auto one = uniform_hypercube_subset(ChebGrid(1), 3, 10, rng);
  for (double v : one.coords()) EXPECT_EQ(v, 0.0);

  const ChebGrid grid(7);
  const auto pts = uniform_hypercube_subset(grid, 2, 100000, rng);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    mx += pts.point(i)[0];
    my += pts.point(i)[1];
  }
  EXPECT_NEAR(mx / 1e5, 0.0, 0.02);
  EXPECT_NEAR(my / 1e5, 0.0, 0.02);
  for (double v : pts.coords()) EXPECT_EQ(grid.Nearest(v), v);
  EXPECT_THROW(uniform_hypercube_subset(grid, 2, 0, rng), std::invalid_argument);
}

}  // namespace
}  // namespace synthdb

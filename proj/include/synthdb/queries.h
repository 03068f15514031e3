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

// Gaussian-kernel smooth queries: evaluation on a dataset, random workloads,
// a finite-difference estimate of the K-norm, and error summaries.
//
// Relative error is only meaningful when query answers stay away from zero;
// random_queries draws nonnegative weights for that reason.

#ifndef SYNTHDB_QUERIES_H_
#define SYNTHDB_QUERIES_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "synthdb/core.h"
#include "synthdb/random.h"

namespace synthdb {

// f(x) = sum_j weights[j] exp(-||x - centers[j]||^2 / (2 sigma^2)).
struct GaussianKernelQuery {
  std::size_t dim = 0;
  std::vector<double> centers;  // J x dim, row-major
  std::vector<double> weights;
  double sigma = 1.0;
  bool norm_certified = false;  // sum |weights| <= 1

  std::size_t kernels() const { return weights.size(); }
  std::span<const double> center(std::size_t j) const { return {centers.data() + j * dim, dim}; }

  void Validate() const {
    if (dim == 0 || centers.size() != weights.size() * dim) {
      throw std::invalid_argument("GaussianKernelQuery: centers/weights shape mismatch");
    }
    if (!(sigma > 0.0)) throw std::invalid_argument("GaussianKernelQuery: sigma must be > 0");
  }

  double operator()(std::span<const double> x) const {
    const double inv = 1.0 / (2.0 * sigma * sigma);
    double s = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      const double* c = centers.data() + j * dim;
      double dist2 = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double diff = x[i] - c[i];
        dist2 += diff * diff;
      }
      s += weights[j] * std::exp(-dist2 * inv);
    }
    return s;
  }
};

inline double evaluate_query(const GaussianKernelQuery& q, const Dataset& db) {
  if (db.empty()) throw std::invalid_argument("evaluate_query: empty database");
  if (db.dim() != q.dim) throw std::invalid_argument("evaluate_query: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < db.size(); ++i) s += q(db.point(i));
  return s / static_cast<double>(db.size());
}

enum class AlphaSampling {
  kNormCertified,  // alpha ~ U[0,1]^J, rescaled so sum(alpha) <= 1
  kRaw,            // alpha ~ U[0,1]^J as drawn
};

inline std::vector<GaussianKernelQuery> random_queries(std::size_t count, std::size_t kernels,
                                                       std::size_t d, double sigma,
                                                       AlphaSampling sampling, RandomStream& rng) {
  if (count == 0) throw std::invalid_argument("random_queries: count must be >= 1");
  if (kernels == 0 || d == 0) throw std::invalid_argument("random_queries: J and d must be >= 1");
  std::vector<GaussianKernelQuery> out;
  out.reserve(count);
  for (std::size_t q = 0; q < count; ++q) {
    GaussianKernelQuery g;
    g.dim = d;
    g.sigma = sigma;
    g.weights.resize(kernels);
    g.centers.resize(kernels * d);
    for (double& a : g.weights) a = rng.Uniform();
    for (double& c : g.centers) c = 2.0 * rng.Uniform() - 1.0;
    if (sampling == AlphaSampling::kNormCertified) {
      double sum = 0.0;
      for (double a : g.weights) sum += a;
      if (sum > 1.0) {
        for (double& a : g.weights) a /= sum;
      }
      g.norm_certified = true;
    }
    out.push_back(std::move(g));
  }
  return out;
}

namespace internal {

// Second-order central stencils for the k-th derivative, offsets -3..3.
inline const std::array<double, 7>& CentralStencil(int order) {
  static const std::array<std::array<double, 7>, 7> kStencils = {{
      {0, 0, 0, 1, 0, 0, 0},
      {0, 0, -0.5, 0, 0.5, 0, 0},
      {0, 0, 1, -2, 1, 0, 0},
      {0, -0.5, 1, 0, -1, 0.5, 0},
      {0, 1, -4, 6, -4, 1, 0},
      {-0.5, 2, -2.5, 0, 2.5, -2, 0.5},
      {1, -6, 15, -20, 15, -6, 1},
  }};
  return kStencils[static_cast<std::size_t>(order)];
}

}  // namespace internal

inline constexpr int kMaxKNormOrder = 6;

// Lower estimate of ||f||_K = sup_{|k| <= K} sup_x |D^k f(x)| over
// [-1,1]^d. Derivatives are central differences with step h, taken along
// the first min(d,3) axes. The search visits a 20-per-axis lattice on those
// axes (remaining coordinates pinned to each kernel center in turn) and the
// kernel centers themselves.
inline double knorm_estimate(const GaussianKernelQuery& q, int K, double h = 1e-2) {
  if (K < 0 || K > kMaxKNormOrder) throw std::invalid_argument("knorm_estimate: K must lie in [0,6]");
  if (!(h > 0.0)) throw std::invalid_argument("knorm_estimate: h must be > 0");
  q.Validate();
  const std::size_t d = q.dim;
  const std::size_t active = std::min<std::size_t>(d, 3);
  const std::size_t J = q.kernels();
  const double inv = 1.0 / (2.0 * q.sigma * q.sigma);

  // Multi-indices over the active axes with total order <= K.
  std::vector<std::array<int, 3>> orders;
  for (int a = 0; a <= K; ++a) {
    for (int b = 0; b <= (active > 1 ? K - a : 0); ++b) {
      for (int c = 0; c <= (active > 2 ? K - a - b : 0); ++c) orders.push_back({a, b, c});
    }
  }

  // f is a sum of separable terms, so the tensor-product stencil reduces to
  // per-axis 1-D differences of each kernel factor.
  std::vector<double> fd(J * active * (K + 1));
  std::vector<double> rest(J);
  auto value_at = [&](std::span<const double> x) {
    for (std::size_t j = 0; j < J; ++j) {
      auto c = q.center(j);
      double r = 0.0;
      for (std::size_t i = active; i < d; ++i) r += (x[i] - c[i]) * (x[i] - c[i]);
      rest[j] = q.weights[j] * std::exp(-r * inv);
      for (std::size_t i = 0; i < active; ++i) {
        for (int o = 0; o <= K; ++o) {
          const auto& st = internal::CentralStencil(o);
          double s = 0.0;
          for (int m = -3; m <= 3; ++m) {
            const double coef = st[static_cast<std::size_t>(m + 3)];
            if (coef == 0.0) continue;
            const double diff = x[i] + m * h - c[i];
            s += coef * std::exp(-diff * diff * inv);
          }
          fd[(j * active + i) * (K + 1) + o] = s / std::pow(h, o);
        }
      }
    }
    double best = 0.0;
    for (const auto& k : orders) {
      double s = 0.0;
      for (std::size_t j = 0; j < J; ++j) {
        double term = rest[j];
        for (std::size_t i = 0; i < active; ++i) term *= fd[(j * active + i) * (K + 1) + k[i]];
        s += term;
      }
      best = std::max(best, std::abs(s));
    }
    return best;
  };

  constexpr int kLattice = 20;
  std::vector<double> axis(kLattice);
  for (int i = 0; i < kLattice; ++i) axis[i] = -1.0 + 2.0 * i / (kLattice - 1);

  double best = 0.0;
  std::vector<double> x(d);
  const std::size_t bases = d > active ? J : 1;
  for (std::size_t base = 0; base < bases; ++base) {
    if (d > active) {
      auto c = q.center(base);
      std::copy(c.begin(), c.end(), x.begin());
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < active; ++i) total *= kLattice;
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      for (std::size_t i = 0; i < active; ++i) {
        x[i] = axis[rem % kLattice];
        rem /= kLattice;
      }
      best = std::max(best, value_at(x));
    }
  }
  for (std::size_t j = 0; j < J; ++j) best = std::max(best, value_at(q.center(j)));
  return best;
}

inline constexpr double kRelativeErrorFloor = 1e-12;

struct ErrorReport {
  std::vector<double> absolute;
  std::vector<std::optional<double>> relative;  // empty when |true| < 1e-12
  double worst_abs = 0.0;
  double worst_rel = 0.0;
  std::size_t query_count = 0;
  std::size_t excluded_relative = 0;

  // Median over the defined relative errors; 0 when none are defined.
  double MedianRelative() const {
    std::vector<double> v;
    for (const auto& r : relative) {
      if (r) v.push_back(*r);
    }
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
  }
};

inline ErrorReport error_metrics(std::span<const double> truth, std::span<const double> synth) {
  if (truth.size() != synth.size()) throw std::invalid_argument("error_metrics: length mismatch");
  ErrorReport rep;
  rep.query_count = truth.size();
  rep.absolute.resize(truth.size());
  rep.relative.resize(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double a = std::abs(truth[i] - synth[i]);
    rep.absolute[i] = a;
    rep.worst_abs = std::max(rep.worst_abs, a);
    if (std::abs(truth[i]) < kRelativeErrorFloor) {
      ++rep.excluded_relative;
      continue;
    }
    const double r = a / std::abs(truth[i]);
    rep.relative[i] = r;
    rep.worst_rel = std::max(rep.worst_rel, r);
  }
  return rep;
}

namespace internal {

// Distinct points of a database with multiplicities. Synthetic databases
// repeat support points heavily, so workloads are evaluated on this form.
struct WeightedPoints {
  std::size_t dim = 0;
  std::vector<double> coords;
  std::vector<double> counts;
  double total = 0.0;
};

inline WeightedPoints Collapse(const Dataset& db) {
  const std::size_t d = db.dim();
  std::vector<std::size_t> order(db.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto less = [&](std::size_t a, std::size_t b) {
    auto pa = db.point(a);
    auto pb = db.point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  std::stable_sort(order.begin(), order.end(), less);
  WeightedPoints out;
  out.dim = d;
  out.total = static_cast<double>(db.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto p = db.point(order[k]);
    if (k > 0 && !less(order[k - 1], order[k])) {
      out.counts.back() += 1.0;
      continue;
    }
    out.coords.insert(out.coords.end(), p.begin(), p.end());
    out.counts.push_back(1.0);
  }
  return out;
}

}  // namespace internal

inline std::vector<double> EvaluateWorkload(const std::vector<GaussianKernelQuery>& queries,
                                            const Dataset& db) {
  if (db.empty()) throw std::invalid_argument("EvaluateWorkload: empty database");
  const auto w = internal::Collapse(db);
  std::vector<double> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (queries[i].dim != w.dim) throw std::invalid_argument("EvaluateWorkload: dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < w.counts.size(); ++j) {
      s += w.counts[j] * queries[i](std::span<const double>(w.coords.data() + j * w.dim, w.dim));
    }
    out[i] = s / w.total;
  }
  return out;
}

}  // namespace synthdb

#endif  // SYNTHDB_QUERIES_H_

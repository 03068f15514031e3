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

#ifndef SYNTHDB_NOISE_H_
#define SYNTHDB_NOISE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthdb/basis.h"
#include "synthdb/core.h"
#include "synthdb/random.h"

namespace synthdb {

enum class NoiseKind { kLaplace, kGaussian };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kLaplace;
  double scale = 1.0;
  std::string stream = "moments";
};

// Laplace scale for the released moments. basis_count is t^d for the full
// basis and R for a truncated one. strict_sensitivity doubles the scale to
// account for the 2/n per-moment sensitivity.
inline double moment_noise_scale(PrivacyMode mode, std::uint64_t basis_count, std::uint64_t n,
                                 double epsilon, double delta = 0.0,
                                 bool strict_sensitivity = false) {
  if (basis_count == 0) throw std::invalid_argument("moment_noise_scale: basis_count must be >= 1");
  if (n == 0) throw std::invalid_argument("moment_noise_scale: n must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("moment_noise_scale: epsilon must be > 0");
  const double bc = static_cast<double>(basis_count);
  const double denom = static_cast<double>(n) * epsilon;
  double scale;
  if (mode == PrivacyMode::kPure) {
    scale = bc / denom;
  } else {
    if (!(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("moment_noise_scale: approx mode needs delta in (0,1)");
    }
    scale = std::sqrt(bc * std::log(1.0 / delta)) / denom;
  }
  return strict_sensitivity ? 2.0 * scale : scale;
}

// Inverse CDF with u in (-0.5, 0.5).
inline double laplace_from_uniform(double u, double scale) {
  if (u == 0.0) return 0.0;
  const double sign = u > 0.0 ? 1.0 : -1.0;
  return sign * scale * std::log(1.0 - 2.0 * std::abs(u));
}

inline double laplace_sample(double scale, RandomStream& rng) {
  if (!(scale > 0.0)) throw std::invalid_argument("laplace_sample: scale must be > 0");
  double u;
  do {
    u = rng.Uniform() - 0.5;
  } while (u == -0.5);
  return laplace_from_uniform(u, scale);
}

inline double gaussian_sample(double stddev, RandomStream& rng) {
  return stddev * rng.Gaussian();
}

inline double SampleNoise(NoiseKind kind, double scale, RandomStream& rng) {
  return kind == NoiseKind::kLaplace ? laplace_sample(scale, rng) : gaussian_sample(scale, rng);
}

// The only place raw-data moments meet noise. Everything downstream is
// post-processing of the returned vector.
inline MomentVector privatize_moments(const MomentVector& b, const NoiseSpec& spec,
                                      RandomStream& rng) {
  if (b.kind != MomentKind::kTrue) {
    throw std::invalid_argument("privatize_moments: expects true moments");
  }
  if (!(spec.scale > 0.0)) throw std::invalid_argument("privatize_moments: scale must be > 0");
  MomentVector out{b.values, MomentKind::kNoisy};
  for (double& v : out.values) v += SampleNoise(spec.kind, spec.scale, rng);
  return out;
}

using ScalarRelease = std::function<double(const Dataset&, RandomStream&)>;

// Empirical privacy-loss estimate for a one-coordinate release: histogram
// both output distributions on a shared equal-width binning and return the
// largest log-ratio. Add-one smoothing keeps empty bins finite. Bins whose
// pooled count is below min_bin_count are skipped: a handful of tail samples
// says nothing about the density ratio and would dominate the maximum. Test
// tool; not part of the release path.
inline double epsilon_audit(const ScalarRelease& release, const Dataset& d,
                            const Dataset& d_neighbor, std::uint64_t samples, std::size_t bins,
                            const StreamFactory& streams, double min_bin_count = 1000.0) {
  if (samples < 10000) throw std::invalid_argument("epsilon_audit: need at least 1e4 samples");
  if (bins == 0) throw std::invalid_argument("epsilon_audit: bins must be >= 1");
  if (d.size() != d_neighbor.size() || d.dim() != d_neighbor.dim()) {
    throw std::invalid_argument("epsilon_audit: neighbors must have equal shape");
  }
  std::size_t differing = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto p = d.point(i);
    auto q = d_neighbor.point(i);
    if (!std::equal(p.begin(), p.end(), q.begin())) ++differing;
  }
  if (differing > 1) throw std::invalid_argument("epsilon_audit: datasets differ in more than one point");

  RandomStream rng_a = streams.Stream("audit.d");
  RandomStream rng_b = streams.Stream("audit.neighbor");
  std::vector<double> a(samples);
  std::vector<double> b(samples);
  for (auto& v : a) v = release(d, rng_a);
  for (auto& v : b) v = release(d_neighbor, rng_b);

  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  const double lo = std::min(*amin, *bmin);
  const double hi = std::max(*amax, *bmax);
  const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  auto bin_of = [&](double x) {
    auto k = static_cast<std::size_t>((x - lo) / width);
    return std::min(k, bins - 1);
  };
  std::vector<double> ca(bins, 1.0);
  std::vector<double> cb(bins, 1.0);
  for (double x : a) ca[bin_of(x)] += 1.0;
  for (double x : b) cb[bin_of(x)] += 1.0;
  const double ta = static_cast<double>(samples + bins);
  const double tb = ta;
  double worst = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    if (ca[k] + cb[k] - 2.0 < min_bin_count) continue;
    worst = std::max(worst, std::log((ca[k] / ta) / (cb[k] / tb)));
  }
  return worst;
}

}  // namespace synthdb

#endif  // SYNTHDB_NOISE_H_

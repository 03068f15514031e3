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

// Domain types shared by every stage of the release pipeline: datasets in
// [-1,1]^d, the Chebyshev-node grid, the rounding lattice, privacy budgets and
// the size parameters derived from (n, d, K, delta).

#ifndef SYNTHDB_CORE_H_
#define SYNTHDB_CORE_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace synthdb {

enum class Stage { kRaw, kNormalized, kDiscretized };

inline const char* StageName(Stage s) {
  switch (s) {
    case Stage::kRaw:
      return "raw";
    case Stage::kNormalized:
      return "normalized";
    case Stage::kDiscretized:
      return "discretized";
  }
  return "unknown";
}

struct AttributeRange {
  double lo = -1.0;
  double hi = 1.0;
};

// n points of dimension d stored row-major.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::size_t dim, std::vector<double> coords, Stage stage = Stage::kRaw,
          std::vector<AttributeRange> ranges = {})
      : dim_(dim), coords_(std::move(coords)), stage_(stage),
        ranges_(std::move(ranges)) {
    if (dim_ == 0) throw std::invalid_argument("Dataset: dimension must be >= 1");
    if (coords_.size() % dim_ != 0) {
      throw std::invalid_argument(
          "Dataset: coordinate count is not a multiple of the dimension");
    }
    if (stage_ != Stage::kRaw) {
      for (double x : coords_) {
        if (!(x >= -1.0 && x <= 1.0)) {
          throw std::invalid_argument(
              std::string("Dataset: coordinate outside [-1,1] in ") +
              StageName(stage_) + " dataset");
        }
      }
    }
  }

  static Dataset FromRows(const std::vector<std::vector<double>>& rows,
                          Stage stage = Stage::kRaw) {
    if (rows.empty()) throw std::invalid_argument("Dataset: no rows");
    const std::size_t d = rows.front().size();
    std::vector<double> coords;
    coords.reserve(rows.size() * d);
    for (const auto& r : rows) {
      if (r.size() != d) throw std::invalid_argument("Dataset: ragged rows");
      coords.insert(coords.end(), r.begin(), r.end());
    }
    return Dataset(d, std::move(coords), stage);
  }

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return coords_.empty(); }
  Stage stage() const { return stage_; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const { return coords_; }

  // Attribute ranges used for normalization, if any were applied.
  const std::vector<AttributeRange>& ranges() const { return ranges_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  Stage stage_ = Stage::kRaw;
  std::vector<AttributeRange> ranges_;
};

// Chebyshev-node grid along one axis: a_k = (2k + 1 - N) / N.
class ChebGrid {
 public:
  explicit ChebGrid(std::uint64_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("ChebGrid: N must be >= 1");
    values_.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) values_.push_back(Value(k));
  }

  std::uint64_t size() const { return n_; }
  const std::vector<double>& values() const { return values_; }

  double Value(std::uint64_t k) const {
    const auto num = static_cast<std::int64_t>(2 * k + 1) - static_cast<std::int64_t>(n_);
    return static_cast<double>(num) / static_cast<double>(n_);
  }

  // Index of the nearest node; ties go to the larger node.
  std::uint64_t NearestIndex(double z) const {
    const double pos = (z * static_cast<double>(n_) + static_cast<double>(n_) - 1.0) / 2.0;
    if (!(pos > 0.0)) return 0;
    if (pos >= static_cast<double>(n_ - 1)) return n_ - 1;
    const auto lower = static_cast<std::uint64_t>(std::floor(pos));
    if (lower + 1 >= n_) return n_ - 1;
    const double dl = std::abs(z - values_[lower]);
    const double du = std::abs(z - values_[lower + 1]);
    return du <= dl ? lower + 1 : lower;
  }

  double Nearest(double z) const { return values_[NearestIndex(z)]; }

 private:
  std::uint64_t n_;
  std::vector<double> values_;
};

// Rounding lattice {i/L : i = -L..L}.
class Lattice {
 public:
  explicit Lattice(std::uint64_t l) : l_(l) {
    if (l == 0) throw std::invalid_argument("Lattice: L must be >= 1");
  }

  std::uint64_t resolution() const { return l_; }
  double step() const { return 1.0 / static_cast<double>(l_); }

  // Integer coordinate of the nearest lattice point after clamping to
  // [-1,1]; ties go to the larger value.
  std::int64_t RoundIndex(double v) const {
    const double c = std::clamp(v, -1.0, 1.0);
    const auto li = static_cast<std::int64_t>(l_);
    const auto i = static_cast<std::int64_t>(std::floor(c * static_cast<double>(l_) + 0.5));
    return std::clamp<std::int64_t>(i, -li, li);
  }

  double Round(double v) const { return FromIndex(RoundIndex(v)); }

  double FromIndex(std::int64_t i) const {
    return static_cast<double>(i) / static_cast<double>(l_);
  }

  // Exact membership: x must equal FromIndex(round(x L)) bit for bit.
  std::optional<std::int64_t> IndexOf(double x) const {
    if (!std::isfinite(x)) return std::nullopt;
    const double scaled = std::round(x * static_cast<double>(l_));
    if (std::abs(scaled) > static_cast<double>(l_)) return std::nullopt;
    const auto i = static_cast<std::int64_t>(scaled);
    if (FromIndex(i) != x) return std::nullopt;
    return i;
  }

  bool Contains(double x) const { return IndexOf(x).has_value(); }

 private:
  std::uint64_t l_;
};

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;         // 0 selects pure differential privacy
  double pca_fraction = 0.5;  // share spent on the subset stage when it runs

  void Validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw std::invalid_argument("PrivacyBudget: epsilon must be > 0");
    }
    if (!(delta >= 0.0 && delta < 1.0)) {
      throw std::invalid_argument("PrivacyBudget: delta must lie in [0,1)");
    }
    if (!(pca_fraction >= 0.0 && pca_fraction < 1.0)) {
      throw std::invalid_argument("PrivacyBudget: pca_fraction must lie in [0,1)");
    }
  }

  bool pure() const { return delta == 0.0; }

  PrivacyBudget Scaled(double fraction) const {
    PrivacyBudget b = *this;
    b.epsilon = epsilon * fraction;
    b.delta = delta * fraction;
    return b;
  }
};

enum class PrivacyMode { kPure, kApprox };

inline const char* ModeName(PrivacyMode m) {
  return m == PrivacyMode::kPure ? "pure" : "approx";
}

struct AcceleratedParams {
  std::uint64_t C = 0;  // grid-subset size
  std::uint64_t R = 0;  // basis-subset size
};

struct MechanismParams {
  std::uint64_t t = 0;  // per-axis basis degree bound
  std::uint64_t N = 0;  // grid nodes per axis
  std::uint64_t m = 0;  // synthetic database size actually drawn
  std::uint64_t m_formula = 0;
  std::uint64_t L = 0;  // rounding lattice resolution
  PrivacyMode mode = PrivacyMode::kPure;
  std::optional<AcceleratedParams> accelerated;
};

// ceil() that first snaps values within 1e-9 (relative) of an integer.
inline std::uint64_t SnappedCeil(double x) {
  if (!std::isfinite(x) || x > 9.0e18) {
    throw std::overflow_error("SnappedCeil: value does not fit in 64 bits");
  }
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<std::uint64_t>(std::max(r, 0.0));
  }
  return static_cast<std::uint64_t>(std::max(std::ceil(x), 0.0));
}

inline void CheckShape(std::uint64_t n, std::uint64_t d, std::uint64_t k) {
  if (n < 2) throw std::invalid_argument("derive_params: n must be >= 2");
  if (d < 1) throw std::invalid_argument("derive_params: d must be >= 1");
  if (k < 1) throw std::invalid_argument("derive_params: K must be >= 1");
}

inline MechanismParams derive_params_pure(std::uint64_t n, std::uint64_t d, std::uint64_t k) {
  CheckShape(n, d, k);
  const double nn = static_cast<double>(n);
  const double denom = static_cast<double>(2 * d + k);
  MechanismParams p;
  p.mode = PrivacyMode::kPure;
  p.t = SnappedCeil(std::pow(nn, 1.0 / denom));
  p.N = SnappedCeil(std::pow(nn, static_cast<double>(k) / denom));
  p.m_formula = SnappedCeil(std::pow(nn, 1.0 + static_cast<double>(k + 1) / denom));
  p.m = p.m_formula;
  p.L = SnappedCeil(std::pow(nn, static_cast<double>(d + k) / denom));
  return p;
}

// Natural logarithm throughout.
inline MechanismParams derive_params_approx(std::uint64_t n, std::uint64_t d, std::uint64_t k,
                                            double delta) {
  CheckShape(n, d, k);
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("derive_params_approx: delta must lie in (0,1)");
  }
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  const double kk = static_cast<double>(k);
  const double denom = 3.0 * dd + 2.0 * kk;
  const double log_inv = std::log(1.0 / delta);
  auto term = [&](double n_exp, double log_exp) {
    return std::pow(nn, n_exp / denom) * std::pow(log_inv, -log_exp / denom);
  };
  MechanismParams p;
  p.mode = PrivacyMode::kApprox;
  p.t = SnappedCeil(term(2.0, 1.0));
  p.N = SnappedCeil(term(2.0 * kk, kk));
  p.m_formula = SnappedCeil(term(4.0 * dd + 4.0 * kk + 2.0, 2.0 * dd + 2.0 * kk + 1.0));
  p.m = p.m_formula;
  p.L = SnappedCeil(term(2.0 * dd + 2.0 * kk, dd + kk));
  return p;
}

// Data-dependent ranges; callers must warn that these are not covered by
// the privacy budget.
inline std::vector<AttributeRange> ObservedRanges(const Dataset& raw) {
  std::vector<AttributeRange> out(raw.dim(), {std::numeric_limits<double>::infinity(),
                                              -std::numeric_limits<double>::infinity()});
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto p = raw.point(i);
    for (std::size_t j = 0; j < raw.dim(); ++j) {
      out[j].lo = std::min(out[j].lo, p[j]);
      out[j].hi = std::max(out[j].hi, p[j]);
    }
  }
  for (auto& r : out) {
    if (!(r.hi > r.lo)) r.hi = r.lo + 1.0;  // constant column maps to -1
  }
  return out;
}

// x' = 2 (x - lo) / (hi - lo) - 1, clamped to [-1, 1].
inline Dataset normalize_dataset(const Dataset& raw, const std::vector<AttributeRange>& ranges) {
  if (ranges.size() != raw.dim()) {
    throw std::invalid_argument("normalize_dataset: need one range per attribute");
  }
  for (const auto& r : ranges) {
    if (!(r.hi > r.lo)) throw std::invalid_argument("normalize_dataset: degenerate range hi <= lo");
  }
  std::vector<double> out(raw.coords().size());
  const std::size_t d = raw.dim();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& r = ranges[i % d];
    const double x = 2.0 * (raw.coords()[i] - r.lo) / (r.hi - r.lo) - 1.0;
    out[i] = std::clamp(x, -1.0, 1.0);
  }
  return Dataset(d, std::move(out), Stage::kNormalized, ranges);
}

inline Dataset discretize(const Dataset& data, const ChebGrid& grid) {
  if (data.stage() == Stage::kRaw) {
    throw std::invalid_argument("discretize: dataset must be normalized first");
  }
  std::vector<double> out(data.coords().size());
  std::transform(data.coords().begin(), data.coords().end(), out.begin(),
                 [&](double z) { return grid.Nearest(z); });
  return Dataset(data.dim(), std::move(out), Stage::kDiscretized, data.ranges());
}

// Overflow-checked d-th power, used for t^d and N^d.
inline std::uint64_t CheckedPow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r *= base;
  }
  return r;
}

}  // namespace synthdb

#endif  // SYNTHDB_CORE_H_

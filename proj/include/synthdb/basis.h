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

// Tensor-product Chebyshev basis: enumeration, evaluation, moments and the
// design matrix over a support of grid points.

#ifndef SYNTHDB_BASIS_H_
#define SYNTHDB_BASIS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "synthdb/core.h"

namespace synthdb {

using MultiIndex = std::vector<std::uint32_t>;

struct BasisSet {
  std::uint64_t t = 0;
  std::size_t d = 0;
  bool truncated = false;
  std::vector<MultiIndex> indices;

  std::size_t size() const { return indices.size(); }
};

enum class MomentKind { kTrue, kNoisy, kRounded, kSynthetic };

struct MomentVector {
  std::vector<double> values;
  MomentKind kind = MomentKind::kTrue;

  std::size_t size() const { return values.size(); }
};

// T_k(x) = cos(k arccos x) by the three-term recurrence.
inline double ChebT(std::uint32_t k, double x) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (std::uint32_t i = 1; i < k; ++i) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

inline double cheb_eval(const MultiIndex& r, std::span<const double> x) {
  if (r.size() != x.size()) throw std::invalid_argument("cheb_eval: dimension mismatch");
  double v = 1.0;
  for (std::size_t i = 0; i < r.size(); ++i) v *= ChebT(r[i], x[i]);
  return v;
}

namespace internal {

// Fills table[j * t + k] = T_k(x_j) for k < t.
inline void ChebTable(std::span<const double> x, std::uint64_t t, std::vector<double>& table) {
  table.resize(x.size() * t);
  for (std::size_t j = 0; j < x.size(); ++j) {
    double* row = table.data() + j * t;
    row[0] = 1.0;
    if (t > 1) row[1] = x[j];
    for (std::uint64_t k = 2; k < t; ++k) row[k] = 2.0 * x[j] * row[k - 1] - row[k - 2];
  }
}

inline double TableProduct(const std::vector<double>& table, std::uint64_t t,
                           const MultiIndex& r) {
  double v = 1.0;
  for (std::size_t j = 0; j < r.size(); ++j) v *= table[j * t + r[j]];
  return v;
}

// Calls fn on every multi-index in {0..t-1}^d with |r|_1 == total, in
// lexicographic order. Returns false once fn asks to stop.
inline bool ForEachWithDegree(std::uint64_t t, std::size_t d, std::uint64_t total,
                              const std::function<bool(const MultiIndex&)>& fn) {
  MultiIndex r(d, 0);
  std::function<bool(std::size_t, std::uint64_t)> rec = [&](std::size_t pos,
                                                            std::uint64_t remaining) {
    if (pos + 1 == d) {
      if (remaining > t - 1) return true;
      r[pos] = static_cast<std::uint32_t>(remaining);
      return fn(r);
    }
    // Remaining positions can absorb at most (d - pos - 1) (t - 1).
    const std::uint64_t rest_cap = (d - pos - 1) * (t - 1);
    const std::uint64_t lo = remaining > rest_cap ? remaining - rest_cap : 0;
    const std::uint64_t hi = std::min<std::uint64_t>(remaining, t - 1);
    for (std::uint64_t v = lo; v <= hi; ++v) {
      r[pos] = static_cast<std::uint32_t>(v);
      if (!rec(pos + 1, remaining - v)) return false;
    }
    return true;
  };
  return rec(0, total);
}

}  // namespace internal

// Full basis in row-major order when R is absent; otherwise the first R
// multi-indices ordered by total degree, ties lexicographic.
inline BasisSet enumerate_basis(std::uint64_t t, std::size_t d,
                                std::optional<std::uint64_t> R = std::nullopt) {
  if (t == 0 || d == 0) throw std::invalid_argument("enumerate_basis: t and d must be >= 1");
  const std::uint64_t full = CheckedPow(t, d);
  BasisSet b;
  b.t = t;
  b.d = d;
  if (!R) {
    if (full > (std::uint64_t{1} << 26)) {
      throw std::invalid_argument("enumerate_basis: t^d too large for a full basis");
    }
    b.indices.reserve(full);
    MultiIndex r(d, 0);
    for (std::uint64_t i = 0; i < full; ++i) {
      b.indices.push_back(r);
      for (std::size_t j = d; j-- > 0;) {
        if (++r[j] < t) break;
        r[j] = 0;
      }
    }
    return b;
  }
  if (*R == 0) throw std::invalid_argument("enumerate_basis: R must be >= 1");
  if (*R > full) throw std::invalid_argument("enumerate_basis: R exceeds t^d");
  b.truncated = true;
  b.indices.reserve(*R);
  for (std::uint64_t deg = 0; b.indices.size() < *R; ++deg) {
    internal::ForEachWithDegree(t, d, deg, [&](const MultiIndex& r) {
      b.indices.push_back(r);
      return b.indices.size() < *R;
    });
  }
  return b;
}

// Per-basis-function averages over the dataset, summed in dataset order.
inline MomentVector compute_moments(const Dataset& data, const BasisSet& basis) {
  if (data.empty()) throw std::invalid_argument("compute_moments: empty dataset");
  if (data.dim() != basis.d) throw std::invalid_argument("compute_moments: dimension mismatch");
  std::vector<double> sums(basis.size(), 0.0);
  std::vector<double> table;
  for (std::size_t i = 0; i < data.size(); ++i) {
    internal::ChebTable(data.point(i), basis.t, table);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      sums[j] += internal::TableProduct(table, basis.t, basis.indices[j]);
    }
  }
  const double n = static_cast<double>(data.size());
  for (double& s : sums) s /= n;
  return {std::move(sums), MomentKind::kTrue};
}

inline double round_to_lattice(double v, const Lattice& lat) { return lat.Round(v); }

inline MomentVector RoundMoments(const MomentVector& b, const Lattice& lat) {
  MomentVector out{b.values, MomentKind::kRounded};
  for (double& v : out.values) v = lat.Round(v);
  return out;
}

// Rows follow the basis order, columns the support order.
struct DesignMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool rounded = false;
  std::vector<double> entries;  // row-major

  double operator()(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return entries[r * cols + c]; }

  std::span<const double> row(std::size_t r) const { return {entries.data() + r * cols, cols}; }

  DesignMatrix Rounded(const Lattice& lat) const {
    DesignMatrix out = *this;
    out.rounded = true;
    for (double& v : out.entries) v = lat.Round(v);
    return out;
  }

  // W u for a weight vector over the columns.
  std::vector<double> Apply(std::span<const double> u) const {
    if (u.size() != cols) throw std::invalid_argument("DesignMatrix::Apply: size mismatch");
    std::vector<double> out(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < cols; ++c) s += entries[r * cols + c] * u[c];
      out[r] = s;
    }
    return out;
  }
};

inline DesignMatrix build_design_matrix(const BasisSet& basis, const Dataset& support) {
  if (support.dim() != basis.d) {
    throw std::invalid_argument("build_design_matrix: dimension mismatch");
  }
  DesignMatrix w;
  w.rows = basis.size();
  w.cols = support.size();
  w.entries.assign(w.rows * w.cols, 0.0);
  std::vector<double> table;
  for (std::size_t k = 0; k < support.size(); ++k) {
    internal::ChebTable(support.point(k), basis.t, table);
    for (std::size_t r = 0; r < basis.size(); ++r) {
      w(r, k) = internal::TableProduct(table, basis.t, basis.indices[r]);
    }
  }
  return w;
}

}  // namespace synthdb

#endif  // SYNTHDB_BASIS_H_

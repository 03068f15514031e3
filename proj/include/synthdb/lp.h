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

// L1 fit over the probability simplex:
//
//   min_u ||W u - b||_1   s.t.  u >= 0, sum(u) = 1
//
// solved as the equality-form LP over (u, v, w) with W u + v - w = b by a
// dense revised simplex method.

#ifndef SYNTHDB_LP_H_
#define SYNTHDB_LP_H_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "synthdb/basis.h"
#include "synthdb/core.h"

namespace synthdb {

// Integer standard form  max/min c^T x  s.t.  A x = b, x >= 0  with
//   A = [[L W', L I, -L I], [1^T, 0, 0]],  b = [L b'; 1],  c = [0; 1; 1].
// The objective is minimized.
struct StandardLP {
  std::size_t rows = 0;  // basis_count + 1
  std::size_t cols = 0;  // support_size + 2 basis_count
  std::vector<std::int64_t> A;  // row-major
  std::vector<std::int64_t> b;
  std::vector<std::int64_t> c;

  std::int64_t at(std::size_t r, std::size_t col) const { return A[r * cols + col]; }

  // Plain-text dump: "rows cols", then A row by row, then b, then c.
  void Dump(std::ostream& os) const {
    os << rows << ' ' << cols << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < cols; ++j) os << (j ? " " : "") << at(r, j);
      os << '\n';
    }
    for (std::size_t r = 0; r < rows; ++r) os << (r ? " " : "") << b[r];
    os << '\n';
    for (std::size_t j = 0; j < cols; ++j) os << (j ? " " : "") << c[j];
    os << '\n';
  }
};

inline StandardLP to_standard_form(const DesignMatrix& w_rounded,
                                   std::span<const double> b_rounded, const Lattice& lat) {
  if (b_rounded.size() != w_rounded.rows) {
    throw std::invalid_argument("to_standard_form: moment/design row mismatch");
  }
  const std::size_t nb = w_rounded.rows;
  const std::size_t ns = w_rounded.cols;
  const auto l = static_cast<std::int64_t>(lat.resolution());
  StandardLP lp;
  lp.rows = nb + 1;
  lp.cols = ns + 2 * nb;
  lp.A.assign(lp.rows * lp.cols, 0);
  lp.b.assign(lp.rows, 0);
  lp.c.assign(lp.cols, 0);
  for (std::size_t r = 0; r < nb; ++r) {
    for (std::size_t k = 0; k < ns; ++k) {
      const auto i = lat.IndexOf(w_rounded(r, k));
      if (!i) throw std::invalid_argument("to_standard_form: design entry not on the lattice");
      lp.A[r * lp.cols + k] = *i;
    }
    lp.A[r * lp.cols + ns + r] = l;
    lp.A[r * lp.cols + ns + nb + r] = -l;
    const auto bi = lat.IndexOf(b_rounded[r]);
    if (!bi) throw std::invalid_argument("to_standard_form: moment not on the lattice");
    lp.b[r] = *bi;
  }
  for (std::size_t k = 0; k < ns; ++k) lp.A[nb * lp.cols + k] = 1;
  lp.b[nb] = 1;
  for (std::size_t j = ns; j < lp.cols; ++j) lp.c[j] = 1;
  return lp;
}

struct ProbabilityVector {
  Dataset support;
  std::vector<double> weights;

  void Validate() const {
    if (weights.size() != support.size()) {
      throw std::invalid_argument("ProbabilityVector: support/weight size mismatch");
    }
    double s = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("ProbabilityVector: negative weight");
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("ProbabilityVector: weights do not sum to 1");
  }
};

struct L1FitOptions {
  std::size_t max_iterations = 0;  // 0 picks 50 (rows + columns)
  std::size_t refactor_every = 64;
  double cost_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  double dual_tolerance = 1e-7;
};

struct L1FitResult {
  std::vector<double> weights;
  double objective = 0.0;
  bool optimal = false;
  bool degraded = false;  // iteration limit or numerical trouble
  std::size_t iterations = 0;
  double dual_infeasibility = 0.0;  // max violation of reduced-cost sign
};

namespace internal {

// Revised simplex specialised to the L1-fit structure. Column layout:
//   [0, C)            u_k      a = [W_k; 1], cost 0
//   [C, C+R)          v_r      a = +e_r,     cost 1
//   [C+R, C+2R)       w_r      a = -e_r,     cost 1
//   C+2R              uniform  a = [W 1/C; 1], cost 0
// The last column is the uniform distribution over the support. It lets
// the method start from u = uniform with slacks absorbing the residual,
// which is a basic feasible point, so no phase one is needed.
class L1Simplex {
 public:
  L1Simplex(const DesignMatrix& w, std::span<const double> b, const L1FitOptions& opt)
      : w_(w), b_(b.begin(), b.end()), opt_(opt), nr_(w.rows), nc_(w.cols), m_(nr_ + 1) {
    uniform_col_.assign(m_, 0.0);
    const double inv = 1.0 / static_cast<double>(nc_);
    for (std::size_t r = 0; r < nr_; ++r) {
      double s = 0.0;
      for (double x : w_.row(r)) s += x;
      uniform_col_[r] = s * inv;
    }
    uniform_col_[nr_] = 1.0;
  }

  L1FitResult Solve() {
    InitBasis();
    const std::size_t max_iter =
        opt_.max_iterations ? opt_.max_iterations : 50 * (m_ + NumVars());
    L1FitResult res;
    std::size_t degenerate_run = 0;
    bool bland = false;
    std::size_t since_refactor = 0;
    std::vector<double> y(m_);
    std::vector<double> dir(m_);
    std::vector<double> col(m_);
    bool done = false;
    while (res.iterations < max_iter) {
      ComputeDuals(y);
      const std::size_t enter = Price(y, bland);
      if (enter == kNone) {
        done = true;
        break;
      }
      Column(enter, col);
      MultiplyBinv(col, dir);
      std::size_t leave = kNone;
      double theta = std::numeric_limits<double>::infinity();
      double best_pivot = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (dir[i] <= opt_.pivot_tolerance) continue;
        const double ratio = std::max(xb_[i], 0.0) / dir[i];
        const bool better =
            leave == kNone || ratio < theta - 1e-12 ||
            (ratio <= theta + 1e-12 &&
             (bland ? basis_[i] < basis_[leave] : dir[i] > best_pivot));
        if (better) {
          leave = i;
          theta = ratio;
          best_pivot = dir[i];
        }
      }
      if (leave == kNone) {
        // The objective is bounded below by zero, so this only happens
        // when the basis inverse has drifted.
        Refactor();
        if (++unbounded_retries_ > 3) break;
        continue;
      }
      Pivot(leave, enter, dir, theta);
      ++res.iterations;
      if (theta <= 1e-12) {
        if (++degenerate_run > 2 * m_ + 10) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      if (++since_refactor >= opt_.refactor_every) {
        Refactor();
        since_refactor = 0;
      }
    }
    Refactor();
    ComputeDuals(y);
    res.dual_infeasibility = DualInfeasibility(y);
    res.optimal = done && res.dual_infeasibility <= opt_.dual_tolerance;
    res.degraded = !res.optimal;
    res.weights = ExtractWeights(res.degraded);
    res.objective = Objective(res.weights);
    return res;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t NumVars() const { return nc_ + 2 * nr_ + 1; }
  std::size_t UniformIndex() const { return nc_ + 2 * nr_; }

  double Cost(std::size_t j) const { return (j >= nc_ && j < nc_ + 2 * nr_) ? 1.0 : 0.0; }

  void Column(std::size_t j, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (j < nc_) {
      for (std::size_t r = 0; r < nr_; ++r) out[r] = w_(r, j);
      out[nr_] = 1.0;
    } else if (j < nc_ + nr_) {
      out[j - nc_] = 1.0;
    } else if (j < nc_ + 2 * nr_) {
      out[j - nc_ - nr_] = -1.0;
    } else {
      out = uniform_col_;
    }
  }

  void InitBasis() {
    basis_.assign(m_, kNone);
    in_basis_.assign(NumVars(), false);
    basis_[nr_] = UniformIndex();
    for (std::size_t r = 0; r < nr_; ++r) {
      const double residual = b_[r] - uniform_col_[r];
      basis_[r] = residual >= 0.0 ? nc_ + r : nc_ + nr_ + r;
    }
    for (std::size_t j : basis_) in_basis_[j] = true;
    Refactor();
  }

  void Refactor() {
    Eigen::MatrixXd bmat(m_, m_);
    std::vector<double> col(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      Column(basis_[i], col);
      for (std::size_t r = 0; r < m_; ++r) bmat(r, i) = col[r];
    }
    binv_ = bmat.partialPivLu().inverse();
    Eigen::VectorXd rhs(m_);
    for (std::size_t r = 0; r < nr_; ++r) rhs(r) = b_[r];
    rhs(nr_) = 1.0;
    Eigen::VectorXd x = binv_ * rhs;
    xb_.assign(x.data(), x.data() + m_);
    for (double& v : xb_) {
      if (v < 0.0 && v > -1e-11) v = 0.0;
    }
  }

  void MultiplyBinv(const std::vector<double>& a, std::vector<double>& out) const {
    for (std::size_t i = 0; i < m_; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < m_; ++k) s += binv_(i, k) * a[k];
      out[i] = s;
    }
  }

  void ComputeDuals(std::vector<double>& y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = Cost(basis_[i]);
      if (cb == 0.0) continue;
      for (std::size_t k = 0; k < m_; ++k) y[k] += cb * binv_(i, k);
    }
  }

  // Reduced costs d_j = c_j - y^T a_j for every variable.
  void ReducedCosts(const std::vector<double>& y, std::vector<double>& d) const {
    d.assign(NumVars(), 0.0);
    for (std::size_t k = 0; k < nc_; ++k) d[k] = -y[nr_];
    for (std::size_t r = 0; r < nr_; ++r) {
      const double yr = y[r];
      if (yr == 0.0) continue;
      const double* row = w_.entries.data() + r * nc_;
      for (std::size_t k = 0; k < nc_; ++k) d[k] -= yr * row[k];
    }
    for (std::size_t r = 0; r < nr_; ++r) {
      d[nc_ + r] = 1.0 - y[r];
      d[nc_ + nr_ + r] = 1.0 + y[r];
    }
    double s = 0.0;
    for (std::size_t k = 0; k < m_; ++k) s += y[k] * uniform_col_[k];
    d[UniformIndex()] = -s;
  }

  std::size_t Price(const std::vector<double>& y, bool bland) {
    ReducedCosts(y, reduced_);
    std::size_t enter = kNone;
    double best = -opt_.cost_tolerance;
    for (std::size_t j = 0; j < reduced_.size(); ++j) {
      if (in_basis_[j]) continue;
      if (reduced_[j] < best) {
        enter = j;
        if (bland) break;
        best = reduced_[j];
      }
    }
    return enter;
  }

  double DualInfeasibility(const std::vector<double>& y) {
    ReducedCosts(y, reduced_);
    double worst = 0.0;
    for (std::size_t j = 0; j < reduced_.size(); ++j) {
      if (!in_basis_[j]) worst = std::max(worst, -reduced_[j]);
    }
    return worst;
  }

  void Pivot(std::size_t leave, std::size_t enter, const std::vector<double>& dir, double theta) {
    for (std::size_t i = 0; i < m_; ++i) xb_[i] -= theta * dir[i];
    xb_[leave] = theta;
    const double p = dir[leave];
    for (std::size_t k = 0; k < m_; ++k) binv_(leave, k) /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == leave || dir[i] == 0.0) continue;
      const double f = dir[i];
      for (std::size_t k = 0; k < m_; ++k) binv_(i, k) -= f * binv_(leave, k);
    }
    in_basis_[basis_[leave]] = false;
    basis_[leave] = enter;
    in_basis_[enter] = true;
  }

  std::vector<double> ExtractWeights(bool& degraded) const {
    std::vector<double> u(nc_, 0.0);
    double uniform_mass = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t j = basis_[i];
      if (j < nc_) {
        u[j] += xb_[i];
      } else if (j == UniformIndex()) {
        uniform_mass += xb_[i];
      }
    }
    if (uniform_mass != 0.0) {
      const double share = uniform_mass / static_cast<double>(nc_);
      for (double& x : u) x += share;
    }
    double sum = 0.0;
    for (double& x : u) {
      if (x < 0.0) {
        if (x < -1e-12) degraded = true;
        x = 0.0;
      }
      sum += x;
    }
    if (!(sum > 0.0)) {
      degraded = true;
      std::fill(u.begin(), u.end(), 1.0 / static_cast<double>(nc_));
      return u;
    }
    for (double& x : u) x /= sum;
    return u;
  }

  double Objective(const std::vector<double>& u) const {
    const auto wu = w_.Apply(u);
    double s = 0.0;
    for (std::size_t r = 0; r < nr_; ++r) s += std::abs(wu[r] - b_[r]);
    return s;
  }

  const DesignMatrix& w_;
  std::vector<double> b_;
  L1FitOptions opt_;
  std::size_t nr_;
  std::size_t nc_;
  std::size_t m_;
  std::vector<double> uniform_col_;
  std::vector<std::size_t> basis_;
  std::vector<bool> in_basis_;
  Eigen::MatrixXd binv_;
  std::vector<double> xb_;
  std::vector<double> reduced_;
  int unbounded_retries_ = 0;
};

}  // namespace internal

inline L1FitResult solve_l1_fit(const DesignMatrix& w, std::span<const double> b,
                                const L1FitOptions& options = {}) {
  if (w.cols == 0) throw std::invalid_argument("solve_l1_fit: need at least one support column");
  if (b.size() != w.rows) throw std::invalid_argument("solve_l1_fit: moment/design row mismatch");
  internal::L1Simplex solver(w, b, options);
  return solver.Solve();
}

}  // namespace synthdb

#endif  // SYNTHDB_LP_H_

// Bounded-variable primal simplex for the linear programs behind the
// placement relaxation and the cache/layer-size allocation.
//
// maximize c'x  subject to  A x <= b,  lo <= x <= up.
//
// Slack variables turn the rows into equalities; rows whose slack starts
// negative get a phase-1 artificial.  Pricing is Dantzig by default and
// switches to Bland's rule after a run of degenerate pivots, which is what
// guarantees termination.  The basis inverse is kept explicitly and
// refactorized periodically.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ecocache {

struct LpProblem {
  struct Row {
    std::vector<std::pair<std::size_t, double>> coeffs;  // (variable, value)
    double bound = 0.0;                                  // right-hand side
  };
  std::size_t num_vars = 0;
  std::vector<double> objective;  // maximized
  std::vector<Row> rows;
  std::vector<double> lower;  // per variable
  std::vector<double> upper;  // per variable, may be +inf

  void validate() const {
    if (objective.size() != num_vars || lower.size() != num_vars ||
        upper.size() != num_vars) {
      throw std::invalid_argument("LpProblem: inconsistent sizes");
    }
    for (std::size_t j = 0; j < num_vars; ++j) {
      if (!(lower[j] <= upper[j])) {
        throw std::invalid_argument("LpProblem: lower bound above upper");
      }
      if (!std::isfinite(lower[j]) || !std::isfinite(objective[j])) {
        throw std::invalid_argument("LpProblem: non-finite data");
      }
    }
    for (const auto& r : rows) {
      if (!std::isfinite(r.bound)) {
        throw std::invalid_argument("LpProblem: non-finite row bound");
      }
      for (auto [j, v] : r.coeffs) {
        if (j >= num_vars || !std::isfinite(v)) {
          throw std::invalid_argument("LpProblem: bad row coefficient");
        }
      }
    }
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  double max_residual = 0.0;
};

struct LpOptions {
  double cost_tol = 1e-10;   // reduced-cost optimality tolerance
  double feas_tol = 1e-9;    // residual tolerance
  std::size_t max_iterations = 0;  // 0: choose from problem size
};

namespace lp_detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Simplex {
 public:
  Simplex(const LpProblem& p, LpOptions opt) : p_(p), opt_(opt) {
    n_ = p.num_vars;
    m_ = p.rows.size();
    total_ = n_ + m_;  // structural + slack (artificials appended on demand)

    cols_.resize(total_);
    for (std::size_t i = 0; i < m_; ++i) {
      for (auto [j, v] : p.rows[i].coeffs) {
        if (v != 0.0) cols_[j].push_back({i, v});
      }
      cols_[n_ + i].push_back({i, 1.0});
    }
    lo_.assign(total_, 0.0);
    up_.assign(total_, kInf);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = p.lower[j];
      up_[j] = p.upper[j];
    }
    if (opt_.max_iterations == 0) {
      opt_.max_iterations = 2000 + 200 * (m_ + n_);
    }
  }

  LpSolution run() {
    LpSolution out;
    at_upper_.assign(total_, false);
    value_.assign(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) value_[j] = lo_[j];

    // initial basis: the slacks
    basis_.resize(m_);
    in_basis_.assign(total_, false);
    std::vector<double> slack0(m_);
    bool need_phase1 = false;
    for (std::size_t i = 0; i < m_; ++i) {
      double ax = 0.0;
      for (auto [j, v] : p_.rows[i].coeffs) ax += v * value_[j];
      slack0[i] = p_.rows[i].bound - ax;
      if (slack0[i] < 0.0) need_phase1 = true;
    }

    if (need_phase1) {
      // artificials with coefficient -1 on rows whose slack starts negative
      for (std::size_t i = 0; i < m_; ++i) {
        if (slack0[i] < 0.0) {
          cols_.push_back({{i, -1.0}});
          lo_.push_back(0.0);
          up_.push_back(kInf);
          at_upper_.push_back(false);
          value_.push_back(0.0);
          in_basis_.push_back(false);
          artificial_from_ = total_;
          basis_[i] = cols_.size() - 1;
        } else {
          basis_[i] = n_ + i;
        }
      }
      artificial_from_ = total_;
      total_ = cols_.size();
      for (std::size_t i = 0; i < m_; ++i) in_basis_[basis_[i]] = true;

      std::vector<double> phase1_cost(total_, 0.0);
      for (std::size_t j = artificial_from_; j < total_; ++j) phase1_cost[j] = -1.0;
      refactorize();
      const LpStatus s1 = iterate(phase1_cost, out.iterations, true);
      if (s1 == LpStatus::IterationLimit) {
        out.status = s1;
        return out;
      }
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] >= artificial_from_) infeas += std::abs(value_[basis_[i]]);
      }
      for (std::size_t j = artificial_from_; j < total_; ++j) {
        if (!in_basis_[j]) infeas += std::abs(value_[j]);
      }
      if (infeas > opt_.feas_tol) {
        out.status = LpStatus::Infeasible;
        return out;
      }
      // pin any artificial still hanging around at zero
      for (std::size_t j = artificial_from_; j < total_; ++j) up_[j] = 0.0;
    } else {
      for (std::size_t i = 0; i < m_; ++i) {
        basis_[i] = n_ + i;
        in_basis_[n_ + i] = true;
      }
      refactorize();
    }

    std::vector<double> cost(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost[j] = p_.objective[j];
    const LpStatus s2 = iterate(cost, out.iterations, false);
    out.status = s2;
    if (s2 != LpStatus::Optimal) return out;

    out.x.assign(n_, 0.0);
    out.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      out.x[j] = value_[j];
      out.objective += p_.objective[j] * value_[j];
    }
    out.max_residual = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      double ax = 0.0;
      for (auto [j, v] : p_.rows[i].coeffs) ax += v * out.x[j];
      out.max_residual = std::max(out.max_residual, ax - p_.rows[i].bound);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      out.max_residual = std::max(out.max_residual, lo_[j] - out.x[j]);
      if (std::isfinite(up_[j])) {
        out.max_residual = std::max(out.max_residual, out.x[j] - up_[j]);
      }
    }
    return out;
  }

 private:
  // column j of the full constraint matrix applied to a dense vector slot
  double col_dot(std::size_t j, const std::vector<double>& y) const {
    double acc = 0.0;
    for (auto [i, v] : cols_[j]) acc += y[i] * v;
    return acc;
  }

  void refactorize() {
    // dense Gauss-Jordan inverse of the basis matrix
    std::vector<double> mat(m_ * m_, 0.0);
    for (std::size_t c = 0; c < m_; ++c) {
      for (auto [i, v] : cols_[basis_[c]]) mat[i * m_ + c] = v;
    }
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
    for (std::size_t col = 0; col < m_; ++col) {
      std::size_t piv = col;
      double best = std::abs(mat[col * m_ + col]);
      for (std::size_t r = col + 1; r < m_; ++r) {
        const double a = std::abs(mat[r * m_ + col]);
        if (a > best) {
          best = a;
          piv = r;
        }
      }
      if (best < 1e-14) {
        throw std::runtime_error("lp_solve: singular basis during refactorization");
      }
      if (piv != col) {
        for (std::size_t c = 0; c < m_; ++c) {
          std::swap(mat[piv * m_ + c], mat[col * m_ + c]);
          std::swap(binv_[piv * m_ + c], binv_[col * m_ + c]);
        }
      }
      const double d = 1.0 / mat[col * m_ + col];
      for (std::size_t c = 0; c < m_; ++c) {
        mat[col * m_ + c] *= d;
        binv_[col * m_ + c] *= d;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == col) continue;
        const double f = mat[r * m_ + col];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < m_; ++c) {
          mat[r * m_ + c] -= f * mat[col * m_ + c];
          binv_[r * m_ + c] -= f * binv_[col * m_ + c];
        }
      }
    }
    recompute_basics();
  }

  void recompute_basics() {
    // x_B = B^-1 (b - N x_N)
    std::vector<double> rhs(m_);
    for (std::size_t i = 0; i < m_; ++i) rhs[i] = p_.rows[i].bound;
    for (std::size_t j = 0; j < total_; ++j) {
      if (in_basis_[j] || value_[j] == 0.0) continue;
      for (auto [i, v] : cols_[j]) rhs[i] -= v * value_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double acc = 0.0;
      const double* row = &binv_[i * m_];
      for (std::size_t c = 0; c < m_; ++c) acc += row[c] * rhs[c];
      value_[basis_[i]] = acc;
    }
  }

  LpStatus iterate(const std::vector<double>& cost, std::size_t& iters,
                   bool phase1) {
    std::vector<double> y(m_), dir(m_);
    std::size_t degenerate_run = 0;
    bool bland = false;
    std::size_t since_refactor = 0;

    for (;;) {
      if (++iters > opt_.max_iterations) return LpStatus::IterationLimit;
      // y = c_B B^-1
      for (std::size_t c = 0; c < m_; ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
          const double cb = cost[basis_[i]];
          if (cb != 0.0) acc += cb * binv_[i * m_ + c];
        }
        y[c] = acc;
      }

      // pricing
      std::size_t enter = total_;
      double best = opt_.cost_tol;
      int enter_dir = 0;
      for (std::size_t j = 0; j < total_; ++j) {
        if (in_basis_[j]) continue;
        if (lo_[j] == up_[j]) continue;  // fixed (retired artificials)
        const double d = cost[j] - col_dot(j, y);
        if (!at_upper_[j] && d > opt_.cost_tol) {
          if (bland) {
            enter = j;
            enter_dir = +1;
            break;
          }
          if (d > best) {
            best = d;
            enter = j;
            enter_dir = +1;
          }
        } else if (at_upper_[j] && d < -opt_.cost_tol) {
          if (bland) {
            enter = j;
            enter_dir = -1;
            break;
          }
          if (-d > best) {
            best = -d;
            enter = j;
            enter_dir = -1;
          }
        }
      }
      if (enter == total_) return LpStatus::Optimal;

      // direction of basic values when the entering variable moves by +1:
      // x_B -= B^-1 A_e * step * enter_dir
      for (std::size_t i = 0; i < m_; ++i) {
        double acc = 0.0;
        for (auto [r, v] : cols_[enter]) acc += binv_[i * m_ + r] * v;
        dir[i] = acc;
      }

      // ratio test
      double limit = std::isfinite(up_[enter]) && std::isfinite(lo_[enter])
                         ? up_[enter] - lo_[enter]
                         : kInf;
      std::size_t leave = m_;  // m_: bound flip of the entering variable
      int leave_to_upper = 0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double d = dir[i] * enter_dir;
        const std::size_t bj = basis_[i];
        double step = kInf;
        int to_upper = 0;
        if (d > 1e-12) {
          step = (value_[bj] - lo_[bj]) / d;
        } else if (d < -1e-12) {
          if (!std::isfinite(up_[bj])) continue;
          step = (up_[bj] - value_[bj]) / (-d);
          to_upper = 1;
        } else {
          continue;
        }
        if (step < 0.0) step = 0.0;
        if (step < limit - 1e-15 ||
            (step < limit + 1e-15 && leave != m_ && bland &&
             basis_[i] < basis_[leave])) {
          limit = step;
          leave = i;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(limit)) return LpStatus::Unbounded;

      if (limit <= 1e-13) {
        if (++degenerate_run > 40) bland = true;
      } else {
        degenerate_run = 0;
      }

      // apply the step
      const double step = limit * enter_dir;
      for (std::size_t i = 0; i < m_; ++i) {
        value_[basis_[i]] -= dir[i] * step;
      }
      value_[enter] = (at_upper_[enter] ? up_[enter] : lo_[enter]) + step;

      if (leave == m_) {
        at_upper_[enter] = !at_upper_[enter];  // bound flip, basis unchanged
        continue;
      }

      const std::size_t out_var = basis_[leave];
      in_basis_[out_var] = false;
      at_upper_[out_var] = leave_to_upper != 0;
      value_[out_var] = leave_to_upper ? up_[out_var] : lo_[out_var];
      basis_[leave] = enter;
      in_basis_[enter] = true;

      // rank-one update of B^-1
      const double piv = dir[leave];
      if (std::abs(piv) < 1e-11) {
        refactorize();
      } else {
        double* lrow = &binv_[leave * m_];
        const double inv_piv = 1.0 / piv;
        for (std::size_t c = 0; c < m_; ++c) lrow[c] *= inv_piv;
        for (std::size_t i = 0; i < m_; ++i) {
          if (i == leave) continue;
          const double f = dir[i];
          if (f == 0.0) continue;
          double* row = &binv_[i * m_];
          for (std::size_t c = 0; c < m_; ++c) row[c] -= f * lrow[c];
        }
      }
      if (++since_refactor >= 150) {
        refactorize();
        since_refactor = 0;
      }
      (void)phase1;
    }
  }

  const LpProblem& p_;
  LpOptions opt_;
  std::size_t n_ = 0, m_ = 0, total_ = 0;
  std::size_t artificial_from_ = std::numeric_limits<std::size_t>::max();
  std::vector<std::vector<std::pair<std::size_t, double>>> cols_;
  std::vector<double> lo_, up_, value_, binv_;
  std::vector<std::size_t> basis_;
  std::vector<bool> in_basis_;
  std::vector<bool> at_upper_;
};

}  // namespace lp_detail

inline LpSolution lp_solve(const LpProblem& problem, LpOptions options = {}) {
  problem.validate();
  if (problem.rows.empty()) {
    // pure box problem: each variable sits at its favourable bound
    LpSolution out;
    out.status = LpStatus::Optimal;
    out.x.resize(problem.num_vars);
    for (std::size_t j = 0; j < problem.num_vars; ++j) {
      const double c = problem.objective[j];
      if (c > 0.0 && !std::isfinite(problem.upper[j])) {
        out.status = LpStatus::Unbounded;
        return out;
      }
      out.x[j] = c > 0.0 ? problem.upper[j] : problem.lower[j];
      out.objective += c * out.x[j];
    }
    return out;
  }
  lp_detail::Simplex s(problem, options);
  LpSolution sol = s.run();
  if (sol.status == LpStatus::Optimal && sol.max_residual > options.feas_tol) {
    throw std::runtime_error("lp_solve: residual above tolerance at optimum");
  }
  return sol;
}

}  // namespace ecocache

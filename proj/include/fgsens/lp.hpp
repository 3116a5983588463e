#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgsens {

enum class LpRel { le, eq, ge };

struct LpRow {
  std::vector<double> a;
  LpRel rel = LpRel::le;
  double b = 0.0;
};

// min c.x  subject to the rows, x >= 0.
struct LpProblem {
  std::vector<double> c;
  std::vector<LpRow> rows;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::optimal;
  std::vector<double> x;
  double objective = 0.0;
};

// Dense two-phase tableau simplex. Entering column is the most negative
// reduced cost until the objective stalls, then Bland's rule (smallest index,
// smallest basis tie-break) takes over, which terminates on degenerate
// problems. Artificial columns never re-enter the basis.
class SimplexSolver {
 public:
  explicit SimplexSolver(double pivot_tol = 1e-10) : tol_(pivot_tol) {}

  LpSolution solve(const LpProblem& p) {
    const std::size_t n = p.c.size();
    const std::size_t m = p.rows.size();
    for (const auto& r : p.rows)
      if (r.a.size() != n) throw std::invalid_argument("lp row size mismatch");

    std::size_t n_slack = 0;
    for (const auto& r : p.rows)
      if (r.rel != LpRel::eq) ++n_slack;
    const std::size_t art_base = n + n_slack;
    const std::size_t total = art_base + m;
    rhs_ = total;

    tableau_.assign(m + 1, std::vector<double>(total + 1, 0.0));
    basis_.assign(m, 0);
    blocked_.assign(total, false);

    std::size_t si = n;
    bool any_artificial = false;
    for (std::size_t i = 0; i < m; ++i) {
      const double sign = p.rows[i].b < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n; ++j) tableau_[i][j] = sign * p.rows[i].a[j];
      tableau_[i][rhs_] = sign * p.rows[i].b;
      LpRel rel = p.rows[i].rel;
      if (sign < 0.0 && rel != LpRel::eq) rel = (rel == LpRel::le) ? LpRel::ge : LpRel::le;
      if (rel == LpRel::le) {
        tableau_[i][si] = 1.0;
        basis_[i] = si++;
        continue;
      }
      if (rel == LpRel::ge) tableau_[i][si++] = -1.0;
      tableau_[i][art_base + i] = 1.0;
      basis_[i] = art_base + i;
      blocked_[art_base + i] = true;
      any_artificial = true;
    }

    if (any_artificial) {
      auto& obj = tableau_[m];
      std::fill(obj.begin(), obj.end(), 0.0);
      for (std::size_t j = art_base; j < total; ++j)
        if (blocked_[j]) obj[j] = 1.0;
      for (std::size_t i = 0; i < m; ++i)
        if (blocked_[basis_[i]])
          for (std::size_t j = 0; j <= rhs_; ++j) obj[j] -= tableau_[i][j];
      if (!iterate()) throw std::runtime_error("phase-1 unbounded");
      if (-tableau_[m][rhs_] > 1e-8) return {LpStatus::infeasible, {}, 0.0};
      for (std::size_t i = 0; i < m; ++i) {
        if (!blocked_[basis_[i]]) continue;
        std::size_t j = 0;
        for (; j < art_base; ++j)
          if (std::abs(tableau_[i][j]) > tol_) break;
        if (j < art_base)
          pivot(i, j);
        else
          tableau_[i][rhs_] = 0.0;  // redundant row
      }
    }

    {
      auto& obj = tableau_[m];
      std::fill(obj.begin(), obj.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) obj[j] = p.c[j];
      for (std::size_t i = 0; i < m; ++i) {
        double f = obj[basis_[i]];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j <= rhs_; ++j) obj[j] -= f * tableau_[i][j];
      }
      if (!iterate()) return {LpStatus::unbounded, {}, 0.0};
    }

    LpSolution sol;
    sol.status = LpStatus::optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      if (basis_[i] < n) sol.x[basis_[i]] = tableau_[i][rhs_];
    for (std::size_t j = 0; j < n; ++j) sol.objective += p.c[j] * sol.x[j];
    return sol;
  }

 private:
  void pivot(std::size_t r, std::size_t c) {
    const double pv = tableau_[r][c];
    for (std::size_t j = 0; j <= rhs_; ++j) tableau_[r][j] /= pv;
    for (std::size_t i = 0; i < tableau_.size(); ++i) {
      if (i == r) continue;
      const double f = tableau_[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= rhs_; ++j) tableau_[i][j] -= f * tableau_[r][j];
    }
    basis_[r] = c;
  }

  bool iterate() {
    const std::size_t m = tableau_.size() - 1;
    auto& obj = tableau_[m];
    int stall = 0;
    double last = obj[rhs_];
    const std::size_t max_iter = 50000 + 100 * rhs_;
    for (std::size_t iter = 0; iter <= max_iter; ++iter) {
      const bool bland = stall > 64;
      std::size_t enter = rhs_;
      double best = -tol_;
      for (std::size_t j = 0; j < rhs_; ++j) {
        if (blocked_[j]) continue;
        if (obj[j] < (bland ? -tol_ : best)) {
          enter = j;
          if (bland) break;
          best = obj[j];
        }
      }
      if (enter == rhs_) return true;
      std::size_t leave = m;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (tableau_[i][enter] <= tol_) continue;
        const double ratio = tableau_[i][rhs_] / tableau_[i][enter];
        if (ratio < best_ratio - tol_ ||
            (ratio < best_ratio + tol_ && leave != m && basis_[i] < basis_[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
      stall = std::abs(obj[rhs_] - last) < tol_ ? stall + 1 : 0;
      last = obj[rhs_];
    }
    throw std::runtime_error("simplex iteration limit reached");
  }

  std::vector<std::vector<double>> tableau_;
  std::vector<std::size_t> basis_;
  std::vector<bool> blocked_;
  std::size_t rhs_ = 0;
  double tol_;
};

inline LpSolution solve_lp(const LpProblem& p) { return SimplexSolver().solve(p); }

}  // namespace fgsens

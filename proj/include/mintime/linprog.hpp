#pragma once

#include <optional>
#include <vector>

#include "mintime/linalg.hpp"
#include "mintime/vec.hpp"

namespace mintime {

// Exact linear program:  minimize <objective, x>
//   subject to           ineq_a[i] . x <= ineq_b[i]
//                        eq_a[j]   . x == eq_b[j]
//                        x_k >= 0 for every k with nonneg[k] (others free)
struct LinearProgram {
  size_t num_vars = 0;
  Vec objective;
  std::vector<Vec> ineq_a;
  std::vector<Rat> ineq_b;
  std::vector<Vec> eq_a;
  std::vector<Rat> eq_b;
  std::vector<bool> nonneg;  // empty means all variables free

  explicit LinearProgram(size_t vars = 0)
      : num_vars(vars), objective(zero_vec(vars)), nonneg(vars, false) {}

  void add_ineq(Vec a, Rat b) {
    if (a.size() != num_vars) throw InputError("lp add_ineq: bad row size");
    ineq_a.push_back(std::move(a));
    ineq_b.push_back(std::move(b));
  }
  void add_eq(Vec a, Rat b) {
    if (a.size() != num_vars) throw InputError("lp add_eq: bad row size");
    eq_a.push_back(std::move(a));
    eq_b.push_back(std::move(b));
  }
};

enum class LPStatus { optimal, infeasible, unbounded };

// Every terminal state carries an exact certificate:
//  optimal:    point + (dual_ineq >= 0, dual_eq) with
//              objective + A^T dual_ineq + E^T dual_eq == 0 on free variables,
//              >= 0 on sign-constrained ones, and value == -(dual.b).
//  infeasible: farkas multipliers proving Ax<=b, Ex==f, x-signs has no solution.
//  unbounded:  feasible point + improving ray.
struct LPResult {
  LPStatus status = LPStatus::infeasible;
  Rat value;
  Vec point;
  Vec dual_ineq, dual_eq;
  Vec farkas_ineq, farkas_eq;
  Vec ray;

  bool verify(const LinearProgram& lp) const;
};

namespace detail {

// Dense two-phase primal simplex with Bland's rule (lowest index entering,
// lowest basic index on ratio ties). Exact arithmetic, fully deterministic.
class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp) { build(); }

  LPResult run() {
    LPResult res;
    // Phase 1: minimize the sum of artificials.
    Vec cost1 = zero_vec(total_cols());
    for (size_t r = 0; r < rows_.size(); ++r) cost1[art_col_ + r] = 1;
    iterate(cost1, /*allow_artificial=*/true);
    if (current_objective(cost1).sign() > 0) {
      res.status = LPStatus::infeasible;
      extract_farkas(cost1, res);
      return res;
    }
    expel_artificials();
    // Phase 2: the real objective over the surviving rows.
    Vec cost2 = zero_vec(total_cols());
    for (size_t j = 0; j < std_cols_; ++j) cost2[j] = std_cost_[j];
    const std::optional<size_t> bad = iterate(cost2, /*allow_artificial=*/false);
    if (bad) {
      res.status = LPStatus::unbounded;
      res.point = current_point();
      res.ray = ray_point(*bad);
      res.value = 0;
      return res;
    }
    res.status = LPStatus::optimal;
    res.point = current_point();
    res.value = dot(lp_.objective, res.point);
    extract_duals(cost2, res);
    return res;
  }

 private:
  struct Row {
    Vec coef;   // over structural + artificial columns
    Rat rhs;    // kept nonnegative
    size_t basic;
    int live_index;  // original row id (ineq first, then eq), -1 once deleted
    int sign_flip;   // +1 / -1 applied to reach rhs >= 0
  };

  size_t total_cols() const { return art_col_ + art_count_; }

  void build() {
    // Column layout: for each variable a "plus" column, plus a "minus" column
    // when the variable is free; then one slack per inequality; then artificials.
    const size_t n = lp_.num_vars;
    plus_col_.assign(n, 0);
    minus_col_.assign(n, SIZE_MAX);
    size_t col = 0;
    for (size_t i = 0; i < n; ++i) {
      plus_col_[i] = col++;
      col_var_.push_back(i);
      col_neg_.push_back(false);
      if (lp_.nonneg.empty() || !lp_.nonneg[i]) {
        minus_col_[i] = col++;
        col_var_.push_back(i);
        col_neg_.push_back(true);
      }
    }
    slack_col_ = col;
    col += lp_.ineq_a.size();
    std_cols_ = col;
    art_count_ = lp_.ineq_a.size() + lp_.eq_a.size();
    art_col_ = std_cols_;

    std_cost_ = zero_vec(std_cols_);
    for (size_t i = 0; i < n; ++i) {
      std_cost_[plus_col_[i]] = lp_.objective[i];
      if (minus_col_[i] != SIZE_MAX) std_cost_[minus_col_[i]] = -lp_.objective[i];
    }

    const size_t m = art_count_;
    rows_.reserve(m);
    for (size_t r = 0; r < m; ++r) {
      const bool is_ineq = r < lp_.ineq_a.size();
      const Vec& a = is_ineq ? lp_.ineq_a[r] : lp_.eq_a[r - lp_.ineq_a.size()];
      const Rat& b = is_ineq ? lp_.ineq_b[r] : lp_.eq_b[r - lp_.ineq_a.size()];
      Row row;
      row.live_index = static_cast<int>(r);
      row.sign_flip = (b.sign() < 0) ? -1 : 1;
      const Rat s(row.sign_flip);
      row.coef = zero_vec(total_cols());
      for (size_t i = 0; i < n; ++i) {
        row.coef[plus_col_[i]] = s * a[i];
        if (minus_col_[i] != SIZE_MAX) row.coef[minus_col_[i]] = -s * a[i];
      }
      if (is_ineq) row.coef[slack_col_ + r] = s;
      row.coef[art_col_ + r] = 1;
      row.rhs = s * b;
      row.basic = art_col_ + r;
      rows_.push_back(std::move(row));
    }
  }

  Rat current_objective(const Vec& cost) const {
    Rat v = 0;
    for (const auto& row : rows_) v += cost[row.basic] * row.rhs;
    return v;
  }

  // Reduced cost of a column under `cost` given the current basis.
  Rat reduced_cost(const Vec& cost, size_t j) const {
    Rat z = cost[j];
    for (const auto& row : rows_) z -= cost[row.basic] * row.coef[j];
    return z;
  }

  void pivot(size_t r, size_t j) {
    Row& prow = rows_[r];
    const Rat inv = Rat(1) / prow.coef[j];
    for (auto& x : prow.coef) x *= inv;
    prow.rhs *= inv;
    for (size_t i = 0; i < rows_.size(); ++i) {
      if (i == r) continue;
      Row& row = rows_[i];
      const Rat f = row.coef[j];
      if (f.is_zero()) continue;
      for (size_t c = 0; c < row.coef.size(); ++c) row.coef[c] -= f * prow.coef[c];
      row.rhs -= f * prow.rhs;
    }
    prow.basic = j;
  }

  // Runs Bland-rule iterations to optimality; returns the entering column when
  // the program is unbounded in that direction instead.
  std::optional<size_t> iterate(const Vec& cost, bool allow_artificial) {
    for (;;) {
      const size_t limit = allow_artificial ? total_cols() : std_cols_;
      size_t enter = SIZE_MAX;
      for (size_t j = 0; j < limit; ++j) {
        if (reduced_cost(cost, j).sign() < 0) { enter = j; break; }
      }
      if (enter == SIZE_MAX) return std::nullopt;
      size_t leave = SIZE_MAX;
      Rat best;
      for (size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].coef[enter].sign() <= 0) continue;
        const Rat ratio = rows_[r].rhs / rows_[r].coef[enter];
        if (leave == SIZE_MAX || ratio < best ||
            (ratio == best && rows_[r].basic < rows_[leave].basic)) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == SIZE_MAX) return enter;  // unbounded ray along `enter`
      pivot(leave, enter);
    }
  }

  // After a zero-value phase 1, remove artificials from the basis: pivot them
  // onto any structural column, or drop the row entirely when it has become
  // the redundant equation 0 == 0.
  void expel_artificials() {
    for (size_t r = 0; r < rows_.size();) {
      if (rows_[r].basic < art_col_) { ++r; continue; }
      size_t j = SIZE_MAX;
      for (size_t c = 0; c < std_cols_; ++c) {
        if (!rows_[r].coef[c].is_zero()) { j = c; break; }
      }
      if (j == SIZE_MAX) {
        rows_.erase(rows_.begin() + static_cast<long>(r));  // 0 == 0 row
        continue;
      }
      pivot(r, j);  // rhs is 0 here, so feasibility survives any pivot sign
      ++r;
    }
  }

  Vec current_point() const {
    Vec std_vals = zero_vec(std_cols_);
    for (const auto& row : rows_) {
      if (row.basic < std_cols_) std_vals[row.basic] = row.rhs;
    }
    Vec x = zero_vec(lp_.num_vars);
    for (size_t i = 0; i < lp_.num_vars; ++i) {
      x[i] = std_vals[plus_col_[i]];
      if (minus_col_[i] != SIZE_MAX) x[i] -= std_vals[minus_col_[i]];
    }
    return x;
  }

  Vec ray_point(size_t enter) const {
    Vec std_vals = zero_vec(std_cols_);
    std_vals[enter] = 1;
    for (const auto& row : rows_) {
      if (row.basic < std_cols_) std_vals[row.basic] = -row.coef[enter];
    }
    Vec d = zero_vec(lp_.num_vars);
    for (size_t i = 0; i < lp_.num_vars; ++i) {
      d[i] = std_vals[plus_col_[i]];
      if (minus_col_[i] != SIZE_MAX) d[i] -= std_vals[minus_col_[i]];
    }
    return d;
  }

  // Solves B^T pi = cost_B over the surviving rows, then maps pi back to
  // multipliers for the original inequalities/equalities. Independent of the
  // pivot history on purpose: certificates come from first principles.
  std::optional<Vec> basis_duals(const Vec& cost) const {
    const size_t m = rows_.size();
    Mat bt(m, zero_vec(m));
    Vec cb = zero_vec(m);
    for (size_t k = 0; k < m; ++k) {
      cb[k] = cost[rows_[k].basic];
      for (size_t r = 0; r < m; ++r) bt[k][r] = original_coef(r, rows_[k].basic);
    }
    return solve_linear(std::move(bt), std::move(cb));
  }

  // Entry of the *original* (pre-pivot) standard-form matrix, reconstructed.
  Rat original_coef(size_t row, size_t col) const {
    const size_t orig = static_cast<size_t>(rows_[row].live_index);
    const bool is_ineq = orig < lp_.ineq_a.size();
    const Rat s(rows_[row].sign_flip);
    if (col < slack_col_) {
      const Vec& a = is_ineq ? lp_.ineq_a[orig] : lp_.eq_a[orig - lp_.ineq_a.size()];
      const Rat v = s * a[col_var_[col]];
      return col_neg_[col] ? -v : v;
    }
    if (col < std_cols_) return (is_ineq && col - slack_col_ == orig) ? s : Rat(0);
    return (col - art_col_ == orig) ? Rat(1) : Rat(0);
  }

  // pi_k is the multiplier of surviving row k; deleted rows get 0.
  void scatter_row_multipliers(const Vec& pi, Vec* out_ineq, Vec* out_eq) const {
    *out_ineq = zero_vec(lp_.ineq_a.size());
    *out_eq = zero_vec(lp_.eq_a.size());
    for (size_t k = 0; k < rows_.size(); ++k) {
      const Rat yhat = Rat(rows_[k].sign_flip) * pi[k];
      const size_t orig = static_cast<size_t>(rows_[k].live_index);
      if (orig < lp_.ineq_a.size()) {
        (*out_ineq)[orig] = -yhat;
      } else {
        (*out_eq)[orig - lp_.ineq_a.size()] = -yhat;
      }
    }
  }

  void extract_duals(const Vec& cost, LPResult& res) const {
    const auto pi = basis_duals(cost);
    if (!pi) throw Error("simplex internal: singular basis at optimum");
    scatter_row_multipliers(*pi, &res.dual_ineq, &res.dual_eq);
  }

  void extract_farkas(const Vec& cost, LPResult& res) const {
    const auto pi = basis_duals(cost);
    if (!pi) throw Error("simplex internal: singular basis at phase-1 optimum");
    scatter_row_multipliers(*pi, &res.farkas_ineq, &res.farkas_eq);
  }

  const LinearProgram& lp_;
  std::vector<Row> rows_;
  std::vector<size_t> plus_col_, minus_col_, col_var_;
  std::vector<bool> col_neg_;
  size_t slack_col_ = 0, std_cols_ = 0, art_col_ = 0, art_count_ = 0;
  Vec std_cost_;
};

}  // namespace detail

inline LPResult lp_solve(const LinearProgram& lp) {
  if (lp.objective.size() != lp.num_vars) throw InputError("lp: objective size");
  if (!lp.nonneg.empty() && lp.nonneg.size() != lp.num_vars) {
    throw InputError("lp: nonneg mask size");
  }
  detail::Simplex s(lp);
  return s.run();
}

inline bool LPResult::verify(const LinearProgram& lp) const {
  const auto feasible = [&](const Vec& x) {
    for (size_t i = 0; i < lp.ineq_a.size(); ++i) {
      if (dot(lp.ineq_a[i], x) > lp.ineq_b[i]) return false;
    }
    for (size_t j = 0; j < lp.eq_a.size(); ++j) {
      if (dot(lp.eq_a[j], x) != lp.eq_b[j]) return false;
    }
    for (size_t k = 0; k < lp.num_vars; ++k) {
      if (!lp.nonneg.empty() && lp.nonneg[k] && x[k].sign() < 0) return false;
    }
    return true;
  };
  const auto stationarity = [&](const Vec& li, const Vec& le, const Vec& base) {
    // base + A^T li + E^T le must vanish on free variables, be >= 0 on
    // sign-constrained ones; also li >= 0.
    for (const auto& l : li) {
      if (l.sign() < 0) return false;
    }
    for (size_t k = 0; k < lp.num_vars; ++k) {
      Rat g = base.empty() ? Rat(0) : base[k];
      for (size_t i = 0; i < lp.ineq_a.size(); ++i) g += li[i] * lp.ineq_a[i][k];
      for (size_t j = 0; j < lp.eq_a.size(); ++j) g += le[j] * lp.eq_a[j][k];
      const bool is_nonneg = !lp.nonneg.empty() && lp.nonneg[k];
      if (is_nonneg ? (g.sign() < 0) : (g.sign() != 0)) return false;
    }
    return true;
  };

  switch (status) {
    case LPStatus::optimal: {
      if (!feasible(point)) return false;
      if (dot(lp.objective, point) != value) return false;
      if (!stationarity(dual_ineq, dual_eq, lp.objective)) return false;
      Rat dual_value = 0;
      for (size_t i = 0; i < lp.ineq_b.size(); ++i) dual_value -= dual_ineq[i] * lp.ineq_b[i];
      for (size_t j = 0; j < lp.eq_b.size(); ++j) dual_value -= dual_eq[j] * lp.eq_b[j];
      return dual_value == value;
    }
    case LPStatus::infeasible: {
      if (!stationarity(farkas_ineq, farkas_eq, {})) return false;
      Rat v = 0;
      for (size_t i = 0; i < lp.ineq_b.size(); ++i) v += farkas_ineq[i] * lp.ineq_b[i];
      for (size_t j = 0; j < lp.eq_b.size(); ++j) v += farkas_eq[j] * lp.eq_b[j];
      return v.sign() < 0;
    }
    case LPStatus::unbounded: {
      if (!feasible(point)) return false;
      if (dot(lp.objective, ray).sign() >= 0) return false;
      for (size_t i = 0; i < lp.ineq_a.size(); ++i) {
        if (dot(lp.ineq_a[i], ray).sign() > 0) return false;
      }
      for (size_t j = 0; j < lp.eq_a.size(); ++j) {
        if (dot(lp.eq_a[j], ray).sign() != 0) return false;
      }
      for (size_t k = 0; k < lp.num_vars; ++k) {
        if (!lp.nonneg.empty() && lp.nonneg[k] && ray[k].sign() < 0) return false;
      }
      return true;
    }
  }
  return false;
}

// Convenience wrappers used across the library.

// Feasibility of {A x <= b, E x == f} (with optional sign constraints).
inline bool lp_feasible(const LinearProgram& lp) {
  LinearProgram probe = lp;
  probe.objective = zero_vec(lp.num_vars);
  return lp_solve(probe).status != LPStatus::infeasible;
}

}  // namespace mintime

#pragma once

#include <optional>
#include <vector>

#include "mintime/vec.hpp"

namespace mintime {

// Dense rational matrix as a list of rows. All routines are exact and
// deterministic (first-nonzero pivoting, no magnitude heuristics needed).
using Mat = std::vector<Vec>;

// Reduced row echelon form in place; returns the pivot column of each pivot row.
inline std::vector<size_t> rref(Mat& m) {
  std::vector<size_t> pivot_cols;
  if (m.empty()) return pivot_cols;
  const size_t rows = m.size(), cols = m[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t pr = r;
    while (pr < rows && m[pr][c].is_zero()) ++pr;
    if (pr == rows) continue;
    std::swap(m[r], m[pr]);
    const Rat inv = Rat(1) / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      const Rat f = m[i][c];
      for (size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivot_cols.push_back(c);
    ++r;
  }
  return pivot_cols;
}

inline size_t rank(Mat m) { return rref(m).size(); }

// Basis of the right kernel {x : m x = 0}.
inline std::vector<Vec> kernel_basis(Mat m) {
  if (m.empty()) return {};
  const size_t cols = m[0].size();
  const std::vector<size_t> piv = rref(m);
  std::vector<bool> is_pivot(cols, false);
  for (size_t c : piv) is_pivot[c] = true;
  std::vector<Vec> basis;
  for (size_t free_c = 0; free_c < cols; ++free_c) {
    if (is_pivot[free_c]) continue;
    Vec v = zero_vec(cols);
    v[free_c] = 1;
    for (size_t pr = 0; pr < piv.size(); ++pr) v[piv[pr]] = -m[pr][free_c];
    basis.push_back(std::move(v));
  }
  return basis;
}

// One solution of m x = rhs, or nullopt when inconsistent.
inline std::optional<Vec> solve_linear(Mat m, Vec rhs) {
  if (m.size() != rhs.size()) throw InputError("solve_linear: row count mismatch");
  if (m.empty()) return Vec{};
  const size_t cols = m[0].size();
  for (size_t i = 0; i < m.size(); ++i) m[i].push_back(rhs[i]);
  const std::vector<size_t> piv = rref(m);
  // Inconsistent iff some pivot landed in the augmented column.
  if (!piv.empty() && piv.back() == cols) return std::nullopt;
  Vec x = zero_vec(cols);
  for (size_t pr = 0; pr < piv.size(); ++pr) x[piv[pr]] = m[pr][cols];
  return x;
}

inline Vec mat_apply(const Mat& m, const Vec& x) {
  Vec out;
  out.reserve(m.size());
  for (const auto& row : m) out.push_back(dot(row, x));
  return out;
}

inline Mat transpose(const Mat& m) {
  if (m.empty()) return {};
  Mat t(m[0].size(), zero_vec(m.size()));
  for (size_t i = 0; i < m.size(); ++i) {
    for (size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  }
  return t;
}

}  // namespace mintime

#pragma once

#include <optional>
#include <vector>

#include "mintime/dynamics.hpp"
#include "mintime/set_algebra.hpp"

namespace mintime {

// Dual-space sets cut out of the support function of the dynamics. All
// membership queries are decided exactly (irrational norm bounds compare
// through squares). Set-level H-representations carry an inner/outer pair:
// they coincide unless the bound 1 +- eps*||F|| is irrational.

struct DualBand {
  HPolyhedron inner;  // guaranteed subset of the true set
  HPolyhedron outer;  // guaranteed superset
  bool tight = true;  // inner == outer == the true set
};

struct DualUnionBand {
  PolyhedralUnion inner;
  PolyhedralUnion outer;
  bool tight = true;
};

namespace detail {

// bounds l <= eps*||F|| <= u with l = u exactly when representable
inline std::pair<Rat, Rat> eps_norm_bounds(const Dynamics& f, const Rat& eps) {
  const SqrtValue n = f.norm();
  if (n.exact) return {eps * n.exact_value, eps * n.exact_value};
  return {eps * n.enclosure.lo, eps * n.enclosure.hi};
}

}  // namespace detail

// sigma_F(-x*) <= 1 + eps*||F||, exact membership.
inline bool in_c_star(const Dynamics& f, const Rat& eps, const Vec& xstar) {
  const Rat bound_sq = eps * eps * f.norm_sq();
  if (f.kind() == DynamicsKind::polytope) {
    const Rat s = f.support(negate(xstar)) - Rat(1);
    return s.sign() <= 0 || s * s <= bound_sq;
  }
  // ball: r*||x*|| <= 1 + eps*r, both sides nonnegative
  const Rat rhs = Rat(1) + eps * f.radius();
  return f.radius() * f.radius() * norm_sq(xstar) <= rhs * rhs;
}

// H-representation band of C*_eps (polytope dynamics).
inline DualBand c_star(const Dynamics& f, const Rat& eps = Rat(0)) {
  if (f.kind() != DynamicsKind::polytope)
    throw WrongRegimeError("c_star h-rep: polytope dynamics only");
  const auto [lo, hi] = detail::eps_norm_bounds(f, eps);
  DualBand out;
  out.tight = (lo == hi);
  out.inner = HPolyhedron(f.dim());
  out.outer = HPolyhedron(f.dim());
  for (const auto& v : f.vertices().vertices) {
    // <-x*, v> <= 1 + eps||F||  i.e.  <-v, x*> <= 1 + eps||F||
    out.inner.add(negate(v), Rat(1) + lo);
    out.outer.add(negate(v), Rat(1) + hi);
  }
  return out;
}

// 1 - eps*||F|| <= sigma_F(-x*) <= 1 + eps*||F||, exact membership.
inline bool in_s_star(const Dynamics& f, const Rat& eps, const Vec& xstar) {
  if (!in_c_star(f, eps, xstar)) return false;
  const Rat bound_sq = eps * eps * f.norm_sq();
  if (f.kind() == DynamicsKind::polytope) {
    const Rat s = Rat(1) - f.support(negate(xstar));  // need s <= eps||F||
    return s.sign() <= 0 || s * s <= bound_sq;
  }
  const Rat lhs = Rat(1) - eps * f.radius();
  if (lhs.sign() <= 0) return true;
  return f.radius() * f.radius() * norm_sq(xstar) >= lhs * lhs;
}

// S*_eps as a union band: per dynamics vertex, the slice where that vertex
// nearly attains the support value. At eps = 0 this is the exact two-sided
// support set (a union of faces of C*).
inline DualUnionBand s_star(const Dynamics& f, const Rat& eps = Rat(0)) {
  if (f.kind() != DynamicsKind::polytope)
    throw WrongRegimeError("s_star h-rep: polytope dynamics only");
  const auto [lo, hi] = detail::eps_norm_bounds(f, eps);
  const DualBand cs = c_star(f, eps);
  DualUnionBand out;
  out.tight = (lo == hi);
  out.inner.dim = out.outer.dim = f.dim();
  for (const auto& v : f.vertices().vertices) {
    // slice: <-v, x*> >= 1 - eps||F||  within C*_eps
    HPolyhedron inner_piece = cs.inner;
    inner_piece.add(v, -(Rat(1) - lo));  // <v,x*> <= -(1 - lo)
    if (!is_empty(inner_piece)) out.inner.pieces.push_back(minimal_faces(inner_piece));
    HPolyhedron outer_piece = cs.outer;
    outer_piece.add(v, -(Rat(1) - hi));
    if (!is_empty(outer_piece)) out.outer.pieces.push_back(minimal_faces(outer_piece));
  }
  return out;
}

inline PolyhedralUnion s_star_exact(const Dynamics& f) {
  const DualUnionBand b = s_star(f, Rat(0));
  return b.inner;
}

// Positive dual cone of the dynamics: {x* : <x*, v> >= 0 for all v in F}.
// For a ball of positive radius this is {0}.
inline PolyhedralCone f_dual_plus(const Dynamics& f) {
  if (f.kind() == DynamicsKind::ball) return PolyhedralCone::zero(f.dim());
  PolyhedralCone c(f.dim());
  for (const auto& v : f.vertices().vertices) c.normals.push_back(negate(v));
  return c;
}

inline bool in_f_dual_plus(const Dynamics& f, const Vec& xstar) {
  if (f.kind() == DynamicsKind::ball) return is_zero(xstar);
  for (const auto& v : f.vertices().vertices) {
    if (dot(xstar, v).sign() < 0) return false;
  }
  return true;
}

}  // namespace mintime

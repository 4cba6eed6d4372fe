// Exact subdifferential sets of the minimal time function for polytope
// dynamics: the gauge subdifferential, in-set basic/singular sets, and the
// out-of-set sets computed through projections and through enlargements.
// All sets live in the dual space and are returned as unions of rational
// H-polyhedra together with an exactness grade.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mintime/dynamics.hpp"
#include "mintime/mintime.hpp"
#include "mintime/normal_cone.hpp"
#include "mintime/set_algebra.hpp"
#include "mintime/support_sets.hpp"

namespace mintime {

enum class Exactness { exact, upper_estimate, lower_estimate };

inline const char* exactness_str(Exactness e) {
  switch (e) {
    case Exactness::exact: return "exact";
    case Exactness::upper_estimate: return "upper-estimate";
    case Exactness::lower_estimate: return "lower-estimate";
  }
  return "?";
}

// Structural hypotheses the exactness grading is allowed to rely on.  A
// multi-piece union that happens to be convex as a set is treated as
// nonconvex here: that only makes the grading more conservative.
struct SubdiffHypotheses {
  bool convex_target = false;
  bool origin_in_dynamics = false;
  bool origin_interior = false;
};

inline SubdiffHypotheses detect_hypotheses(const Dynamics& f, const PolyhedralUnion& omega) {
  SubdiffHypotheses h;
  h.convex_target = omega.pieces.size() == 1;
  if (f.kind() == DynamicsKind::ball) {
    h.origin_in_dynamics = true;  // balls are centered at the origin
    h.origin_interior = true;
  } else {
    h.origin_in_dynamics = f.contains_origin();
    h.origin_interior = f.origin_interior();
  }
  return h;
}

struct SubdiffResult {
  PolyhedralUnion set;
  Exactness exactness = Exactness::upper_estimate;
  std::string source;  // which formula produced the set
  SubdiffHypotheses hypotheses;
};

namespace detail {

inline HPolyhedron intersect_hpoly(const HPolyhedron& a, const HPolyhedron& b) {
  if (a.dim != b.dim) throw InputError("intersection dimension mismatch");
  HPolyhedron out = a;
  for (const auto& h : b.faces) out.faces.push_back(h);
  return out;
}

// {x : -x in p}
inline HPolyhedron negated_set(const HPolyhedron& p) {
  HPolyhedron out(p.dim);
  for (const auto& h : p.faces) out.add(negate(h.normal), h.offset);
  return out;
}

inline std::string hpoly_key(const HPolyhedron& p) {
  std::string key;
  for (const auto& h : p.faces) {
    key += vec_str(h.normal);
    key += "|";
    key += h.offset.str();
    key += ";";
  }
  return key;
}

inline void add_piece_dedup(PolyhedralUnion& u, HPolyhedron piece) {
  for (const auto& p : u.pieces) {
    if (hpoly_equals(p, piece)) return;
  }
  u.pieces.push_back(std::move(piece));
}

// Drop pieces contained in another piece and order the rest canonically so
// repeated runs produce byte-identical reports.
inline void tidy_union(PolyhedralUnion& u) {
  std::vector<HPolyhedron> kept;
  for (size_t i = 0; i < u.pieces.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < u.pieces.size() && !dominated; ++j) {
      if (i == j) continue;
      if (hpoly_subset(u.pieces[i], u.pieces[j])) {
        const bool equal = hpoly_subset(u.pieces[j], u.pieces[i]);
        dominated = !equal || j < i;
      }
    }
    if (!dominated) kept.push_back(u.pieces[i]);
  }
  std::sort(kept.begin(), kept.end(),
            [](const HPolyhedron& a, const HPolyhedron& b) { return hpoly_key(a) < hpoly_key(b); });
  u.pieces = std::move(kept);
}

inline Vec cross3(const Vec& a, const Vec& b) {
  return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace detail

// Subdifferential of the gauge of F at the origin: the polar of
// G = conv(F, {0}), as an H-polyhedron {x* : <g, x*> <= 1 for g vertex of G}.
inline HPolyhedron gauge_polar(const Dynamics& f) {
  f.require(DynamicsKind::polytope, "gauge_polar");
  HPolyhedron out(f.dim());
  for (const auto& g : f.g_hull().vertices) {
    if (!is_zero(g)) out.add(g, Rat(1));
  }
  return minimal_faces(out);
}

// Subdifferential of the gauge of F at u with 0 < gauge(u) < infinity:
// the face of the polar of G exposed by u, realized as
// {x* : <g, x*> <= 1 for all vertices g of G} intersected with the
// hyperplane <x*, u> = gauge(u).
inline HPolyhedron gauge_subdifferential(const Dynamics& f, const Vec& u) {
  f.require(DynamicsKind::polytope, "gauge_subdifferential");
  check_dim(u, f.dim(), "gauge direction");
  if (is_zero(u))
    throw InputError("gauge subdifferential at 0 is the whole polar; use gauge_polar");
  const ExtRat rho = f.gauge(u);
  if (!rho.is_finite())
    throw InputError("gauge subdifferential: direction has infinite gauge");
  if (rho.value().sign() == 0)
    throw InputError("gauge subdifferential: zero gauge on a nonzero direction");
  HPolyhedron out(f.dim());
  for (const auto& g : f.g_hull().vertices) {
    if (!is_zero(g)) out.add(g, Rat(1));
  }
  out.add(u, rho.value());
  out.add(negate(u), -rho.value());
  return minimal_faces(out);
}

// Basic subdifferential at a target point: the limiting normal cone sliced by
// the support level set C* = {x* : sigma_F(-x*) <= 1}.  Equality holds in
// finite dimension, so the result is graded exact.
inline SubdiffResult basic_subdiff_inset(const Dynamics& f, const PolyhedralUnion& omega,
                                         const Vec& x) {
  if (!omega.contains(x))
    throw WrongRegimeError("basic_subdiff_inset: point outside the target; use an out-of-set form");
  const DualBand cs = c_star(f);  // eps = 0: always tight
  SubdiffResult out;
  out.set.dim = omega.dim;
  out.exactness = Exactness::exact;
  out.source = "N(x;target) cap C*";
  out.hypotheses = detect_hypotheses(f, omega);
  for (const auto& cone : limiting_normal_cone_pieces(omega, x)) {
    if (!cone.hrep_known)
      throw UnsupportedDimensionError("subdifferential sets need cone h-reps (dim <= 3)");
    HPolyhedron piece = detail::intersect_hpoly(cone.as_hpoly(), cs.inner);
    if (!is_empty(piece)) detail::add_piece_dedup(out.set, minimal_faces(piece));
  }
  detail::tidy_union(out.set);
  return out;
}

// Singular subdifferential at a target point: the limiting normal cone sliced
// by the positive dual cone of the dynamics.  Exact when 0 in F, otherwise an
// upper estimate.
inline SubdiffResult singular_subdiff_inset(const Dynamics& f, const PolyhedralUnion& omega,
                                            const Vec& x) {
  if (!omega.contains(x))
    throw WrongRegimeError("singular_subdiff_inset: point outside the target; use an out-of-set form");
  const HPolyhedron fp = f_dual_plus(f).as_hpoly();
  SubdiffResult out;
  out.set.dim = omega.dim;
  out.hypotheses = detect_hypotheses(f, omega);
  out.exactness = out.hypotheses.origin_in_dynamics ? Exactness::exact : Exactness::upper_estimate;
  out.source = "N(x;target) cap F*+";
  for (const auto& cone : limiting_normal_cone_pieces(omega, x)) {
    if (!cone.hrep_known)
      throw UnsupportedDimensionError("subdifferential sets need cone h-reps (dim <= 3)");
    HPolyhedron piece = detail::intersect_hpoly(cone.as_hpoly(), fp);
    if (!is_empty(piece)) detail::add_piece_dedup(out.set, minimal_faces(piece));
  }
  detail::tidy_union(out.set);
  return out;
}

// When 0 in F the basic subdifferential generates the limiting normal cone:
// N(x;target) should equal the union of the cones spanned by the per-cone
// basic sets.  Returns true when that holds piece by piece.
inline bool normal_cone_representation_check(const Dynamics& f, const PolyhedralUnion& omega,
                                             const Vec& x) {
  const DualBand cs = c_star(f);
  for (const auto& cone : limiting_normal_cone_pieces(omega, x)) {
    HPolyhedron piece = detail::intersect_hpoly(cone.as_hpoly(), cs.inner);
    const Generators gen = polyhedron_generators(piece);
    std::vector<Vec> dirs;
    for (const auto& p : gen.points)
      if (!is_zero(p)) dirs.push_back(p);
    for (const auto& r : gen.rays) dirs.push_back(r);
    for (const auto& l : gen.lines) {
      dirs.push_back(l);
      dirs.push_back(negate(l));
    }
    const PolyhedralCone spanned = cone_from_generators(ConeGens{dirs, {}}, omega.dim);
    PolyhedralCone target_cone(omega.dim);
    target_cone.normals = cone.normals;
    if (!cone_equals(spanned, target_cone)) return false;
  }
  return true;
}

namespace detail {

// Hyperplanes across which either the local normal-cone data of the target or
// the exposed face of the gauge polar can change: every face plane of every
// target piece, plus the walls of the face fan of G translated to pass
// through x.  Over-refining is harmless, so in dim 3 every vertex pair
// contributes a wall.
inline std::vector<Halfspace> projection_cutters(const Dynamics& f, const PolyhedralUnion& omega,
                                                 const Vec& x) {
  std::vector<Halfspace> cuts;
  for (const auto& piece : omega.pieces) {
    for (const auto& h : piece.faces) cuts.push_back(h);
  }
  const auto& gv = f.g_hull().vertices;
  const size_t d = f.dim();
  if (d == 1) {
    cuts.push_back({Vec{Rat(1)}, x[0]});
  } else if (d == 2) {
    for (const auto& g : gv) {
      if (is_zero(g)) continue;
      const Vec n{-g[1], g[0]};
      cuts.push_back({n, dot(n, x)});
    }
  } else if (d == 3) {
    for (size_t i = 0; i < gv.size(); ++i) {
      for (size_t j = i + 1; j < gv.size(); ++j) {
        const Vec n = cross3(gv[i], gv[j]);
        if (is_zero(n)) continue;
        cuts.push_back({n, dot(n, x)});
      }
    }
  } else {
    throw UnsupportedDimensionError("projection-based subdifferential needs dim <= 3");
  }
  return cuts;
}

}  // namespace detail

struct OutsetProjection {
  SubdiffResult basic;
  SubdiffResult singular;
  std::vector<Vec> representatives;  // one projection point per arrangement cell
};

// Out-of-set subdifferentials through the projection set: the union over
// projection points w of [-d gauge(w - x)] cap N(w;target).  The projection
// set is a union of polytopes; splitting it along the cutter arrangement
// makes the per-cell contribution constant, so one representative point per
// cell realizes the whole union.
inline OutsetProjection subdiff_outset_via_projection(const Dynamics& f,
                                                      const PolyhedralUnion& omega, const Vec& x) {
  f.require(DynamicsKind::polytope, "subdiff_outset_via_projection");
  if (omega.contains(x))
    throw WrongRegimeError("subdiff_outset_via_projection: point lies in the target");
  const ProjectionSet proj = projection_set(f, omega, x);
  const std::vector<Halfspace> cuts = detail::projection_cutters(f, omega, x);

  OutsetProjection out;
  out.basic.set.dim = out.singular.set.dim = omega.dim;
  const SubdiffHypotheses hyp = detect_hypotheses(f, omega);
  out.basic.hypotheses = out.singular.hypotheses = hyp;
  out.basic.source = "union over projections of [-d gauge(w-x) cap N(w;target)]";
  out.singular.source = "union over projections of [N(w;target) cap F*+]";
  out.basic.exactness = (hyp.convex_target && hyp.origin_in_dynamics) ? Exactness::exact
                                                                      : Exactness::upper_estimate;
  out.singular.exactness = Exactness::upper_estimate;

  std::set<std::string> seen;
  for (const auto& piece : proj.pieces.pieces) {
    for (const auto& w : arrangement_cell_points(piece, cuts)) {
      if (seen.insert(vec_str(w)).second) out.representatives.push_back(w);
    }
  }
  const HPolyhedron fp = f_dual_plus(f).as_hpoly();
  for (const auto& w : out.representatives) {
    const HPolyhedron dneg = detail::negated_set(gauge_subdifferential(f, sub(w, x)));
    for (const auto& cone : limiting_normal_cone_pieces(omega, w)) {
      if (!cone.hrep_known)
        throw UnsupportedDimensionError("subdifferential sets need cone h-reps (dim <= 3)");
      HPolyhedron b = detail::intersect_hpoly(dneg, cone.as_hpoly());
      if (!is_empty(b)) detail::add_piece_dedup(out.basic.set, minimal_faces(b));
      HPolyhedron s = detail::intersect_hpoly(cone.as_hpoly(), fp);
      if (!is_empty(s)) detail::add_piece_dedup(out.singular.set, minimal_faces(s));
    }
  }
  detail::tidy_union(out.basic.set);
  detail::tidy_union(out.singular.set);
  return out;
}

struct OutsetEnlargement {
  Rat r;                        // minimal time at x, the enlargement radius
  PolyhedralUnion normal_cone;  // N(x; target enlarged by r), union of cones
  SubdiffResult one_sided_basic;       // cap C*: upper estimate for one-sided basic
  SubdiffResult one_sided_singular;    // cap F*+: upper estimate for one-sided singular
  SubdiffResult convex_exact_basic;    // cap S*: equals the basic set when target convex
  SubdiffResult convex_exact_singular; // cap F*+: equals the singular set when target convex
};

namespace detail {

// Normal cone to the r-enlargement of a convex target at x, through the
// Minkowski-sum decomposition with a projection witness w:
// N = N(w;target) cap [-N(g;G)] where g = (w-x)/r is the gauge witness.
inline PolyhedralCone enlargement_cone_convex(const Dynamics& f, const PolyhedralUnion& omega,
                                              const Vec& x, const Rat& r) {
  const ProjectionSet proj = projection_set(f, omega, x);
  const Vec w = proj.witness_point;
  const Vec g = scale(Rat(1) / r, sub(w, x));
  const auto fre = frechet_normal_cone(omega, w);
  if (!fre) throw Error("projection witness escaped the target");
  if (!fre->hrep_known)
    throw UnsupportedDimensionError("subdifferential sets need cone h-reps (dim <= 3)");
  PolyhedralCone c(omega.dim);
  c.normals = fre->normals;
  // -N(g;G) rows: <g - g_i, a> <= 0 over the vertices g_i of G
  for (const auto& gi : f.g_hull().vertices) {
    const Vec row = sub(g, gi);
    if (!is_zero(row)) c.normals.push_back(row);
  }
  return omega.dim <= 3 ? cone_canonical(c) : c;
}

}  // namespace detail

// Out-of-set subdifferentials through the enlargement: slices of the normal
// cone N(x; target_r) with the support level sets.  For a convex target the
// S* and F*+ slices are the exact basic and singular subdifferentials; in
// general the C* and F*+ slices are upper estimates for the one-sided sets.
inline OutsetEnlargement subdiff_outset_via_enlargement(const Dynamics& f,
                                                        const PolyhedralUnion& omega,
                                                        const Vec& x) {
  f.require(DynamicsKind::polytope, "subdiff_outset_via_enlargement");
  if (omega.contains(x))
    throw WrongRegimeError("subdiff_outset_via_enlargement: radius 0, use the in-set forms");
  const MinTimeResult mt = minimal_time(f, omega, x);
  if (!mt.time.finite) throw EmptyProjectionError("target unreachable from this point");

  OutsetEnlargement out;
  out.r = mt.time.value;
  out.normal_cone.dim = omega.dim;
  const SubdiffHypotheses hyp = detect_hypotheses(f, omega);

  std::vector<PolyhedralCone> cones;
  if (hyp.convex_target) {
    cones.push_back(detail::enlargement_cone_convex(f, omega, x, out.r));
  } else {
    const PolyhedralUnion omr = enlargement(f, omega, out.r);
    cones = limiting_normal_cone_pieces(omr, x);
  }
  for (const auto& c : cones) {
    if (!c.hrep_known)
      throw UnsupportedDimensionError("subdifferential sets need cone h-reps (dim <= 3)");
    detail::add_piece_dedup(out.normal_cone, c.as_hpoly());
  }
  detail::tidy_union(out.normal_cone);

  const DualBand cs = c_star(f);
  const PolyhedralUnion ss = s_star_exact(f);
  const HPolyhedron fp = f_dual_plus(f).as_hpoly();

  auto make = [&](const char* source, Exactness ex) {
    SubdiffResult r;
    r.set.dim = omega.dim;
    r.source = source;
    r.exactness = ex;
    r.hypotheses = hyp;
    return r;
  };
  out.one_sided_basic = make("N(x;target_r) cap C*", Exactness::upper_estimate);
  out.one_sided_singular = make("N(x;target_r) cap F*+", Exactness::upper_estimate);
  out.convex_exact_basic = make(
      "N(x;target_r) cap S*",
      hyp.convex_target ? Exactness::exact : Exactness::upper_estimate);
  out.convex_exact_singular = make(
      "N(x;target_r) cap F*+",
      hyp.convex_target ? Exactness::exact : Exactness::upper_estimate);

  for (const auto& cone : out.normal_cone.pieces) {
    HPolyhedron b = detail::intersect_hpoly(cone, cs.inner);
    if (!is_empty(b)) detail::add_piece_dedup(out.one_sided_basic.set, minimal_faces(b));
    HPolyhedron s = detail::intersect_hpoly(cone, fp);
    if (!is_empty(s)) {
      HPolyhedron reduced = minimal_faces(s);
      detail::add_piece_dedup(out.one_sided_singular.set, reduced);
      detail::add_piece_dedup(out.convex_exact_singular.set, reduced);
    }
    for (const auto& slice : ss.pieces) {
      HPolyhedron cb = detail::intersect_hpoly(cone, slice);
      if (!is_empty(cb)) detail::add_piece_dedup(out.convex_exact_basic.set, minimal_faces(cb));
    }
  }
  detail::tidy_union(out.one_sided_basic.set);
  detail::tidy_union(out.one_sided_singular.set);
  detail::tidy_union(out.convex_exact_basic.set);
  detail::tidy_union(out.convex_exact_singular.set);
  return out;
}

}  // namespace mintime

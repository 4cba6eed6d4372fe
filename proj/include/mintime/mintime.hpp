#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mintime/dynamics.hpp"
#include "mintime/set_algebra.hpp"

namespace mintime {

// Targets are nonempty finite unions of nonempty closed polyhedra.
inline PolyhedralUnion validated_target(PolyhedralUnion u) {
  if (u.pieces.empty()) throw InputError("target needs at least one piece");
  for (const auto& p : u.pieces) {
    if (p.dim != u.dim) throw InputError("target piece dimension mismatch");
    if (is_empty(p)) throw InputError("target piece is empty");
  }
  return u;
}

// Certificate for a finite minimal time value t at x: the target point w is
// reached as w = x + t q with q in the dynamics, witnessed by hull weights
// lambda over the dynamics vertices (sum lambda = t, sum lambda_i v_i = t q).
struct TimeWitness {
  Rat t;
  Vec w;
  Vec q;
  Vec lambda;
  size_t piece = 0;
};

// Minimal time value: exact rational for polytope dynamics, exact or a
// certified enclosure for ball dynamics (irrational square roots).
struct TimeValue {
  bool finite = true;
  bool exact = true;
  Rat value;
  RatInterval enclosure;

  static TimeValue infinite() {
    TimeValue t;
    t.finite = false;
    return t;
  }
  static TimeValue of(Rat v) {
    TimeValue t;
    t.value = std::move(v);
    return t;
  }
  static TimeValue interval(RatInterval i) {
    TimeValue t;
    t.exact = false;
    t.enclosure = std::move(i);
    return t;
  }
  static TimeValue from_sqrt(const SqrtValue& s) {
    return s.exact ? of(s.exact_value) : interval(s.enclosure);
  }

  ExtRat as_extrat() const {
    if (!finite) return ExtRat::infinity();
    if (!exact) throw WrongRegimeError("time value is an enclosure, not exact");
    return ExtRat(value);
  }
  double approx() const {
    if (!finite) return std::numeric_limits<double>::infinity();
    return exact ? value.to_double() : enclosure.mid_double();
  }
};

struct MinTimeResult {
  TimeValue time;
  std::optional<TimeWitness> witness;   // polytope dynamics, finite time
  std::optional<NearestPoint> nearest;  // ball dynamics: a closest target point
  std::optional<size_t> piece;          // first target piece attaining the time
};

inline bool witness_ok(const Dynamics& f, const PolyhedralUnion& target, const Vec& x,
                       const TimeWitness& wit) {
  if (wit.t.sign() < 0) return false;
  if (wit.piece >= target.pieces.size()) return false;
  if (!target.pieces[wit.piece].contains(wit.w)) return false;
  if (wit.w != add(x, scale(wit.t, wit.q))) return false;
  const auto& verts = f.vertices().vertices;
  if (wit.lambda.size() != verts.size()) return false;
  Rat total(0);
  Vec mix = zero_vec(f.dim());
  for (size_t i = 0; i < verts.size(); ++i) {
    if (wit.lambda[i].sign() < 0) return false;
    total += wit.lambda[i];
    mix = add(mix, scale(wit.lambda[i], verts[i]));
  }
  if (total != wit.t || mix != scale(wit.t, wit.q)) return false;
  if (wit.t.sign() > 0 && !f.contains(wit.q)) return false;
  return true;
}

namespace detail {

// min sum(lambda) s.t. x + sum lambda_i v_i in piece, lambda >= 0.
// This is the reachability program for one convex piece: the value is the
// least t with (x + t F) meeting the piece, attained by LP.
inline std::optional<std::pair<Rat, Vec>> piece_time(const std::vector<Vec>& verts,
                                                     const HPolyhedron& piece, const Vec& x) {
  const size_t n = verts.size();
  LinearProgram lp(n);
  lp.objective.assign(n, Rat(1));
  for (const auto& face : piece.faces) {
    Vec row(n);
    for (size_t i = 0; i < n; ++i) row[i] = dot(face.normal, verts[i]);
    lp.add_ineq(row, face.offset - dot(face.normal, x));
  }
  lp.nonneg.assign(n, true);
  const LPResult r = lp_solve(lp);
  if (r.status == LPStatus::infeasible) return std::nullopt;
  if (r.status != LPStatus::optimal) throw Error("minimal time program cannot be unbounded");
  return std::make_pair(r.value, r.point);
}

}  // namespace detail

inline MinTimeResult minimal_time(const Dynamics& f, const PolyhedralUnion& target,
                                  const Vec& x) {
  check_dim(x, target.dim, "minimal_time point");
  if (f.dim() != target.dim) throw InputError("dynamics/target dimension mismatch");
  MinTimeResult out;
  if (f.kind() == DynamicsKind::ball) {
    std::optional<Rat> best;
    for (size_t i = 0; i < target.pieces.size(); ++i) {
      const NearestPoint np = nearest_point(target.pieces[i], x);
      if (!best || np.dist_sq < *best) {
        best = np.dist_sq;
        out.nearest = np;
        out.piece = i;
      }
    }
    const Rat r2 = f.radius() * f.radius();
    out.time = TimeValue::from_sqrt(sqrt_rational(*best / r2));
    return out;
  }
  const auto& verts = f.vertices().vertices;
  std::optional<Rat> best;
  Vec best_lambda;
  size_t best_piece = 0;
  for (size_t i = 0; i < target.pieces.size(); ++i) {
    const auto r = detail::piece_time(verts, target.pieces[i], x);
    if (r && (!best || r->first < *best)) {
      best = r->first;
      best_lambda = r->second;
      best_piece = i;
    }
  }
  if (!best) {
    out.time = TimeValue::infinite();
    return out;
  }
  TimeWitness wit;
  wit.t = *best;
  wit.lambda = best_lambda;
  wit.piece = best_piece;
  Vec tq = zero_vec(f.dim());
  for (size_t i = 0; i < verts.size(); ++i) tq = add(tq, scale(best_lambda[i], verts[i]));
  wit.w = add(x, tq);
  wit.q = wit.t.sign() > 0 ? scale(Rat(1) / wit.t, tq) : zero_vec(f.dim());
  out.time = TimeValue::of(*best);
  out.witness = std::move(wit);
  out.piece = best_piece;
  return out;
}

// Independent second computation of the same value: minimize the gauge of
// (w - x) jointly over target points w. Agreement with minimal_time is a
// cross-check used by the verification suites.
inline ExtRat gauge_representation_value(const Dynamics& f, const PolyhedralUnion& target,
                                         const Vec& x) {
  if (f.kind() != DynamicsKind::polytope)
    throw WrongRegimeError("gauge_representation_value: polytope dynamics only");
  const auto& verts = f.vertices().vertices;
  const size_t n = verts.size();
  const size_t d = f.dim();
  std::optional<Rat> best;
  for (const auto& piece : target.pieces) {
    // variables: lambda (n, >=0) then w (d, free)
    LinearProgram lp(n + d);
    lp.objective = zero_vec(n + d);
    for (size_t i = 0; i < n; ++i) lp.objective[i] = Rat(1);
    for (size_t c = 0; c < d; ++c) {
      Vec row = zero_vec(n + d);
      for (size_t i = 0; i < n; ++i) row[i] = verts[i][c];
      row[n + c] = Rat(-1);
      lp.add_eq(row, -x[c]);  // sum lambda_i v_i - w = -x
    }
    for (const auto& face : piece.faces) {
      Vec row = zero_vec(n + d);
      for (size_t c = 0; c < d; ++c) row[n + c] = face.normal[c];
      lp.add_ineq(row, face.offset);
    }
    lp.nonneg.assign(n + d, false);
    for (size_t i = 0; i < n; ++i) lp.nonneg[i] = true;
    const LPResult r = lp_solve(lp);
    if (r.status == LPStatus::infeasible) continue;
    if (r.status != LPStatus::optimal) throw Error("gauge representation program unbounded");
    if (!best || r.value < *best) best = r.value;
  }
  return best ? ExtRat(*best) : ExtRat::infinity();
}

// The reachable-at-the-optimum set (x + T F) intersected with the target,
// returned piecewise with the lexicographically smallest vertex as witness.
struct ProjectionSet {
  PolyhedralUnion pieces;
  Vec witness_point;
  TimeWitness witness;
};

inline ProjectionSet projection_set(const Dynamics& f, const PolyhedralUnion& target,
                                    const Vec& x) {
  if (f.kind() != DynamicsKind::polytope)
    throw WrongRegimeError("projection_set: polytope dynamics only");
  const MinTimeResult mt = minimal_time(f, target, x);
  if (!mt.time.finite) throw EmptyProjectionError("projection of a point with infinite time");
  const Rat t = mt.time.value;
  std::vector<Vec> shifted;
  for (const auto& v : f.vertices().vertices) shifted.push_back(add(x, scale(t, v)));
  const HPolyhedron reach = facets_of_polytope(VPolytope(target.dim, shifted));
  ProjectionSet out;
  out.pieces.dim = target.dim;
  std::optional<Vec> best_vertex;
  for (const auto& piece : target.pieces) {
    HPolyhedron cut = intersect(reach, piece);
    if (is_empty(cut)) continue;
    cut = minimal_faces(cut);
    for (const auto& v : polyhedron_generators(cut).points) {
      if (!best_vertex || lex_less(v, *best_vertex)) best_vertex = v;
    }
    out.pieces.pieces.push_back(std::move(cut));
  }
  if (out.pieces.pieces.empty() || !best_vertex)
    throw Error("projection internal error: empty at finite time");
  out.witness_point = *best_vertex;
  TimeWitness wit;
  wit.t = t;
  wit.w = *best_vertex;
  const Vec u = sub(wit.w, x);
  wit.q = t.sign() > 0 ? scale(Rat(1) / t, u) : zero_vec(target.dim);
  const auto gauge = f.gauge_with_coeffs(u);
  if (!gauge || gauge->first != t) throw Error("projection witness gauge mismatch");
  wit.lambda = gauge->second;
  wit.piece = mt.witness ? mt.witness->piece : 0;
  // re-home the canonical vertex to a piece that actually contains it
  for (size_t i = 0; i < target.pieces.size(); ++i) {
    if (target.pieces[i].contains(wit.w)) {
      wit.piece = i;
      break;
    }
  }
  out.witness = std::move(wit);
  return out;
}

// All projection points for ball dynamics: one nearest point per piece
// attaining the least distance (each convex piece attains it uniquely).
inline std::vector<Vec> ball_projection_points(const Dynamics& f, const PolyhedralUnion& target,
                                               const Vec& x) {
  if (f.kind() != DynamicsKind::ball)
    throw WrongRegimeError("ball_projection_points: ball dynamics only");
  std::vector<NearestPoint> all;
  std::optional<Rat> best;
  for (const auto& piece : target.pieces) {
    all.push_back(nearest_point(piece, x));
    if (!best || all.back().dist_sq < *best) best = all.back().dist_sq;
  }
  std::vector<Vec> out;
  for (const auto& np : all) {
    if (np.dist_sq == *best && std::find(out.begin(), out.end(), np.point) == out.end())
      out.push_back(np.point);
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

// Sublevel set { T <= r } materialized exactly as the piecewise Minkowski sum
// of the target with -r * conv(F v {0}); membership tests stay available in
// any dimension and for ball dynamics through in_enlargement below.
inline PolyhedralUnion enlargement(const Dynamics& f, const PolyhedralUnion& target,
                                   const Rat& r) {
  if (f.kind() != DynamicsKind::polytope)
    throw WrongRegimeError("explicit enlargement: polytope dynamics only");
  if (r.sign() < 0) throw InputError("enlargement radius must be >= 0");
  PolyhedralUnion out;
  out.dim = target.dim;
  if (r.is_zero()) {
    for (const auto& piece : target.pieces) out.pieces.push_back(minimal_faces(piece));
    return out;
  }
  std::vector<Vec> neg;
  for (const auto& g : f.g_hull().vertices) neg.push_back(scale(-r, g));
  const VPolytope shift(target.dim, neg);
  for (const auto& piece : target.pieces)
    out.pieces.push_back(minkowski_sum_hpoly(piece, shift));
  return out;
}

// T(x) <= r decided exactly for both dynamics kinds (balls by squaring).
inline bool in_enlargement(const Dynamics& f, const PolyhedralUnion& target, const Rat& r,
                           const Vec& x) {
  if (r.sign() < 0) return false;
  if (f.kind() == DynamicsKind::ball) {
    std::optional<Rat> best;
    for (const auto& piece : target.pieces) {
      const Rat d2 = nearest_point(piece, x).dist_sq;
      if (!best || d2 < *best) best = d2;
    }
    return *best <= r * r * f.radius() * f.radius();
  }
  const MinTimeResult mt = minimal_time(f, target, x);
  return mt.time.finite && mt.time.value <= r;
}

// ---------------------------------------------------------------------------
// identity checks: each one recomputes a known relation through an independent
// program and reports exact agreement, so the solver can audit itself

// T(x) must equal the least gauge value of w - x over target points w,
// computed by a joint program over (w, hull weights) per piece.
inline bool gauge_representation_check(const Dynamics& f, const PolyhedralUnion& target,
                                       const Vec& x) {
  const ExtRat via_gauge = gauge_representation_value(f, target, x);  // polytope dynamics only
  return minimal_time(f, target, x).time.as_extrat() == via_gauge;
}

// T(x) = r + minimal time to the r-enlargement, whenever x lies outside the
// enlargement and T(x) is finite; nullopt when the precondition fails.
inline std::optional<bool> enlargement_identity_check(const Dynamics& f,
                                                      const PolyhedralUnion& target, const Rat& r,
                                                      const Vec& x) {
  if (r.sign() <= 0) throw InputError("enlargement identity needs r > 0");
  const PolyhedralUnion enlarged = enlargement(f, target, r);
  if (enlarged.contains(x)) return std::nullopt;  // vacuous: x already inside
  const MinTimeResult direct = minimal_time(f, target, x);
  if (!direct.time.finite) return std::nullopt;  // vacuous: unreachable
  const MinTimeResult via = minimal_time(f, enlarged, x);
  if (!via.time.finite) return false;
  return direct.time.value == r + via.time.value;
}

// along the segment from x toward a projection point w, the minimal time
// decays linearly: T(lambda w + (1-lambda) x) = (1-lambda) T(x)
inline bool projection_linearity_check(const Dynamics& f, const PolyhedralUnion& target,
                                       const Vec& x, const Vec& w, const Rat& lambda) {
  f.require(DynamicsKind::polytope, "projection_linearity_check");
  if (lambda.sign() < 0 || lambda > Rat(1)) throw InputError("lambda must lie in [0,1]");
  const MinTimeResult at_x = minimal_time(f, target, x);
  if (!at_x.time.finite) throw WrongRegimeError("projection linearity needs finite time");
  const Vec mid = add(scale(lambda, w), scale(Rat(1) - lambda, x));
  const MinTimeResult at_mid = minimal_time(f, target, mid);
  if (!at_mid.time.finite) return false;
  return at_mid.time.value == (Rat(1) - lambda) * at_x.time.value;
}

// moving a point of the r-enlargement backwards along an admissible velocity
// for time t can raise the minimal time by at most t: T(x - t q) <= r + t
inline bool shifted_argument_check(const Dynamics& f, const PolyhedralUnion& target, const Rat& r,
                                   const Vec& x, const Rat& t, const Vec& q) {
  f.require(DynamicsKind::polytope, "shifted_argument_check");
  if (t.sign() < 0) throw InputError("shift duration must be >= 0");
  if (!f.contains(q)) throw InputError("shift velocity must belong to the dynamics");
  if (!in_enlargement(f, target, r, x)) {
    throw WrongRegimeError("shifted-argument bound needs x inside the enlargement");
  }
  const MinTimeResult mt = minimal_time(f, target, sub(x, scale(t, q)));
  return mt.time.finite && mt.time.value <= r + t;
}

// midpoint probes for curvature of the minimal time: the chord inequality on
// every pair, and the reverse inequality on pairs inside the complement of
// the target (where the reverse claim applies when that complement is convex)
struct MidpointProbeReport {
  size_t convex_checked = 0;
  size_t concave_checked = 0;
  std::vector<std::string> convexity_violations;  // T(mid) above the chord value
  std::vector<std::string> concavity_violations;  // T(mid) below the chord value
};

inline MidpointProbeReport convexity_concavity_probe(const Dynamics& f,
                                                     const PolyhedralUnion& target,
                                                     const std::vector<std::pair<Vec, Vec>>& pairs,
                                                     const std::vector<Rat>& lambdas) {
  f.require(DynamicsKind::polytope, "convexity_concavity_probe");
  MidpointProbeReport rep;
  for (const auto& [x1, x2] : pairs) {
    const TimeValue t1 = minimal_time(f, target, x1).time;
    const TimeValue t2 = minimal_time(f, target, x2).time;
    for (const Rat& lam : lambdas) {
      if (lam.sign() <= 0 || lam >= Rat(1)) throw InputError("lambda must lie in (0,1)");
      const Vec mid = add(scale(lam, x1), scale(Rat(1) - lam, x2));
      const TimeValue tm = minimal_time(f, target, mid).time;
      auto witness = [&](const char* cmp) {
        return "x1=" + vec_str(x1) + " x2=" + vec_str(x2) + " lambda=" + lam.str() +
               ": T(mid)=" + (tm.finite ? tm.value.str() : "inf") + cmp + "chord";
      };
      // chord inequality; an infinite chord value makes it vacuous
      ++rep.convex_checked;
      if (t1.finite && t2.finite) {
        const Rat chord = lam * t1.value + (Rat(1) - lam) * t2.value;
        if (!tm.finite || tm.value > chord) rep.convexity_violations.push_back(witness(" > "));
      }
      // reverse inequality, probed only strictly off the target with all
      // three values finite
      if (!target.contains(x1) && !target.contains(x2) && !target.contains(mid) && t1.finite &&
          t2.finite && tm.finite) {
        ++rep.concave_checked;
        const Rat chord = lam * t1.value + (Rat(1) - lam) * t2.value;
        if (tm.value < chord) rep.concavity_violations.push_back(witness(" < "));
      }
    }
  }
  return rep;
}

}  // namespace mintime

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mintime/oracle.hpp"
#include "mintime/subdiff.hpp"

namespace mintime {

// ---------------------------------------------------------------------------
// inflation factors
//
// The eps-subdifferential estimates hold with inflated tolerances: an
// eps-normal inside the support band is a (mu eps)-subgradient with
// mu = 1 + 2 ||F|| ||x*||, and the enlargement converse under a calmness
// constant kappa uses ell = mu + 2 kappa ||F||. Both involve euclidean norms,
// so they are enclosures; exact whenever the squared products are squares.

inline RatInterval mu_factor(const Dynamics& f, const Vec& xstar) {
  const SqrtValue s = sqrt_rational(f.norm_sq() * norm_sq(xstar), 96);
  return {Rat(1) + Rat(2) * s.lower(), Rat(1) + Rat(2) * s.upper()};
}

inline RatInterval ell_factor(const Dynamics& f, const Vec& xstar, const Rat& kappa) {
  if (kappa.sign() < 0) throw InputError("calmness constant must be nonnegative");
  const RatInterval mu = mu_factor(f, xstar);
  const SqrtValue n = sqrt_rational(f.norm_sq(), 96);
  return {mu.lo + Rat(2) * kappa * n.lower(), mu.hi + Rat(2) * kappa * n.upper()};
}

struct EpsParams {
  Rat eps{0};
  Rat eta = Rat(1, 10);                   // slack for existence-style conclusions
  std::optional<CalmnessEstimate> kappa;  // enables the calmness-gated converse

  void validate() const {
    if (eps.sign() < 0) throw InputError("eps must be nonnegative");
    if (eta.sign() <= 0) throw InputError("eta must be positive");
    if (kappa && kappa->kappa_hat.sign() < 0)
      throw InputError("calmness constant must be nonnegative");
  }
};

// Tally of individual assertions checked by an audit. Verified and violated
// entries are conclusive under the sampling semantics; inconclusive entries
// could not be decided conservatively (enclosure slack, sampling overclaim).
struct CheckReport {
  size_t checked = 0;
  size_t verified = 0;
  size_t inconclusive = 0;
  std::vector<std::string> violations;
  std::vector<std::string> notes;

  bool ok() const { return violations.empty(); }
};

// ---------------------------------------------------------------------------
// exact eps-normal membership (polyhedral targets)

namespace detail {

// Exact squared distance from a point to an h-rep cone {y : <n_i, y> <= 0}.
// The euclidean projection satisfies x* - p in cone(active rows), so p is the
// kernel projection of x* for the active subset; scanning all row subsets and
// keeping feasible kernel projections therefore finds it.
inline Rat dist_sq_to_cone(const PolyhedralCone& cone, const Vec& xstar) {
  if (!cone.hrep_known) throw WrongRegimeError("cone distance needs an h-rep");
  std::vector<Vec> rows;
  {
    std::map<std::string, bool> seen;
    for (const auto& n : cone.normals) {
      if (is_zero(n)) continue;
      const Vec p = primitive(n);
      if (seen.emplace(vec_str(p), true).second) rows.push_back(p);
    }
  }
  auto feasible = [&](const Vec& y) {
    for (const auto& n : rows) {
      if (dot(n, y).sign() > 0) return false;
    }
    return true;
  };
  if (feasible(xstar)) return Rat(0);
  Rat best = norm_sq(xstar);  // the apex is always available
  const size_t m = rows.size();
  if (m > 16) throw InputError("cone distance: too many facets");
  for (size_t mask = 1; mask < (size_t(1) << m); ++mask) {
    Mat active;
    for (size_t i = 0; i < m; ++i) {
      if (mask & (size_t(1) << i)) active.push_back(rows[i]);
    }
    const std::vector<Vec> basis = kernel_basis(active);
    if (basis.empty()) continue;  // kernel {0}: the apex again
    Mat gram;
    Vec rhs;
    for (const auto& bi : basis) {
      Vec row;
      row.reserve(basis.size());
      for (const auto& bj : basis) row.push_back(dot(bi, bj));
      gram.push_back(std::move(row));
      rhs.push_back(dot(bi, xstar));
    }
    const auto coef = solve_linear(gram, rhs);
    if (!coef) continue;
    Vec p = zero_vec(xstar.size());
    for (size_t i = 0; i < basis.size(); ++i) p = add(p, scale((*coef)[i], basis[i]));
    if (!feasible(p)) continue;
    best = min(best, norm_sq(sub(xstar, p)));
  }
  return best;
}

}  // namespace detail

// Exact eps-normal membership at a point of a polyhedral union. Near x the
// union looks like the union of the tangent cones of the pieces through x, so
// the defining limsup splits per piece and x* qualifies exactly when its
// distance to every such piece normal cone is at most eps.
inline bool eps_normal_exact(const PolyhedralUnion& omega, const Vec& x, const Vec& xstar,
                             const Rat& eps) {
  check_dim(x, omega.dim, "base point");
  check_dim(xstar, omega.dim, "dual vector");
  if (eps.sign() < 0) throw InputError("eps must be nonnegative");
  if (!omega.contains(x)) throw WrongRegimeError("eps-normals live at target points");
  const Rat eps_sq = eps * eps;
  for (const auto& piece : omega.pieces) {
    if (!piece.contains(x)) continue;
    const auto cone = frechet_normal_cone(PolyhedralUnion(omega.dim, {piece}), x);
    if (!cone) throw Error("piece lost its own point");
    if (detail::dist_sq_to_cone(*cone, xstar) > eps_sq) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// eps-subgradient membership

// The gauge of the dynamics as a sampled field (exact rational values).
inline TimeField gauge_field(const Dynamics& f) {
  f.require(DynamicsKind::polytope, "gauge_field");
  TimeField tf;
  tf.dim = f.dim();
  tf.eval = [f](const Vec& u) {
    const ExtRat g = f.gauge(u);
    return g.is_finite() ? TimeValue::of(g.value()) : TimeValue::infinite();
  };
  return tf;
}

// Membership of x* in the regularized eps-subdifferential of the minimal time
// function at x. Exact for polytope dynamics at eps = 0 (normal-cone slice in
// the target, enlargement slice outside a convex target); for a convex target
// with eps > 0 the global inequality
//   <x*, y - x> <= T(y) - T(x) + eps ||y - x||
// supplies exact rejections before the sampled verdict. Everything else
// adopts the sampled verdict.
inline Verdict eps_subgradient_membership(const Dynamics& f, const PolyhedralUnion& omega,
                                          const Vec& x, const Vec& xstar, const Rat& eps,
                                          const SamplingPlan& plan) {
  plan.validate();
  check_dim(x, omega.dim, "base point");
  check_dim(xstar, omega.dim, "dual vector");
  if (eps.sign() < 0) throw InputError("eps must be nonnegative");

  const TimeField field = time_field(f, omega);
  if (f.kind() != DynamicsKind::polytope)
    return sampled_eps_subgradient(field, x, xstar, eps, plan);

  if (eps.is_zero() && omega.contains(x)) {
    const auto cone = frechet_normal_cone(omega, x);
    if (cone && cone->hrep_known) {
      const bool in = in_c_star(f, eps, xstar) && cone->contains(xstar);
      return in ? Verdict::member : Verdict::non_member;
    }
    return sampled_eps_subgradient(field, x, xstar, eps, plan);
  }

  const SubdiffHypotheses hyp = detect_hypotheses(f, omega);
  if (!hyp.convex_target) return sampled_eps_subgradient(field, x, xstar, eps, plan);

  if (eps.is_zero()) {
    const OutsetEnlargement en = subdiff_outset_via_enlargement(f, omega, x);
    return en.convex_exact_basic.set.contains(xstar) ? Verdict::member : Verdict::non_member;
  }

  // convex data: a violation of the global inequality at any probe is decisive
  const TimeValue tx = field.eval(x);
  if (!tx.finite) throw WrongRegimeError("eps-subgradients need finite minimal time");
  const Rat eps_sq = eps * eps;
  std::vector<Vec> probes =
      oracle_detail::box_grid(omega.dim, plan.grid_halfwidth, plan.grid_halfwidth / Rat(4));
  for (const auto& piece : omega.pieces) {
    for (const auto& v : polyhedron_generators(piece).points) probes.push_back(sub(v, x));
  }
  for (const Vec& g : probes) {
    if (is_zero(g)) continue;
    const TimeValue ty = field.eval(add(x, g));
    if (!ty.finite) continue;
    const Rat lhs = dot(xstar, g) - (ty.value - tx.value);
    if (lhs.sign() <= 0) continue;
    if (lhs * lhs > eps_sq * norm_sq(g)) return Verdict::non_member;
  }
  return sampled_eps_subgradient(field, x, xstar, eps, plan);
}

// ---------------------------------------------------------------------------
// audits

// Two-sided audit at a target point. Necessary side: every sampled
// eps-subgradient obeys the eps-normal inequality and the support bound
// sigma_F(-y) <= 1 + eps ||F||. Converse side: every exact eps-normal inside
// that band passes the sampled subgradient test at the inflated tolerance
// mu eps. Support-bound failures of sampled members are reported as
// inconclusive: a sampled membership can overclaim under direction sparsity.
inline CheckReport inset_eps_bounds_check(const Dynamics& f, const PolyhedralUnion& omega,
                                          const Vec& x, const Rat& eps,
                                          const SamplingPlan& plan) {
  plan.validate();
  check_dim(x, omega.dim, "base point");
  if (eps.sign() < 0) throw InputError("eps must be nonnegative");
  if (!omega.contains(x)) throw WrongRegimeError("in-set eps bounds need a target point");

  const TimeField field = time_field(f, omega);
  CheckReport rep;

  const auto kept = oracle_detail::normal_probe_dirs(omega, x, plan);
  const DualCloud sub_cloud = sampled_frechet_subdiff(field, x, eps, plan);
  for (const Vec& y : sub_cloud.members) {
    ++rep.checked;
    if (!in_c_star(f, eps, y)) {
      ++rep.inconclusive;
      rep.notes.push_back("sampled subgradient " + vec_str(y) +
                          " escapes the support bound; sampling overclaim suspected");
      continue;
    }
    switch (oracle_detail::normal_verdict(kept, y, eps, plan.tolerance)) {
      case Verdict::member:
        ++rep.verified;
        break;
      case Verdict::uncertain:
        ++rep.inconclusive;
        break;
      case Verdict::non_member:
        rep.violations.push_back("sampled subgradient " + vec_str(y) +
                                 " breaks the eps-normal inequality");
    }
  }

  const RatInterval t_base = oracle_detail::tv_bounds(field.eval(x));
  const auto samples = oracle_detail::quotient_samples(
      field, x, t_base, oracle_detail::tail_radii(plan, 2),
      oracle_detail::unit_directions(omega.dim, plan.directions));
  for (const Vec& cand :
       oracle_detail::box_grid(omega.dim, plan.grid_halfwidth, plan.grid_step)) {
    if (!in_c_star(f, eps, cand)) continue;
    if (!eps_normal_exact(omega, x, cand, eps)) continue;
    ++rep.checked;
    const RatInterval mu = mu_factor(f, cand);
    const Verdict at_lo =
        oracle_detail::liminf_verdict(samples, cand, mu.lo * eps, plan.tolerance);
    if (at_lo == Verdict::member) {
      ++rep.verified;
      continue;
    }
    const Verdict at_hi =
        (eps.is_zero() || mu.lo == mu.hi)
            ? at_lo
            : oracle_detail::liminf_verdict(samples, cand, mu.hi * eps, plan.tolerance);
    if (at_hi == Verdict::non_member) {
      rep.violations.push_back("exact eps-normal " + vec_str(cand) +
                               " rejected by the inflated subgradient test");
    } else {
      ++rep.inconclusive;
    }
  }
  return rep;
}

// Audit of an accepted eps-subgradient at a point outside the target:
//  - some projection point within ||F|| T(x) + eta absorbs x* as an
//    (eps+eta)-normal;
//  - sigma_F(-x*) stays in the band 1 -+ eps ||F||;
//  - every projection cell accepts x* through the negated gauge
//    subdifferential and the eps-normals at its representative;
//  - x* is an exact eps-normal of the T(x)-enlargement at x, and under a
//    certified calmness constant the converse holds at the inflated
//    tolerance ell eps.
inline CheckReport outset_eps_checks(const Dynamics& f, const PolyhedralUnion& omega,
                                     const Vec& x, const Vec& xstar, const EpsParams& params,
                                     const SamplingPlan& plan) {
  params.validate();
  plan.validate();
  f.require(DynamicsKind::polytope, "outset_eps_checks");
  check_dim(x, omega.dim, "base point");
  check_dim(xstar, omega.dim, "dual vector");
  if (omega.contains(x)) throw WrongRegimeError("outset checks need a point outside the target");

  const TimeField field = time_field(f, omega);
  const TimeValue tx = field.eval(x);
  if (!tx.finite) throw WrongRegimeError("outset checks need finite minimal time");
  const Rat t = tx.value;
  const Rat eps = params.eps;
  if (eps_subgradient_membership(f, omega, x, xstar, eps, plan) != Verdict::member)
    throw InputError("dual vector fails the eps-subgradient test at the base point");

  CheckReport rep;
  const OutsetProjection routes = subdiff_outset_via_projection(f, omega, x);
  const ProjectionSet proj = projection_set(f, omega, x);

  {
    ++rep.checked;
    std::vector<Vec> cands = routes.representatives;
    cands.push_back(proj.witness_point);
    const Rat reach = sqrt_rational(f.norm_sq(), 96).lower() * t + params.eta;
    std::optional<Vec> hit;
    for (const Vec& w : cands) {
      if (!omega.contains(w)) continue;
      if (norm_sq(sub(x, w)) > reach * reach) continue;
      if (!eps_normal_exact(omega, w, xstar, eps + params.eta)) continue;
      hit = w;
      break;
    }
    if (hit) {
      ++rep.verified;
      rep.notes.push_back("witness " + vec_str(*hit) + " absorbs the dual vector");
    } else {
      rep.violations.push_back("no projection point absorbs the dual as an (eps+eta)-normal");
    }
  }

  bool band_ok = false;
  {
    ++rep.checked;
    band_ok = in_s_star(f, eps, xstar);
    if (band_ok) {
      ++rep.verified;
    } else {
      rep.violations.push_back("support of the negated dual leaves the unit band");
    }
  }

  for (const Vec& w : routes.representatives) {
    ++rep.checked;
    if (eps.is_zero()) {
      const auto cone = frechet_normal_cone(omega, w);
      const bool gauge_ok = gauge_subdifferential(f, sub(w, x)).contains(negate(xstar));
      const bool normal_ok = cone && cone->hrep_known && cone->contains(xstar);
      if (gauge_ok && normal_ok) {
        ++rep.verified;
      } else {
        rep.violations.push_back("projection point " + vec_str(w) + " rejects the dual vector");
      }
      continue;
    }
    if (!eps_normal_exact(omega, w, xstar, eps)) {
      rep.violations.push_back("projection point " + vec_str(w) +
                               " rejects the dual as an eps-normal");
      continue;
    }
    switch (sampled_eps_subgradient(gauge_field(f), sub(w, x), negate(xstar), eps, plan)) {
      case Verdict::member:
        ++rep.verified;
        break;
      case Verdict::uncertain:
        ++rep.inconclusive;
        break;
      case Verdict::non_member:
        rep.violations.push_back("gauge subgradient test rejects the dual at " + vec_str(w));
    }
  }

  bool up_ok = false;
  {
    ++rep.checked;
    const PolyhedralUnion omr = enlargement(f, omega, t);
    up_ok = eps_normal_exact(omr, x, xstar, eps);
    if (up_ok && band_ok) {
      ++rep.verified;
    } else {
      rep.violations.push_back("dual vector escapes the enlargement eps-normals at the base point");
    }
  }

  if (params.kappa && up_ok && band_ok) {
    if (!params.kappa->certified) {
      rep.notes.push_back("calmness constant not certified: enlargement converse skipped");
    } else if (eps.is_zero()) {
      // ell * 0 = 0 and the precondition already established 0-membership
      ++rep.checked;
      ++rep.verified;
    } else {
      ++rep.checked;
      const RatInterval ell = ell_factor(f, xstar, params.kappa->kappa_hat);
      if (sampled_eps_subgradient(field, x, xstar, ell.lo * eps, plan) == Verdict::member) {
        ++rep.verified;
      } else if (sampled_eps_subgradient(field, x, xstar, ell.hi * eps, plan) ==
                 Verdict::non_member) {
        rep.violations.push_back("enlargement converse fails at the inflated tolerance");
      } else {
        ++rep.inconclusive;
      }
    }
  }
  return rep;
}

}  // namespace mintime

#pragma once

#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mintime/dynamics.hpp"
#include "mintime/errors.hpp"
#include "mintime/mintime.hpp"
#include "mintime/polyhedron.hpp"
#include "mintime/rat.hpp"
#include "mintime/vec.hpp"

// Sampled verification oracles. Everything here estimates subdifferential and
// normal-cone membership directly from difference quotients of the minimal time
// function on deterministic rational sample grids, without consulting the exact
// polyhedral formulas. Results adjudicate tests only; no sampled value ever
// flows back into the exact algorithms.

namespace mintime {

// ---------------------------------------------------------------------------
// sampling plan

struct SamplingPlan {
  std::vector<Rat> radii;       // strictly decreasing, all positive
  size_t directions = 64;       // unit directions per radius (2d count)
  Rat grid_halfwidth = Rat(2);  // dual candidate grid is [-h, h]^d ...
  Rat grid_step = Rat(1, 8);    // ... stepped by this
  Rat tolerance = Rat(1, 1000000000);

  void validate() const {
    if (radii.size() < 2) throw InputError("sampling plan needs at least two radii");
    for (size_t i = 0; i < radii.size(); ++i) {
      if (radii[i].sign() <= 0) throw InputError("sampling radii must be positive");
      if (i > 0 && !(radii[i] < radii[i - 1])) {
        throw InputError("sampling radii must be strictly decreasing");
      }
    }
    if (directions < 2) throw InputError("sampling plan needs at least two directions");
    if (grid_step.sign() <= 0 || grid_halfwidth.sign() <= 0) {
      throw InputError("dual grid parameters must be positive");
    }
    if (tolerance.sign() <= 0) throw InputError("sampling tolerance must be positive");
  }

  static SamplingPlan defaults(unsigned kmin = 2, unsigned kmax = 12, size_t dirs = 64) {
    if (kmin >= kmax || kmax > 40) throw InputError("bad radius exponent range");
    SamplingPlan plan;
    Rat r(1);
    for (unsigned k = 1; k <= kmax; ++k) {
      r /= Rat(2);
      if (k >= kmin) plan.radii.push_back(r);
    }
    plan.directions = dirs;
    plan.validate();
    return plan;
  }

  // "kmin:kmax:dirs" — radius exponent range and direction count.
  static SamplingPlan parse(const std::string& text) {
    std::istringstream in(text);
    std::string part;
    std::vector<unsigned long> fields;
    while (std::getline(in, part, ':')) {
      try {
        size_t used = 0;
        fields.push_back(std::stoul(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw InputError("bad sampling plan value: '" + text + "'");
      }
    }
    if (fields.size() != 3) {
      throw InputError("sampling plan wants kmin:kmax:dirs, got '" + text + "'");
    }
    return defaults(static_cast<unsigned>(fields[0]), static_cast<unsigned>(fields[1]),
                    static_cast<size_t>(fields[2]));
  }

  // MINTIME_SAMPLING="kmin:kmax:dirs" overrides the default plan.
  static SamplingPlan from_env() {
    const char* env = std::getenv("MINTIME_SAMPLING");
    if (env == nullptr || *env == '\0') return defaults();
    return parse(env);
  }
};

// ---------------------------------------------------------------------------
// scalar field under test

// A minimal time function presented as a black box: the oracles only ever
// evaluate it pointwise. Exact scenes wrap the solver; curved benchmark scenes
// wrap a closed form with certified enclosures.
struct TimeField {
  size_t dim = 0;
  std::function<TimeValue(const Vec&)> eval;
};

inline TimeField time_field(Dynamics f, PolyhedralUnion target) {
  auto fp = std::make_shared<Dynamics>(std::move(f));
  auto tp = std::make_shared<PolyhedralUnion>(std::move(target));
  TimeField field;
  field.dim = fp->dim();
  field.eval = [fp, tp](const Vec& x) { return minimal_time(*fp, *tp, x).time; };
  return field;
}

// distance to the complement of the open unit ball under unit ball dynamics:
// T(x) = max(0, 1 - |x|), irrational off the coordinate axes, so values come
// back as certified enclosures.
inline TimeField unit_ball_complement_field(unsigned precision_bits = 96) {
  TimeField field;
  field.dim = 2;
  field.eval = [precision_bits](const Vec& x) {
    check_dim(x, 2, "unit_ball_complement_field point");
    const Rat ns = norm_sq(x);
    if (ns >= Rat(1)) return TimeValue::of(Rat(0));
    const SqrtValue s = sqrt_rational(ns, precision_bits);
    if (s.exact) return TimeValue::of(Rat(1) - s.exact_value);
    return TimeValue::interval({Rat(1) - s.enclosure.hi, Rat(1) - s.enclosure.lo});
  };
  return field;
}

// ---------------------------------------------------------------------------
// deterministic direction and grid generators

namespace oracle_detail {

// rational points on the unit circle via the tangent half-angle chart; each
// chart point is paired with its antipode so early termination scans see
// opposing directions back to back.
inline std::vector<Vec> circle_directions(size_t n) {
  size_t half = n / 2;
  if (half < 1) half = 1;
  std::vector<Vec> dirs;
  dirs.reserve(2 * half);
  for (size_t k = 0; k < half; ++k) {
    const Rat t = Rat(2 * static_cast<long>(k) - static_cast<long>(half),
                      static_cast<long>(half));
    const Rat den = Rat(1) + t * t;
    const Vec d{(Rat(1) - t * t) / den, Rat(2) * t / den};
    dirs.push_back(d);
    dirs.push_back(negate(d));
  }
  return dirs;
}

// rational points on the unit sphere via the stereographic chart plus antipodes.
inline std::vector<Vec> sphere_directions(size_t n) {
  size_t m = 2;
  while (2 * m * m < n) ++m;
  std::vector<Vec> dirs;
  dirs.reserve(2 * m * m);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) {
      const Rat a = Rat(2 * static_cast<long>(i) + 1 - static_cast<long>(m),
                        static_cast<long>(m));
      const Rat b = Rat(2 * static_cast<long>(j) + 1 - static_cast<long>(m),
                        static_cast<long>(m));
      const Rat den = Rat(1) + a * a + b * b;
      const Vec d{Rat(2) * a / den, Rat(2) * b / den, (Rat(1) - a * a - b * b) / den};
      dirs.push_back(d);
      dirs.push_back(negate(d));
    }
  }
  return dirs;
}

inline std::vector<Vec> unit_directions(size_t dim, size_t n) {
  if (dim == 0) throw InputError("zero-dimensional sampling space");
  if (dim == 1) return {Vec{Rat(1)}, Vec{Rat(-1)}};
  if (dim == 2) return circle_directions(n);
  if (dim == 3) return sphere_directions(n);
  // higher dimensions: axes plus 3-4-5 diagonals in coordinate planes.
  std::vector<Vec> dirs;
  for (size_t i = 0; i < dim; ++i) {
    Vec e = zero_vec(dim);
    e[i] = Rat(1);
    dirs.push_back(e);
    dirs.push_back(negate(e));
  }
  for (size_t i = 0; i < dim; ++i) {
    for (size_t j = i + 1; j < dim; ++j) {
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          Vec d = zero_vec(dim);
          d[i] = Rat(3 * si, 5);
          d[j] = Rat(4 * sj, 5);
          dirs.push_back(d);
        }
      }
    }
  }
  return dirs;
}

inline std::vector<Vec> box_grid(size_t dim, const Rat& halfwidth, const Rat& step) {
  std::vector<Rat> axis;
  for (Rat v = -halfwidth; v <= halfwidth; v += step) axis.push_back(v);
  std::vector<Vec> pts;
  std::vector<size_t> idx(dim, 0);
  while (true) {
    Vec p(dim);
    for (size_t i = 0; i < dim; ++i) p[i] = axis[idx[i]];
    pts.push_back(std::move(p));
    size_t i = 0;
    while (i < dim && ++idx[i] == axis.size()) idx[i++] = 0;
    if (i == dim) break;
  }
  return pts;
}

// interval of T(x) - T(base) scaled by 1/rho, or "infinite" when T(x) = inf.
struct QuotientSample {
  Vec dir;
  bool finite = false;
  RatInterval c{Rat(0), Rat(0)};  // (T(base + rho dir) - T(base)) / rho
};

inline RatInterval tv_bounds(const TimeValue& t) {
  if (!t.finite) throw WrongRegimeError("interval bounds of an infinite time value");
  return t.exact ? RatInterval{t.value, t.value} : t.enclosure;
}

inline std::vector<QuotientSample> quotient_samples(const TimeField& field, const Vec& base,
                                                    const RatInterval& t_base,
                                                    const std::vector<Rat>& radii,
                                                    const std::vector<Vec>& dirs) {
  std::vector<QuotientSample> out;
  out.reserve(radii.size() * dirs.size());
  for (const Rat& rho : radii) {
    for (const Vec& d : dirs) {
      QuotientSample s;
      s.dir = d;
      const TimeValue t = field.eval(add(base, scale(rho, d)));
      if (t.finite) {
        const RatInterval b = tv_bounds(t);
        s.finite = true;
        s.c = {(b.lo - t_base.hi) / rho, (b.hi - t_base.lo) / rho};
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace oracle_detail

// ---------------------------------------------------------------------------
// membership verdicts

enum class Verdict { member, non_member, uncertain };

inline const char* verdict_str(Verdict v) {
  switch (v) {
    case Verdict::member: return "member";
    case Verdict::non_member: return "non-member";
    default: return "uncertain";
  }
}

namespace oracle_detail {

// verdict for "liminf of sampled quotients >= -eps": scan the precomputed
// samples, give up early once one quotient is conclusively below threshold.
// samples with T = inf never constrain the liminf.
inline Verdict liminf_verdict(const std::vector<QuotientSample>& samples, const Vec& xstar,
                              const Rat& eps, const Rat& tol) {
  const Rat thr = -eps;
  Rat lo;
  bool have = false;
  for (const QuotientSample& s : samples) {
    if (!s.finite) continue;
    const Rat shift = dot(xstar, s.dir);
    if (s.c.hi - shift < thr - tol) return Verdict::non_member;
    const Rat qlo = s.c.lo - shift;
    if (!have || qlo < lo) {
      lo = qlo;
      have = true;
    }
  }
  if (!have) return Verdict::member;  // T = inf off the base point: vacuous
  return lo >= thr ? Verdict::member : Verdict::uncertain;
}

inline std::vector<Rat> tail_radii(const SamplingPlan& plan, size_t count) {
  const size_t n = plan.radii.size();
  const size_t take = count < n ? count : n;
  return std::vector<Rat>(plan.radii.end() - static_cast<long>(take), plan.radii.end());
}

}  // namespace oracle_detail

// Sampled test of a single dual point against the regularized subgradient
// inequality at x: finite liminf quotients must stay above -eps.
inline Verdict sampled_eps_subgradient(const TimeField& field, const Vec& x, const Vec& xstar,
                                       const Rat& eps, const SamplingPlan& plan) {
  plan.validate();
  check_dim(x, field.dim, "base point");
  check_dim(xstar, field.dim, "dual point");
  if (eps.sign() < 0) throw InputError("eps must be nonnegative");
  const TimeValue tb = field.eval(x);
  if (!tb.finite) throw WrongRegimeError("minimal time is infinite at the base point");
  const auto samples = oracle_detail::quotient_samples(
      field, x, oracle_detail::tv_bounds(tb), oracle_detail::tail_radii(plan, 2),
      oracle_detail::unit_directions(field.dim, plan.directions));
  return oracle_detail::liminf_verdict(samples, xstar, eps, plan.tolerance);
}

// ---------------------------------------------------------------------------
// dual point clouds

struct DualCloud {
  std::vector<Vec> members;
  std::vector<Vec> uncertain;
  size_t scanned = 0;

  bool contains_member(const Vec& x) const {
    for (const Vec& m : members) {
      if (m == x) return true;
    }
    return false;
  }
};

namespace oracle_detail {

inline void dedup_insert(std::vector<Vec>& pool, std::map<std::string, bool>& seen,
                         const Vec& v) {
  if (seen.emplace(vec_str(v), true).second) pool.push_back(v);
}

}  // namespace oracle_detail

// Scans the dual grid (plus optional extra candidates) for sampled
// eps-subgradients of the field at x.
inline DualCloud sampled_frechet_subdiff(const TimeField& field, const Vec& x, const Rat& eps,
                                         const SamplingPlan& plan,
                                         const std::vector<Vec>& extra_candidates = {}) {
  plan.validate();
  check_dim(x, field.dim, "base point");
  if (eps.sign() < 0) throw InputError("eps must be nonnegative");
  const TimeValue tb = field.eval(x);
  if (!tb.finite) throw WrongRegimeError("minimal time is infinite at the base point");
  const auto samples = oracle_detail::quotient_samples(
      field, x, oracle_detail::tv_bounds(tb), oracle_detail::tail_radii(plan, 2),
      oracle_detail::unit_directions(field.dim, plan.directions));

  DualCloud cloud;
  std::map<std::string, bool> seen_m, seen_u;
  auto scan = [&](const Vec& cand) {
    check_dim(cand, field.dim, "dual candidate");
    ++cloud.scanned;
    const Verdict v = oracle_detail::liminf_verdict(samples, cand, eps, plan.tolerance);
    if (v == Verdict::member) {
      oracle_detail::dedup_insert(cloud.members, seen_m, cand);
    } else if (v == Verdict::uncertain) {
      oracle_detail::dedup_insert(cloud.uncertain, seen_u, cand);
    }
  };
  for (const Vec& g : oracle_detail::box_grid(field.dim, plan.grid_halfwidth, plan.grid_step)) {
    scan(g);
  }
  for (const Vec& c : extra_candidates) scan(c);
  return cloud;
}

namespace oracle_detail {

struct BasePoint {
  Vec point;
  Rat eps;                              // membership slack granted at this base
  std::vector<QuotientSample> samples;  // local quotients, radii ~ eps/64
};

// attentive: T(base) -> T(x); one_sided: additionally T(base) >= T(x), certified
enum class BaseFilter { attentive, one_sided };

// base points x_k -> x whose time values converge to T(x): points where T is
// infinite or jumps by more than 64 * radius are discarded, matching the
// convergence requirement in the limiting construction.
inline std::vector<BasePoint> admissible_bases(const TimeField& field, const Vec& x,
                                               const SamplingPlan& plan,
                                               BaseFilter filter = BaseFilter::attentive) {
  const TimeValue tb = field.eval(x);
  if (!tb.finite) throw WrongRegimeError("minimal time is infinite at the base point");
  const RatInterval t_base = tv_bounds(tb);
  const auto dirs = unit_directions(field.dim, plan.directions);
  const auto base_radii = tail_radii(plan, 2);

  std::vector<BasePoint> bases;
  // inner radii shrink quadratically in the base radius so that second-order
  // terms of a curved field stay far below the eps granted at the base.
  const Rat inner_scale(1, 64);
  {
    BasePoint self;
    self.point = x;
    self.eps = Rat(0);
    const Rat r0 = base_radii.back() * base_radii.back() * inner_scale;
    self.samples = quotient_samples(field, x, t_base, {r0}, dirs);
    bases.push_back(std::move(self));
  }
  for (const Rat& rho : base_radii) {
    for (const Vec& d : dirs) {
      const Vec b = add(x, scale(rho, d));
      const TimeValue t = field.eval(b);
      if (!t.finite) continue;
      const RatInterval tbv = tv_bounds(t);
      const Rat bound = Rat(64) * rho;
      if (tbv.hi - t_base.lo > bound || t_base.hi - tbv.lo > bound) continue;
      if (filter == BaseFilter::one_sided && tbv.lo < t_base.hi) continue;
      BasePoint bp;
      bp.point = b;
      bp.eps = rho;
      bp.samples = quotient_samples(field, b, tbv, {rho * rho * inner_scale}, dirs);
      bases.push_back(std::move(bp));
    }
  }
  return bases;
}

// central-difference gradient estimate at a base point, as an exact rational
// midpoint; empty when T is infinite at a stencil point.
inline std::optional<Vec> gradient_estimate(const TimeField& field, const Vec& b, const Rat& h) {
  Vec g(b.size());
  for (size_t i = 0; i < b.size(); ++i) {
    Vec hi = b, lo = b;
    hi[i] += h;
    lo[i] -= h;
    const TimeValue tp = field.eval(hi);
    const TimeValue tm = field.eval(lo);
    if (!tp.finite || !tm.finite) return std::nullopt;
    const RatInterval bp = tv_bounds(tp);
    const RatInterval bm = tv_bounds(tm);
    g[i] = (bp.lo + bp.hi - bm.lo - bm.hi) / (Rat(4) * h);
  }
  return g;
}

// limit candidates (grid points plus local gradient estimates) that pass the
// eps_k-subgradient test at some base point.
inline DualCloud member_cloud(const TimeField& field, const std::vector<BasePoint>& bases,
                              const SamplingPlan& plan) {
  std::vector<Vec> candidates = box_grid(field.dim, plan.grid_halfwidth, plan.grid_step);
  {
    std::map<std::string, bool> seen;
    for (const Vec& g : candidates) seen.emplace(vec_str(g), true);
    for (const auto& b : bases) {
      const Rat h = (b.eps.is_zero() ? plan.radii.back() : b.eps) / Rat(64);
      const auto est = gradient_estimate(field, b.point, h);
      if (est && seen.emplace(vec_str(*est), true).second) candidates.push_back(*est);
    }
  }

  DualCloud cloud;
  cloud.scanned = candidates.size();
  std::map<std::string, bool> seen_m, seen_u;
  for (const Vec& cand : candidates) {
    Verdict best = Verdict::non_member;
    for (const auto& b : bases) {
      const Verdict v = liminf_verdict(b.samples, cand, b.eps, plan.tolerance);
      if (v == Verdict::member) {
        best = v;
        break;
      }
      if (v == Verdict::uncertain) best = v;
    }
    if (best == Verdict::member) {
      dedup_insert(cloud.members, seen_m, cand);
    } else if (best == Verdict::uncertain) {
      dedup_insert(cloud.uncertain, seen_u, cand);
    }
  }
  return cloud;
}

// scaled-to-zero limits of eps_k-subgradients: grid members sitting on the grid
// boundary witness unbounded dual rays; their shrinking multiples populate the
// cloud, which always contains the origin.
inline DualCloud ray_cloud(size_t dim, const std::vector<BasePoint>& bases,
                           const SamplingPlan& plan) {
  const auto grid = box_grid(dim, plan.grid_halfwidth, plan.grid_step);

  auto on_boundary = [&](const Vec& y) {
    for (const Rat& c : y) {
      if (abs(c) == plan.grid_halfwidth) return true;
    }
    return false;
  };

  DualCloud cloud;
  cloud.scanned = grid.size();
  std::map<std::string, bool> seen;
  dedup_insert(cloud.members, seen, zero_vec(dim));
  for (const Vec& cand : grid) {
    if (!on_boundary(cand)) continue;
    bool hit = false;
    for (const auto& b : bases) {
      if (liminf_verdict(b.samples, cand, b.eps, plan.tolerance) != Verdict::member) continue;
      // the escape must persist along the whole ray: scaled-up multiples have
      // to stay members at the same base, otherwise the candidate merely
      // grazes a bounded bulge of the dual set and witnesses no recession
      bool persists = true;
      for (const Rat& tau : {Rat(4), Rat(16), Rat(64)}) {
        if (liminf_verdict(b.samples, scale(tau, cand), b.eps, plan.tolerance) !=
            Verdict::member) {
          persists = false;
          break;
        }
      }
      if (persists) {
        hit = true;
        break;
      }
    }
    if (!hit) continue;
    Rat lambda(1);
    for (int j = 0; j <= 6; ++j) {
      dedup_insert(cloud.members, seen, scale(lambda, cand));
      lambda /= Rat(2);
    }
  }
  return cloud;
}

}  // namespace oracle_detail

// Sampled limiting subdifferential: dual candidates that pass the
// eps_k-subgradient test at some admissible base point x_k -> x, with eps_k
// tied to the base radius.
inline DualCloud sampled_limiting_subdiff(const TimeField& field, const Vec& x,
                                          const SamplingPlan& plan) {
  plan.validate();
  check_dim(x, field.dim, "base point");
  return oracle_detail::member_cloud(field, oracle_detail::admissible_bases(field, x, plan),
                                     plan);
}

// Sampled singular subdifferential: scaled-to-zero limits of eps_k-subgradients
// along admissible bases.
inline DualCloud sampled_singular_subdiff(const TimeField& field, const Vec& x,
                                          const SamplingPlan& plan) {
  plan.validate();
  check_dim(x, field.dim, "base point");
  return oracle_detail::ray_cloud(field.dim,
                                  oracle_detail::admissible_bases(field, x, plan), plan);
}

// Sampled eps-normals to a target union at one of its points: grid duals whose
// sampled sup of <x*, x - xbar>/|x - xbar| over target points near xbar stays
// at or below eps.
namespace oracle_detail {

// directions along which the target is still locally present at x
inline std::vector<Vec> normal_probe_dirs(const PolyhedralUnion& target, const Vec& x,
                                          const SamplingPlan& plan) {
  check_dim(x, target.dim, "base point");
  if (!target.contains(x)) throw WrongRegimeError("eps-normals are sampled at target points");
  const auto dirs = unit_directions(target.dim, plan.directions);
  std::vector<Vec> kept;
  for (const Rat& rho : tail_radii(plan, 2)) {
    for (const Vec& d : dirs) {
      if (target.contains(add(x, scale(rho, d)))) kept.push_back(d);
    }
  }
  return kept;
}

// limsup of <x*, u - x>/|u - x| over sampled u in the target must stay <= eps
inline Verdict normal_verdict(const std::vector<Vec>& kept, const Vec& xstar, const Rat& eps,
                              const Rat& tol) {
  bool band = false;
  for (const Vec& d : kept) {
    const Rat s = dot(xstar, d);
    if (s > eps + tol) return Verdict::non_member;
    if (s > eps) band = true;
  }
  return band ? Verdict::uncertain : Verdict::member;
}

}  // namespace oracle_detail

// Sampled test of a single dual vector against the eps-normal inequality at a
// target point. member: every sampled target direction satisfies it; uncertain:
// a violation within tolerance was seen.
inline Verdict sampled_eps_normal(const PolyhedralUnion& target, const Vec& x, const Vec& xstar,
                                  const Rat& eps, const SamplingPlan& plan) {
  plan.validate();
  check_dim(xstar, target.dim, "dual vector");
  if (eps.sign() < 0) throw InputError("eps must be nonnegative");
  return oracle_detail::normal_verdict(oracle_detail::normal_probe_dirs(target, x, plan), xstar,
                                       eps, plan.tolerance);
}

inline DualCloud sampled_eps_normals(const PolyhedralUnion& target, const Vec& x, const Rat& eps,
                                     const SamplingPlan& plan) {
  plan.validate();
  if (eps.sign() < 0) throw InputError("eps must be nonnegative");
  const auto kept = oracle_detail::normal_probe_dirs(target, x, plan);

  DualCloud cloud;
  std::map<std::string, bool> seen_m, seen_u;
  for (const Vec& cand :
       oracle_detail::box_grid(target.dim, plan.grid_halfwidth, plan.grid_step)) {
    ++cloud.scanned;
    const Verdict v = oracle_detail::normal_verdict(kept, cand, eps, plan.tolerance);
    if (v == Verdict::non_member) continue;
    if (v == Verdict::uncertain) {
      oracle_detail::dedup_insert(cloud.uncertain, seen_u, cand);
    } else {
      oracle_detail::dedup_insert(cloud.members, seen_m, cand);
    }
  }
  return cloud;
}

// ---------------------------------------------------------------------------
// calmness probe

struct CalmnessEstimate {
  Rat kappa_hat;           // upper bound for every sampled quotient (doubled for margin)
  bool certified = false;  // all quotients finite with enclosure width inside tolerance
  Rat window;              // sampling window radius around the probe point
};

struct CalmnessProbe {
  CalmnessEstimate estimate;
  bool lipschitz = false;       // no divergence seen at the smallest radii
  bool divergent = false;       // quotients blow past the divergence threshold
  std::vector<Rat> max_quotients;  // per sampled radius, upper bounds; -1 = inf seen
};

// Difference quotients in a shrinking window around the probe point, two tiers:
// quotients anchored at the point itself (calmness) and quotients between pairs
// of nearby points at separation rho^2 (local Lipschitz continuity; a jump
// along a slab through the probe point is invisible to anchored quotients).
// Divergence is declared when the two smallest radii both see a quotient above
// 1000 or a finite point with an infinite neighbor.
inline CalmnessProbe calmness_probe(const TimeField& field, const Vec& x,
                                    const SamplingPlan& plan, const Rat& window = Rat(1, 4)) {
  plan.validate();
  check_dim(x, field.dim, "probe point");
  if (window.sign() <= 0) throw InputError("probe window must be positive");
  const TimeValue tb = field.eval(x);
  if (!tb.finite) throw WrongRegimeError("minimal time is infinite at the probe point");
  const RatInterval t_base = oracle_detail::tv_bounds(tb);
  const auto dirs = oracle_detail::unit_directions(field.dim, plan.directions);

  std::vector<Rat> radii;
  for (const Rat& r : plan.radii) {
    if (r <= window) radii.push_back(r);
  }
  if (radii.size() < 2) throw InputError("probe window admits fewer than two radii");

  CalmnessProbe probe;
  probe.estimate.window = window;
  const Rat divergence_threshold(1000);
  std::vector<bool> diverged(radii.size(), false);
  Rat max_width(0);
  Rat kmax(0);

  // upper quotient bound of |T(a) - T(near b)| over the separation, or nullopt
  // when T(a) is infinite; flags divergence on a conclusive blow-up.
  auto pair_quotient = [&](const Vec& a, const RatInterval& t_b, const Rat& sep,
                           bool& diverged_flag) -> std::optional<Rat> {
    const TimeValue t = field.eval(a);
    if (!t.finite) {
      diverged_flag = true;
      return std::nullopt;
    }
    const RatInterval b = oracle_detail::tv_bounds(t);
    const Rat w = (b.hi - b.lo) / sep;
    if (w > max_width) max_width = w;
    const Rat qhi = max(abs(b.hi - t_b.lo), abs(b.lo - t_b.hi)) / sep;
    if (qhi > kmax) kmax = qhi;
    const Rat qlo = [&] {
      if (b.lo > t_b.hi) return (b.lo - t_b.hi) / sep;
      if (t_b.lo > b.hi) return (t_b.lo - b.hi) / sep;
      return Rat(0);
    }();
    if (qlo > divergence_threshold) diverged_flag = true;
    return qhi;
  };

  for (size_t i = 0; i < radii.size(); ++i) {
    const Rat& rho = radii[i];
    bool inf_seen = false;
    Rat mq(0);
    for (const Vec& d : dirs) {
      bool div = false;
      const auto q = pair_quotient(add(x, scale(rho, d)), t_base, rho, div);
      if (!q) {
        inf_seen = true;
      } else if (*q > mq) {
        mq = *q;
      }
      if (div) diverged[i] = true;
    }
    if (inf_seen) {
      diverged[i] = true;
      probe.max_quotients.push_back(Rat(-1));
    } else {
      probe.max_quotients.push_back(mq);
    }
  }

  // pairwise tier at the two smallest radii: base points off the anchor, probed
  // at separation rho^2 so slab jumps produce quotients of order 1/rho.
  for (size_t i = radii.size() - 2; i < radii.size(); ++i) {
    const Rat& rho = radii[i];
    const Rat sep = rho * rho;
    for (const Vec& d : dirs) {
      const Vec base = add(x, scale(rho, d));
      const TimeValue t = field.eval(base);
      if (!t.finite) continue;  // anchored tier already flagged this radius
      const RatInterval t_b = oracle_detail::tv_bounds(t);
      for (const Vec& e : dirs) {
        bool div = false;
        pair_quotient(add(base, scale(sep, e)), t_b, sep, div);
        if (div) diverged[i] = true;
      }
    }
  }

  const size_t n = radii.size();
  probe.divergent = diverged[n - 1] && diverged[n - 2];
  probe.lipschitz = !probe.divergent;
  probe.estimate.kappa_hat = probe.lipschitz ? Rat(2) * kmax : Rat(0);
  bool any_inf = false;
  for (const Rat& q : probe.max_quotients) {
    if (q.sign() < 0) any_inf = true;
  }
  probe.estimate.certified =
      probe.lipschitz && !any_inf && max_width <= plan.tolerance;
  return probe;
}

// ---------------------------------------------------------------------------
// one-sided subdifferentials

struct OneSidedClouds {
  DualCloud basic;
  DualCloud singular;
};

// Sampled one-sided subdifferentials: limits of eps_k-subgradients along base
// points x_k -> x restricted to T(x_k) >= T(x). Only meaningful where the
// sampled function has no divergent difference quotients; a divergent calmness
// probe aborts the computation.
inline OneSidedClouds one_sided_subdiff_sampled(const TimeField& field, const Vec& x,
                                                const SamplingPlan& plan) {
  plan.validate();
  check_dim(x, field.dim, "base point");
  if (calmness_probe(field, x, plan).divergent) {
    throw WrongRegimeError("one-sided subdifferentials need bounded difference quotients");
  }
  const auto bases =
      oracle_detail::admissible_bases(field, x, plan, oracle_detail::BaseFilter::one_sided);
  OneSidedClouds out;
  out.basic = oracle_detail::member_cloud(field, bases, plan);
  out.singular = oracle_detail::ray_cloud(field.dim, bases, plan);
  return out;
}

// ---------------------------------------------------------------------------
// definitional convex check

// Global subgradient inequality T(y) >= T(x) + <xstar, y - x> tested exactly at
// target vertices and a coarse integer-lattice sweep. Only meaningful when the
// field is convex; callers assert convexity separately.
inline bool definitional_convex_subgradient_check(const Dynamics& f,
                                                  const PolyhedralUnion& target, const Vec& x,
                                                  const Vec& xstar, const Rat& halfwidth = Rat(6),
                                                  const Rat& step = Rat(1, 2)) {
  check_dim(x, target.dim, "base point");
  check_dim(xstar, target.dim, "dual point");
  const TimeValue tb = minimal_time(f, target, x).time;
  if (!tb.finite) throw WrongRegimeError("minimal time is infinite at the base point");
  if (!tb.exact) throw WrongRegimeError("definitional check needs exact time values");

  auto holds_at = [&](const Vec& y) {
    const TimeValue t = minimal_time(f, target, y).time;
    if (!t.finite) return true;  // infinite left side satisfies any bound
    if (!t.exact) throw WrongRegimeError("definitional check needs exact time values");
    return t.value >= tb.value + dot(xstar, sub(y, x));
  };

  for (const Vec& g : oracle_detail::box_grid(target.dim, halfwidth, step)) {
    if (!holds_at(add(x, g))) return false;
    if (!holds_at(g)) return false;
  }
  return true;
}

}  // namespace mintime

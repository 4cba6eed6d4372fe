#pragma once

#include <cctype>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mintime/normal_cone.hpp"
#include "mintime/oracle.hpp"
#include "mintime/scene.hpp"
#include "mintime/set_algebra.hpp"
#include "mintime/subdiff.hpp"
#include "mintime/subdiff_eps.hpp"
#include "mintime/support_sets.hpp"

// Verification suites: every check recomputes a published relation or golden
// value through an independent path and records pass/fail with a witness.
// Tags are stable catalogue ids (suite/check); a selector picks checks by tag
// or by any tag segment, and the empty selector picks nothing.

namespace mintime {

struct CheckResult {
  std::string tag;
  bool pass = true;
  bool expected_violation = false;  // a deliberately witnessed violation counts as pass
  std::string detail;
};

struct VerifyRun {
  std::vector<CheckResult> checks;
  size_t notes = 0;  // non-fatal observations folded into passing checks

  size_t failures() const {
    size_t n = 0;
    for (const auto& c : checks) {
      if (!c.pass) ++n;
    }
    return n;
  }
  bool ok() const { return failures() == 0; }
};

class SuiteSelector {
 public:
  explicit SuiteSelector(const std::string& csv) {
    std::istringstream in(csv);
    std::string part;
    while (std::getline(in, part, ',')) {
      std::string w;
      for (char c : part) {
        if (!std::isspace(static_cast<unsigned char>(c))) w += c;
      }
      if (!w.empty()) tokens_.push_back(w);
    }
  }

  bool none() const { return tokens_.empty(); }

  // a token selects a tag when it is "all", the whole tag, or one of the
  // slash-separated tag segments
  bool wants(const std::string& tag) const {
    for (const auto& t : tokens_) {
      if (t == "all" || t == tag) return true;
      size_t start = 0;
      while (start <= tag.size()) {
        const size_t slash = tag.find('/', start);
        const std::string seg = tag.substr(start, slash == std::string::npos ? std::string::npos
                                                                             : slash - start);
        if (seg == t) return true;
        if (slash == std::string::npos) break;
        start = slash + 1;
      }
    }
    return false;
  }

 private:
  std::vector<std::string> tokens_;
};

inline Report verify_report(const VerifyRun& run, const std::string& scene_label) {
  Report rep;
  rep.command = "verify";
  rep.scene = scene_label;
  size_t expected = 0;
  for (const auto& c : run.checks) {
    Json e;
    e["tag"] = c.tag;
    e["status"] = c.pass ? (c.expected_violation ? "expected-violation" : "pass") : "fail";
    e["detail"] = c.detail;
    rep.results.push_back(e);
    if (c.expected_violation) ++expected;
  }
  rep.summary["checks"] = run.checks.size();
  rep.summary["failed"] = run.failures();
  rep.summary["expected_violations"] = expected;
  rep.summary["notes"] = run.notes;
  rep.summary["ok"] = run.ok();
  return rep;
}

namespace verify_detail {

struct Ctx {
  const SuiteSelector& sel;
  VerifyRun& run;

  bool wants(const std::string& tag) const { return sel.wants(tag); }
  void add(std::string tag, bool pass, std::string detail, bool expected = false) {
    run.checks.push_back({std::move(tag), pass, expected, std::move(detail)});
  }
};

// --- small geometry builders -------------------------------------------------

inline HPolyhedron hull_of(size_t dim, std::vector<Vec> pts) {
  return facets_of_polytope(VPolytope(dim, std::move(pts)));
}

inline HPolyhedron point_set(const Vec& p) {
  HPolyhedron out(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    Vec e = zero_vec(p.size());
    e[i] = Rat(1);
    out.add(e, p[i]);
    out.add(negate(e), -p[i]);
  }
  return out;
}

// the planar ray {t d : t >= 0}
inline HPolyhedron ray_set(const Vec& d) {
  if (d.size() != 2) throw InputError("ray_set is planar");
  HPolyhedron out(2);
  const Vec n{-d[1], d[0]};
  out.add(n, Rat(0));
  out.add(negate(n), Rat(0));
  out.add(negate(d), Rat(0));
  return out;
}

inline PolyhedralUnion u1(HPolyhedron p) {
  PolyhedralUnion u(p.dim);
  u.pieces.push_back(std::move(p));
  return u;
}

inline bool contains_slack(const PolyhedralUnion& u, const Vec& x, const Rat& tol) {
  for (const auto& piece : u.pieces) {
    bool ok = true;
    for (const auto& h : piece.faces) {
      if (dot(h.normal, x) > h.offset + tol) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

inline PolyhedralUnion scale_union(const PolyhedralUnion& u, const Rat& c) {
  if (c.sign() <= 0) throw InputError("scale_union wants a positive factor");
  PolyhedralUnion out(u.dim);
  for (const auto& piece : u.pieces) {
    HPolyhedron q(piece.dim);
    for (const auto& h : piece.faces) q.add(h.normal, h.offset * c);
    out.pieces.push_back(std::move(q));
  }
  return out;
}

inline Dynamics scale_dynamics(const Dynamics& f, const Rat& c) {
  std::vector<Vec> vs;
  for (const auto& v : f.vertices().vertices) vs.push_back(scale(c, v));
  return Dynamics::polytope(VPolytope(f.dim(), std::move(vs)));
}

// --- deterministic random scenes ----------------------------------------------

inline int rint(std::mt19937& rng, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(rng);
}

inline Vec rpt2(std::mt19937& rng, int lo, int hi, int den) {
  return Vec{Rat(rint(rng, lo, hi), den), Rat(rint(rng, lo, hi), den)};
}

inline HPolyhedron random_convex_piece(std::mt19937& rng) {
  const int n = rint(rng, 4, 6);
  std::vector<Vec> pts;
  std::set<std::string> seen;
  for (int i = 0; i < n; ++i) {
    Vec p = rpt2(rng, -12, 12, 4);
    if (seen.insert(vec_str(p)).second) pts.push_back(std::move(p));
  }
  return hull_of(2, std::move(pts));
}

// random polytope dynamics; with_origin puts 0 strictly inside
inline Dynamics random_dynamics(std::mt19937& rng, bool with_origin) {
  std::vector<Vec> pts;
  std::set<std::string> seen;
  const int n = rint(rng, 3, 5);
  for (int i = 0; i < n; ++i) {
    Vec p = with_origin ? rpt2(rng, -8, 8, 4) : Vec{Rat(rint(rng, 1, 8), 4), Rat(rint(rng, -8, 8), 4)};
    if (seen.insert(vec_str(p)).second) pts.push_back(std::move(p));
  }
  if (with_origin) {
    for (const Vec& e : {Vec{Rat(1, 2), Rat(0)}, Vec{Rat(-1, 2), Rat(0)}, Vec{Rat(0), Rat(1, 2)},
                         Vec{Rat(0), Rat(-1, 2)}}) {
      if (seen.insert(vec_str(e)).second) pts.push_back(e);
    }
  }
  return Dynamics::polytope(VPolytope(2, std::move(pts)));
}

// --- exact definitional subgradient oracle ------------------------------------

// minimal time precomputed over a probe set around x; the subgradient
// inequality against these probes rejects exactly and accepts up to the
// probe resolution
struct ProbedField {
  Vec x;
  Rat tx;
  std::vector<Vec> ys;
  std::vector<Rat> ts;
};

inline ProbedField probe_field(const Dynamics& f, const PolyhedralUnion& target, const Vec& x) {
  const MinTimeResult at_x = minimal_time(f, target, x);
  if (!at_x.time.finite) throw WrongRegimeError("probe field needs finite time at the base point");
  ProbedField pf;
  pf.x = x;
  pf.tx = at_x.time.value;

  std::vector<Vec> probes = oracle_detail::box_grid(target.dim, Rat(3), Rat(1, 2));
  for (const auto& piece : target.pieces) {
    for (const auto& v : polyhedron_generators(piece).points) probes.push_back(v);
  }
  for (const auto& v : f.vertices().vertices) {
    for (const Rat& t : {Rat(1, 2), Rat(1), Rat(2)}) probes.push_back(sub(x, scale(t, v)));
  }
  for (const auto& d : oracle_detail::unit_directions(target.dim, 16)) {
    for (const Rat& t : {Rat(1, 4), Rat(1)}) probes.push_back(add(x, scale(t, d)));
  }

  std::set<std::string> seen;
  for (auto& y : probes) {
    if (!seen.insert(vec_str(y)).second) continue;
    const MinTimeResult ty = minimal_time(f, target, y);
    if (!ty.time.finite) continue;  // the subgradient inequality is vacuous there
    pf.ys.push_back(y);
    pf.ts.push_back(ty.time.value);
  }
  return pf;
}

inline bool definitional_ok(const ProbedField& pf, const Vec& xstar) {
  for (size_t i = 0; i < pf.ys.size(); ++i) {
    if (dot(xstar, sub(pf.ys[i], pf.x)) > pf.ts[i] - pf.tx) return false;
  }
  return true;
}

// generator samples of a polyhedral union: vertices plus two points out along
// every ray and line
inline std::vector<Vec> set_samples(const PolyhedralUnion& u) {
  std::vector<Vec> out;
  std::set<std::string> seen;
  auto push = [&](const Vec& v) {
    if (seen.insert(vec_str(v)).second) out.push_back(v);
  };
  for (const auto& piece : u.pieces) {
    const Generators g = polyhedron_generators(piece);
    for (const auto& p : g.points) {
      push(p);
      for (const auto& r : g.rays) {
        push(add(p, r));
        push(add(p, scale(Rat(4), r)));
      }
      for (const auto& l : g.lines) {
        push(add(p, l));
        push(sub(p, l));
        push(add(p, scale(Rat(4), l)));
        push(sub(p, scale(Rat(4), l)));
      }
    }
  }
  return out;
}

inline bool cloud_within(const DualCloud& cloud, const PolyhedralUnion& set, const Rat& tol,
                         std::string* witness) {
  for (const auto& m : cloud.members) {
    if (!contains_slack(set, m, tol)) {
      if (witness) *witness = vec_str(m);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// golden-value suites

inline void golden_53(Ctx& ctx, const Scene& scene) {
  const Dynamics f = scene.dynamics();
  const PolyhedralUnion& omega = scene.target;
  const Vec half{Rat(1, 2), Rat(1, 2)};
  const Vec corner{Rat(1), Rat(0)};
  const Vec top{Rat(0), Rat(1)};

  if (ctx.wants("golden-5.3/time")) {
    const MinTimeResult mid = minimal_time(f, omega, half);
    const MinTimeResult hole = minimal_time(f, omega, Vec{Rat(0), Rat(0)});
    const bool ok = mid.time.finite && mid.time.value == Rat(1, 2) && hole.time.finite &&
                    hole.time.value == Rat(1);
    ctx.add("golden-5.3/time", ok, "T(1/2,1/2) = 1/2 and T(0,0) = 1");
  }
  if (ctx.wants("golden-5.3/basic")) {
    const bool at_corner = union_equals(
        basic_subdiff_inset(f, omega, corner).set,
        u1(hull_of(2, {Vec{Rat(-1), Rat(0)}, Vec{Rat(0), Rat(0)}})));
    const bool at_top =
        union_equals(basic_subdiff_inset(f, omega, top).set, u1(ray_set(Vec{Rat(0), Rat(-1)})));
    ctx.add("golden-5.3/basic", at_corner && at_top,
            "segment [-1,0]x{0} at (1,0); the downward ray at (0,1)");
  }
  if (ctx.wants("golden-5.3/singular")) {
    const bool at_corner = union_equals(singular_subdiff_inset(f, omega, corner).set,
                                        u1(point_set(Vec{Rat(0), Rat(0)})));
    const bool at_top =
        union_equals(singular_subdiff_inset(f, omega, top).set, u1(ray_set(Vec{Rat(0), Rat(-1)})));
    ctx.add("golden-5.3/singular", at_corner && at_top,
            "{0} at (1,0); the downward ray at (0,1)");
  }
}

inline void golden_64(Ctx& ctx, const Scene& scene) {
  const Dynamics f = scene.dynamics();
  const PolyhedralUnion& omega = scene.target;
  const Vec z{Rat(1, 2), Rat(1, 2)};
  const Vec w{Rat(1), Rat(1, 2)};

  if (ctx.wants("golden-6.4/projection")) {
    const ProjectionSet ps = projection_set(f, omega, z);
    const bool ok = union_equals(ps.pieces, u1(point_set(w))) && ps.witness_point == w;
    ctx.add("golden-6.4/projection", ok, "projection of (1/2,1/2) is the singleton (1,1/2)");
  }
  const OutsetProjection op = subdiff_outset_via_projection(f, omega, z);
  if (ctx.wants("golden-6.4/basic")) {
    const bool set_ok = union_equals(op.basic.set, u1(point_set(Vec{Rat(-1), Rat(0)})));
    const Verdict tight = sampled_eps_subgradient(scene.field(), z, Vec{Rat(-1), Rat(0)}, Rat(0),
                                                  SamplingPlan::defaults());
    ctx.add("golden-6.4/basic", set_ok && tight == Verdict::member,
            std::string("{(-1,0)}; upper estimate with witnessed tightness (flag: ") +
                exactness_str(op.basic.exactness) + ")");
  }
  if (ctx.wants("golden-6.4/singular")) {
    ctx.add("golden-6.4/singular",
            union_equals(op.singular.set, u1(point_set(Vec{Rat(0), Rat(0)}))), "{0}");
  }
}

inline void golden_74(Ctx& ctx, const Scene& scene) {
  const Dynamics f = scene.dynamics();
  const PolyhedralUnion& omega = scene.target;
  const Vec edge{Rat(1), Rat(0)};
  const Vec top{Rat(0), Rat(1)};
  const Vec out{Rat(2), Rat(1, 2)};

  if (ctx.wants("golden-7.4/time")) {
    const bool zero = minimal_time(f, omega, edge).time.value.is_zero();
    const MinTimeResult band = minimal_time(f, omega, out);
    const bool unreachable = !minimal_time(f, omega, Vec{Rat(0), Rat(2)}).time.finite;
    ctx.add("golden-7.4/time", zero && band.time.finite && band.time.value == Rat(1) && unreachable,
            "T = 0 on the box, 1 at (2,1/2), infinite at (0,2)");
  }
  if (ctx.wants("golden-7.4/basic")) {
    const bool at_edge = union_equals(
        basic_subdiff_inset(f, omega, edge).set,
        u1(hull_of(2, {Vec{Rat(0), Rat(0)}, Vec{Rat(1), Rat(0)}})));
    const bool at_top =
        union_equals(basic_subdiff_inset(f, omega, top).set, u1(ray_set(Vec{Rat(0), Rat(1)})));
    ctx.add("golden-7.4/basic", at_edge && at_top,
            "segment [0,1]x{0} at (1,0); the upward ray at (0,1)");
  }
  if (ctx.wants("golden-7.4/singular")) {
    const bool at_edge = union_equals(singular_subdiff_inset(f, omega, edge).set,
                                      u1(point_set(Vec{Rat(0), Rat(0)})));
    const bool at_top =
        union_equals(singular_subdiff_inset(f, omega, top).set, u1(ray_set(Vec{Rat(0), Rat(1)})));
    ctx.add("golden-7.4/singular", at_edge && at_top, "{0} at (1,0); the upward ray at (0,1)");
  }
  if (ctx.wants("golden-7.4/outset")) {
    const OutsetProjection op = subdiff_outset_via_projection(f, omega, out);
    const ProjectionSet ps = projection_set(f, omega, out);
    const OutsetEnlargement en = subdiff_outset_via_enlargement(f, omega, out);
    const bool ok = union_equals(op.basic.set, u1(point_set(Vec{Rat(1), Rat(0)}))) &&
                    union_equals(op.singular.set, u1(point_set(Vec{Rat(0), Rat(0)}))) &&
                    union_equals(ps.pieces, u1(point_set(Vec{Rat(1), Rat(1, 2)}))) &&
                    union_equals(en.convex_exact_basic.set, u1(point_set(Vec{Rat(1), Rat(0)}))) &&
                    union_equals(en.convex_exact_singular.set, u1(point_set(Vec{Rat(0), Rat(0)})));
    ctx.add("golden-7.4/outset", ok,
            "at (2,1/2): projection {(1,1/2)}, basic {(1,0)}, singular {0}, both formulas agree");
  }
}

// ---------------------------------------------------------------------------
// curved counterexample suite

inline void counterexample_6(Ctx& ctx, const Scene& scene) {
  const TimeField field = scene.field();
  const Vec origin = zero_vec(2);
  const Rat r = scene.options.r.value_or(Rat(1));

  if (ctx.wants("counterexample-6/enlargement-normal-cone")) {
    // closed form: the r-enlargement is { |x| >= hole - r*speed }, the whole
    // plane once hole - r*speed <= 0; then the normal cone at the origin is {0}
    bool ok = scene.hole_radius - r * scene.dynamics_radius <= Rat(0);
    for (const auto& d : oracle_detail::unit_directions(2, 16)) {
      const TimeValue t = field.eval(scale(Rat(3, 2), d));
      ok = ok && t.finite && oracle_detail::tv_bounds(t).hi <= r;
      const TimeValue near = field.eval(scale(Rat(1, 4), d));
      ok = ok && near.finite && oracle_detail::tv_bounds(near).hi <= r;
    }
    ctx.add("counterexample-6/enlargement-normal-cone", ok,
            "the 1-enlargement covers the plane (sampled ring confirms), so its normal cone "
            "at the origin is {0}");
  }

  if (ctx.wants("counterexample-6/limiting-cloud")) {
    const DualCloud cloud = sampled_limiting_subdiff(field, origin, SamplingPlan::defaults());
    const Rat lo = (Rat(1) - Rat(1, 1000)) * (Rat(1) - Rat(1, 1000));
    const Rat hi = (Rat(1) + Rat(1, 1000)) * (Rat(1) + Rat(1, 1000));
    bool ring = !cloud.members.empty();
    for (const auto& m : cloud.members) {
      const Rat ns = norm_sq(m);
      ring = ring && ns >= lo && ns <= hi;
    }
    const auto dirs = oracle_detail::unit_directions(2, 64);
    const Rat close = Rat(1) - Rat(1, 500000);  // cos^2 within ~2e-6 of aligned
    size_t covered = 0;
    for (const auto& d : dirs) {
      for (const auto& m : cloud.members) {
        const Rat dp = dot(m, d);
        if (dp.sign() > 0 && dp * dp >= close * norm_sq(m)) {
          ++covered;
          break;
        }
      }
    }
    ctx.add("counterexample-6/limiting-cloud", ring && covered >= 64,
            "all " + std::to_string(cloud.members.size()) +
                " sampled limits sit within 1e-3 of the unit circle, covering " +
                std::to_string(covered) + " directions");
  }

  if (ctx.wants("counterexample-6/one-sided")) {
    const OneSidedClouds one = one_sided_subdiff_sampled(field, origin, SamplingPlan::defaults(2, 12, 32));
    const bool ok = one.basic.members.empty() && one.singular.members.size() == 1 &&
                    one.singular.members[0] == origin;
    ctx.add("counterexample-6/one-sided", ok,
            "one-sided basic cloud is empty and the one-sided singular cloud is {0}");
  }
}

// ---------------------------------------------------------------------------
// identity-check suite

struct Sec3Tally {
  size_t checked = 0;
  size_t failed = 0;
  std::string first;

  void feed(bool ok, const std::string& witness) {
    ++checked;
    if (!ok) {
      ++failed;
      if (first.empty()) first = witness;
    }
  }
  std::string summary(const std::string& label) const {
    std::string s = label + ": " + std::to_string(checked) + " checks";
    if (failed) s += ", " + std::to_string(failed) + " failed (first: " + first + ")";
    return s;
  }
};

// the relation battery on one polyhedral scene with exact rational times
inline void sec3_identities(Ctx& ctx, const std::string& label, const Dynamics& f,
                            const PolyhedralUnion& omega, const std::vector<Vec>& pts,
                            Sec3Tally* tally /* 7 slots or null for per-scene entries */) {
  Sec3Tally local[7];
  Sec3Tally* t = tally != nullptr ? tally : local;

  const bool want31 = ctx.wants("sec3/prop-3.1");
  const bool want32 = ctx.wants("sec3/prop-3.2");
  const bool want33 = ctx.wants("sec3/prop-3.3");
  const bool want34 = ctx.wants("sec3/prop-3.4");
  const bool want35 = ctx.wants("sec3/prop-3.5");
  if (!(want31 || want32 || want33 || want34 || want35)) return;

  const Rat r(1, 2);
  for (const Vec& x : pts) {
    const MinTimeResult mt = minimal_time(f, omega, x);

    if (want33) t[2].feed(gauge_representation_check(f, omega, x), label + " at " + vec_str(x));

    if (want31 && mt.time.finite) {
      const auto res = enlargement_identity_check(f, omega, r, x);
      if (res.has_value()) t[0].feed(*res, label + " at " + vec_str(x));
    }

    if (want32 && in_enlargement(f, omega, r, x)) {
      for (const auto& q : f.vertices().vertices) {
        for (const Rat& dur : {Rat(1, 2), Rat(2)}) {
          t[1].feed(shifted_argument_check(f, omega, r, x, dur, q),
                    label + " at " + vec_str(x) + " q=" + vec_str(q));
        }
      }
    }

    if (want34 && mt.time.finite && mt.time.value.sign() > 0) {
      const ProjectionSet ps = projection_set(f, omega, x);
      for (const Rat& lam : {Rat(1, 4), Rat(1, 2), Rat(3, 4)}) {
        t[3].feed(projection_linearity_check(f, omega, x, ps.witness_point, lam),
                  label + " at " + vec_str(x) + " lambda=" + lam.str());
      }
    }

    if (want35) {
      // sampled lower semicontinuity: values just off x cannot undershoot
      // T(x) faster than the admissibility bound allows
      const Rat rho(1, 256);
      bool ok = true;
      if (mt.time.finite) {
        for (const auto& d : oracle_detail::unit_directions(omega.dim, 16)) {
          const MinTimeResult near = minimal_time(f, omega, add(x, scale(rho, d)));
          if (near.time.finite && near.time.value < mt.time.value - Rat(64) * rho) ok = false;
        }
      }
      t[4].feed(ok, label + " at " + vec_str(x));
    }
  }

  if (tally == nullptr) {
    const char* tags[5] = {"sec3/prop-3.1", "sec3/prop-3.2", "sec3/prop-3.3", "sec3/prop-3.4",
                           "sec3/prop-3.5"};
    for (int i = 0; i < 5; ++i) {
      if (local[i].checked == 0) continue;
      ctx.add(tags[i], local[i].failed == 0, local[i].summary(label));
    }
  }
}

inline std::vector<Vec> scene_probe_points(const Dynamics& f, const PolyhedralUnion& omega,
                                           const std::vector<Vec>& base, std::mt19937& rng) {
  std::vector<Vec> pts = base;
  const Generators g = polyhedron_generators(omega.pieces.front());
  if (!g.points.empty()) {
    pts.push_back(g.points.front());
    pts.push_back(sub(g.points.front(), f.vertices().vertices.front()));  // reachable by design
  }
  pts.push_back(rpt2(rng, -10, 10, 4));
  return pts;
}

inline void sec3_fixture(Ctx& ctx, const Scene& scene) {
  if (scene.target_kind != TargetKind::polyhedral || scene.dynamics_kind != DynamicsKind::polytope) {
    return;
  }
  const Dynamics f = scene.dynamics();
  sec3_identities(ctx, scene.name, f, scene.target, scene.points, nullptr);

  if (scene.dim != 2) return;
  const bool convex = scene.target.pieces.size() == 1;
  if (ctx.wants("sec3/prop-3.6")) {
    if (convex) {
      std::mt19937 rng(31);
      std::vector<std::pair<Vec, Vec>> pairs;
      for (int i = 0; i < 12; ++i) pairs.push_back({rpt2(rng, -8, 8, 4), rpt2(rng, -8, 8, 4)});
      const MidpointProbeReport rep =
          convexity_concavity_probe(f, scene.target, pairs, {Rat(1, 4), Rat(1, 2), Rat(3, 4)});
      ctx.add("sec3/prop-3.6", rep.convexity_violations.empty(),
              scene.name + ": no midpoint violations on the convex scene (" +
                  std::to_string(rep.convex_checked) + " checks)");
    } else {
      // the pinned nonconvex witness across the hole
      const std::vector<std::pair<Vec, Vec>> hole = {
          {Vec{Rat(-1, 2), Rat(0)}, Vec{Rat(1, 2), Rat(0)}}};
      const MidpointProbeReport rep = convexity_concavity_probe(f, scene.target, hole, {Rat(1, 2)});
      const bool witnessed = !rep.convexity_violations.empty();
      ctx.add("sec3/prop-3.6", witnessed,
              scene.name + ": convexity violation witnessed as expected (" +
                  (witnessed ? rep.convexity_violations.front() : "none found") + ")",
              /*expected=*/true);
    }
  }
  if (ctx.wants("sec3/prop-3.7") && !convex) {
    // reverse (concavity) inequality strictly inside the complement of the target
    std::vector<std::pair<Vec, Vec>> inside = {
        {Vec{Rat(-1, 2), Rat(0)}, Vec{Rat(1, 2), Rat(0)}},
        {Vec{Rat(-1, 4), Rat(1, 4)}, Vec{Rat(1, 2), Rat(-1, 4)}},
        {Vec{Rat(0), Rat(-1, 2)}, Vec{Rat(1, 4), Rat(1, 2)}},
        {Vec{Rat(-3, 4), Rat(0)}, Vec{Rat(3, 4), Rat(0)}}};
    const MidpointProbeReport rep =
        convexity_concavity_probe(f, scene.target, inside, {Rat(1, 4), Rat(1, 2), Rat(3, 4)});
    ctx.add("sec3/prop-3.7", rep.concave_checked > 0 && rep.concavity_violations.empty(),
            scene.name + ": reverse midpoint inequality holds off the target (" +
                std::to_string(rep.concave_checked) + " checks)");
  }
}

inline void sec3_random(Ctx& ctx) {
  const bool any = ctx.wants("sec3/prop-3.1") || ctx.wants("sec3/prop-3.2") ||
                   ctx.wants("sec3/prop-3.3") || ctx.wants("sec3/prop-3.4") ||
                   ctx.wants("sec3/prop-3.5") || ctx.wants("sec3/prop-3.6");
  if (!any) return;

  std::mt19937 rng(2024);
  Sec3Tally tally[7];
  Sec3Tally convex_tally;
  for (int i = 0; i < 100; ++i) {
    const Dynamics f = random_dynamics(rng, i % 2 == 0);
    PolyhedralUnion omega(2);
    omega.pieces.push_back(random_convex_piece(rng));
    if (i % 3 == 0) omega.pieces.push_back(random_convex_piece(rng));
    const std::string label = "random-scene-" + std::to_string(i);

    const std::vector<Vec> pts = scene_probe_points(f, omega, {rpt2(rng, -10, 10, 4)}, rng);
    sec3_identities(ctx, label, f, omega, pts, tally);

    if (ctx.wants("sec3/prop-3.6") && omega.pieces.size() == 1) {
      std::vector<std::pair<Vec, Vec>> pairs;
      for (int k = 0; k < 4; ++k) pairs.push_back({rpt2(rng, -8, 8, 4), rpt2(rng, -8, 8, 4)});
      const MidpointProbeReport rep =
          convexity_concavity_probe(f, omega, pairs, {Rat(1, 4), Rat(1, 2), Rat(3, 4)});
      convex_tally.feed(rep.convexity_violations.empty(),
                        label + (rep.convexity_violations.empty()
                                     ? ""
                                     : " " + rep.convexity_violations.front()));
    }
  }

  const char* tags[5] = {"sec3/prop-3.1", "sec3/prop-3.2", "sec3/prop-3.3", "sec3/prop-3.4",
                         "sec3/prop-3.5"};
  for (int i = 0; i < 5; ++i) {
    if (!ctx.wants(tags[i]) || tally[i].checked == 0) continue;
    ctx.add(tags[i], tally[i].failed == 0, tally[i].summary("100 random planar scenes"));
  }
  if (ctx.wants("sec3/prop-3.6") && convex_tally.checked > 0) {
    ctx.add("sec3/prop-3.6", convex_tally.failed == 0,
            convex_tally.summary("random convex scenes, midpoint inequality"));
  }
}

// ---------------------------------------------------------------------------
// dual-bound suite

inline void sec4_scene(Ctx& ctx, const Scene& scene) {
  const bool want41 = ctx.wants("sec4/prop-4.1");
  const bool want44 = ctx.wants("sec4/prop-4.4");
  const bool want43 = ctx.wants("sec4/thm-4.3");
  const bool want45 = ctx.wants("sec4/prop-4.5");
  const bool want46 = ctx.wants("sec4/thm-4.6");
  if (!(want41 || want44 || want43 || want45 || want46)) return;

  const TimeField field = scene.field();
  const SamplingPlan plan = SamplingPlan::defaults();
  const std::vector<Rat> eps_grid = {Rat(0), Rat(1, 10), Rat(1, 2)};
  const Rat eta = scene.options.eta;

  const bool curved = scene.target_kind == TargetKind::ball_complement;
  const Dynamics f = scene.dynamics();

  Sec3Tally t41, t44, t43, t45, t46;
  size_t overclaim_notes = 0;

  for (const Vec& x : scene.points) {
    const TimeValue tx = field.eval(x);
    if (!tx.finite) continue;
    const bool inset = scene.target_contains(x);

    // out-of-set scaffolding shared across the eps sweep
    std::vector<Vec> witnesses;
    PolyhedralUnion enlarged(scene.dim);
    Rat reach_sq(0);
    bool have_out_data = false;
    if (!inset && !curved) {
      const OutsetProjection op = subdiff_outset_via_projection(f, scene.target, x);
      const ProjectionSet ps = projection_set(f, scene.target, x);
      witnesses = op.representatives;
      bool seen_canonical = false;
      for (const auto& w : witnesses) seen_canonical = seen_canonical || w == ps.witness_point;
      if (!seen_canonical) witnesses.push_back(ps.witness_point);
      const Rat tval = minimal_time(f, scene.target, x).time.value;
      enlarged = enlargement(f, scene.target, tval);
      const Rat speed_lo = sqrt_rational(f.norm_sq(), 96).lower();
      const Rat reach = speed_lo * tval + eta;
      reach_sq = reach * reach;
      have_out_data = true;
    }

    for (const Rat& eps : eps_grid) {
      const DualCloud cloud = sampled_frechet_subdiff(field, x, eps, plan);
      const std::string where = scene.name + " at " + vec_str(x) + " eps=" + eps.str();

      for (const Vec& m : cloud.members) {
        if (inset) {
          if (want41) t41.feed(in_c_star(f, eps, m), where + " dual=" + vec_str(m));
          continue;
        }
        if (want44) t44.feed(in_s_star(f, eps, m), where + " dual=" + vec_str(m));
        if (curved || !have_out_data) continue;

        if (want43) {
          bool found = false;
          for (const auto& w : witnesses) {
            if (!scene.target.contains(w)) continue;
            if (norm_sq(sub(x, w)) > reach_sq) continue;
            if (eps_normal_exact(scene.target, w, m, eps + eta)) {
              found = true;
              break;
            }
          }
          t43.feed(found, where + " dual=" + vec_str(m));
        }

        if (want45) {
          bool ok = true;
          bool soft = false;  // sampled-side inconclusive rather than a failure
          for (const auto& w : witnesses) {
            if (!eps_normal_exact(scene.target, w, m, eps)) {
              if (eps.sign() > 0) soft = true;
              else ok = false;
              break;
            }
            if (eps.is_zero()) {
              if (!gauge_subdifferential(f, sub(w, x)).contains(negate(m))) ok = false;
            } else {
              if (sampled_eps_subgradient(gauge_field(f), sub(w, x), negate(m), eps, plan) ==
                  Verdict::non_member) {
                soft = true;
              }
            }
            if (!ok || soft) break;
          }
          if (soft) ++overclaim_notes;
          else t45.feed(ok, where + " dual=" + vec_str(m));
        }

        if (want46) {
          const bool band = in_s_star(f, eps, m);
          const bool up = eps_normal_exact(enlarged, x, m, eps);
          if (!(band && up) && eps.sign() > 0) ++overclaim_notes;
          else t46.feed(band && up, where + " dual=" + vec_str(m));
        }
      }
    }
  }

  ctx.run.notes += overclaim_notes;
  auto emit = [&](const char* tag, bool wanted, const Sec3Tally& t) {
    if (!wanted || t.checked == 0) return;
    ctx.add(tag, t.failed == 0, t.summary(scene.name));
  };
  emit("sec4/prop-4.1", want41, t41);
  emit("sec4/prop-4.4", want44, t44);
  emit("sec4/thm-4.3", want43, t43);
  emit("sec4/prop-4.5", want45, t45);
  emit("sec4/thm-4.6", want46, t46);
}

// ---------------------------------------------------------------------------
// convex equivalence suite

inline void convex_equiv(Ctx& ctx) {
  const bool want71 = ctx.wants("convex-equiv/thm-7.1");
  const bool want72 = ctx.wants("convex-equiv/thm-7.2");
  const bool want73 = ctx.wants("convex-equiv/thm-7.3");
  const bool want_scaling = ctx.wants("convex-equiv/scaling");
  if (!(want71 || want72 || want73 || want_scaling)) return;

  std::mt19937 rng(4096);
  const Rat tol(1, 1000000000);
  Sec3Tally t71, t72, t73, tsc;

  for (int i = 0; i < 50; ++i) {
    const bool with_origin = i % 2 == 0;
    const Dynamics f = random_dynamics(rng, with_origin);
    PolyhedralUnion omega(2);
    omega.pieces.push_back(random_convex_piece(rng));
    const std::string label = "convex-scene-" + std::to_string(i);

    const Generators g = polyhedron_generators(omega.pieces.front());
    const Vec xin = g.points[static_cast<size_t>(rint(rng, 0, static_cast<int>(g.points.size()) - 1))];

    const SubdiffResult basic = basic_subdiff_inset(f, omega, xin);
    const SubdiffResult sing = singular_subdiff_inset(f, omega, xin);

    if (want71 || want72) {
      const ProbedField pf = probe_field(f, omega, xin);

      if (want71) {
        bool ok = true;
        std::string wit;
        for (const auto& s : set_samples(basic.set)) {
          if (!definitional_ok(pf, s)) {
            ok = false;
            wit = "formula sample " + vec_str(s) + " rejected";
            break;
          }
        }
        if (ok) {
          for (const auto& cand : oracle_detail::box_grid(2, Rat(2), Rat(1, 4))) {
            if (definitional_ok(pf, cand) && !contains_slack(basic.set, cand, tol)) {
              ok = false;
              wit = "oracle member " + vec_str(cand) + " outside the formula set";
              break;
            }
          }
        }
        t71.feed(ok, label + " at " + vec_str(xin) + (wit.empty() ? "" : ": " + wit));
      }

      if (want72) {
        // horizon oracle: x* is a singular direction when a deep multiple
        // stays a definitional subgradient (the zero subgradient anchors it)
        bool ok = true;
        std::string wit;
        for (const auto& s : set_samples(sing.set)) {
          if (!definitional_ok(pf, scale(Rat(64), s))) {
            ok = false;
            wit = "singular sample " + vec_str(s) + " rejected at depth 64";
            break;
          }
        }
        if (ok) {
          for (const auto& cand : oracle_detail::box_grid(2, Rat(2), Rat(1, 4))) {
            if (definitional_ok(pf, scale(Rat(64), cand)) && !contains_slack(sing.set, cand, tol)) {
              ok = false;
              wit = "horizon member " + vec_str(cand) + " outside the singular set";
              break;
            }
          }
        }
        t72.feed(ok, label + " at " + vec_str(xin) + (wit.empty() ? "" : ": " + wit));
      }
    }

    if (want73) {
      // an out-of-set point with finite time: back off against the dynamics
      const Vec step = with_origin ? Vec{Rat(5, 2), Rat(1, 2)}
                                   : negate(scale(Rat(3), f.vertices().vertices.front()));
      const Vec xout = add(xin, step);
      if (!omega.contains(xout) && minimal_time(f, omega, xout).time.finite &&
          minimal_time(f, omega, xout).time.value.sign() > 0) {
        const OutsetProjection op = subdiff_outset_via_projection(f, omega, xout);
        const OutsetEnlargement en = subdiff_outset_via_enlargement(f, omega, xout);
        const ProjectionSet ps = projection_set(f, omega, xout);
        const HPolyhedron dneg =
            detail::negated_set(gauge_subdifferential(f, sub(ps.witness_point, xout)));

        PolyhedralUnion left(2);
        for (const auto& piece : en.normal_cone.pieces) {
          HPolyhedron cut = detail::intersect_hpoly(piece, dneg);
          if (!is_empty(cut)) left.pieces.push_back(minimal_faces(cut));
        }
        PolyhedralUnion right(2);
        for (const auto& cone : limiting_normal_cone_pieces(omega, ps.witness_point)) {
          HPolyhedron cut = detail::intersect_hpoly(cone.as_hpoly(), dneg);
          if (!is_empty(cut)) right.pieces.push_back(minimal_faces(cut));
        }

        bool ok = union_subset(op.basic.set, right);
        std::string wit = ok ? "" : "middle set escapes the witness bound";
        if (ok && with_origin) {
          ok = union_equals(left, op.basic.set) && union_equals(op.basic.set, right);
          if (!ok) wit = "equality chain broken";
          const ProbedField pf_out = probe_field(f, omega, xout);
          for (const auto& s : set_samples(op.basic.set)) {
            if (!definitional_ok(pf_out, s)) {
              ok = false;
              wit = "chain sample " + vec_str(s) + " rejected";
              break;
            }
          }
        }
        t73.feed(ok, label + " at " + vec_str(xout) + (wit.empty() ? "" : ": " + wit));
      }
    }

    if (want_scaling) {
      const Rat lam(1, 2);  // T scales by lam when the dynamics scales by 1/lam
      const Dynamics f_fast = scale_dynamics(f, Rat(1) / lam);
      const bool ok = union_equals(basic_subdiff_inset(f_fast, omega, xin).set,
                                   scale_union(basic.set, lam));
      tsc.feed(ok, label + " at " + vec_str(xin));
    }
  }

  if (want71 && t71.checked) ctx.add("convex-equiv/thm-7.1", t71.failed == 0, t71.summary("50 convex scenes"));
  if (want72 && t72.checked) ctx.add("convex-equiv/thm-7.2", t72.failed == 0, t72.summary("50 convex scenes"));
  if (want73 && t73.checked) ctx.add("convex-equiv/thm-7.3", t73.failed == 0, t73.summary("out-of-set chain"));
  if (want_scaling && tsc.checked) {
    ctx.add("convex-equiv/scaling", tsc.failed == 0, tsc.summary("dual sets scale with the dynamics"));
  }
}

// ---------------------------------------------------------------------------
// oracle concordance suite

inline void concordance_fixture(Ctx& ctx, const Scene& scene) {
  const bool want52 = ctx.wants("concordance/thm-5.2");
  const bool want53 = ctx.wants("concordance/thm-5.3");
  const bool want63 = ctx.wants("concordance/thm-6.3");
  const bool want_eq = ctx.wants("concordance/thm-5.2-equality");
  if (!(want52 || want53 || want63 || want_eq)) return;

  const Dynamics f = scene.dynamics();
  const TimeField field = scene.field();
  const SamplingPlan plan = SamplingPlan::defaults();
  const Rat tol(1, 1000000000);
  const Vec corner{Rat(1), Rat(0)};
  const Vec top{Rat(0), Rat(1)};

  if (want52) {
    std::string wit;
    const DualCloud at_corner = sampled_limiting_subdiff(field, corner, plan);
    const DualCloud at_top = sampled_limiting_subdiff(field, top, plan);
    const bool ok =
        cloud_within(at_corner, basic_subdiff_inset(f, scene.target, corner).set, tol, &wit) &&
        cloud_within(at_top, basic_subdiff_inset(f, scene.target, top).set, tol, &wit);
    ctx.add("concordance/thm-5.2", ok,
            scene.name + ": sampled limiting clouds inside the basic sets" +
                (ok ? "" : " (escaped at " + wit + ")"));
  }
  if (want53) {
    std::string wit;
    const DualCloud s_corner = sampled_singular_subdiff(field, corner, plan);
    const DualCloud s_top = sampled_singular_subdiff(field, top, plan);
    const bool ok =
        cloud_within(s_corner, singular_subdiff_inset(f, scene.target, corner).set, tol, &wit) &&
        cloud_within(s_top, singular_subdiff_inset(f, scene.target, top).set, tol, &wit);
    bool ray_hits = true;
    for (const Vec& probe : {Vec{Rat(0), Rat(-2)}, Vec{Rat(0), Rat(-1)}, Vec{Rat(0), Rat(0)}}) {
      ray_hits = ray_hits && s_top.contains_member(probe);
    }
    ctx.add("concordance/thm-5.3", ok && ray_hits,
            scene.name + ": sampled singular clouds inside the singular sets, unbounded ray "
                         "witnessed downward");
  }
  if (want63) {
    const Vec z{Rat(1, 2), Rat(1, 2)};
    std::string wit;
    const DualCloud out_cloud = sampled_limiting_subdiff(field, z, plan);
    const bool ok =
        cloud_within(out_cloud, subdiff_outset_via_projection(f, scene.target, z).basic.set, tol, &wit);
    ctx.add("concordance/thm-6.3", ok,
            scene.name + ": off-target limiting cloud inside the projection-formula union" +
                (ok ? "" : " (escaped at " + wit + ")"));
  }
  if (want_eq) {
    const DualCloud at_corner = sampled_limiting_subdiff(field, corner, plan);
    bool ok = true;
    for (const Vec& probe :
         {Vec{Rat(0), Rat(0)}, Vec{Rat(-1, 2), Rat(0)}, Vec{Rat(-1), Rat(0)}}) {
      ok = ok && at_corner.contains_member(probe);
    }
    ctx.add("concordance/thm-5.2-equality", ok,
            scene.name + ": the segment [-1,0]x{0} is reproduced member-by-member at (1,0)");
  }
}

inline void concordance_random(Ctx& ctx) {
  const bool want52 = ctx.wants("concordance/thm-5.2");
  const bool want53 = ctx.wants("concordance/thm-5.3");
  if (!(want52 || want53)) return;

  std::mt19937 rng(777);
  const Rat tol(1, 1000000000);
  Sec3Tally basic_tally, sing_tally;

  auto box_piece = [](const Rat& cx, const Rat& cy, const Rat& hx, const Rat& hy) {
    HPolyhedron p(2);
    p.add({Rat(1), Rat(0)}, cx + hx);
    p.add({Rat(-1), Rat(0)}, hx - cx);
    p.add({Rat(0), Rat(1)}, cy + hy);
    p.add({Rat(0), Rat(-1)}, hy - cy);
    return p;
  };

  for (int i = 0; i < 20; ++i) {
    const Rat cx(rint(rng, -4, 4), 2), cy(rint(rng, -4, 4), 2);
    const Rat hx(rint(rng, 1, 3), 2), hy(rint(rng, 1, 3), 2);
    const Rat cx2(rint(rng, -4, 4), 2), cy2(rint(rng, -4, 4), 2);
    const Rat hx2(rint(rng, 1, 3), 2), hy2(rint(rng, 1, 3), 2);
    PolyhedralUnion omega(2);
    omega.pieces.push_back(box_piece(cx, cy, hx, hy));
    omega.pieces.push_back(box_piece(cx2, cy2, hx2, hy2));

    // dynamics whose polar bands are axis-aligned boxes: the sampled quotient
    // chart contains the axis directions, so every face of the formula sets is
    // enforced exactly and sampling gaps cannot admit stray duals
    Dynamics f = [&] {
      switch (i % 3) {
        case 0:
          return Dynamics::polytope(VPolytope(2, {{Rat(-1), Rat(0)}, {Rat(1), Rat(0)}}));
        case 1:
          return Dynamics::polytope(VPolytope(
              2, {{Rat(2), Rat(0)}, {Rat(-2), Rat(0)}, {Rat(0), Rat(1, 2)}, {Rat(0), Rat(-1, 2)}}));
        default:
          return Dynamics::polytope(VPolytope(
              2, {{Rat(1), Rat(0)}, {Rat(-1), Rat(0)}, {Rat(0), Rat(1)}, {Rat(0), Rat(-1)}}));
      }
    }();

    const Vec x{cx + hx, cy + hy};  // a corner of the first box
    const TimeField field = time_field(f, omega);
    const SamplingPlan plan = SamplingPlan::defaults(4, 12, 16);
    const std::string label = "two-box-scene-" + std::to_string(i);

    if (want52) {
      std::string wit;
      const bool ok = cloud_within(sampled_limiting_subdiff(field, x, plan),
                                   basic_subdiff_inset(f, omega, x).set, tol, &wit);
      basic_tally.feed(ok, label + (wit.empty() ? "" : " member " + wit));
    }
    if (want53) {
      std::string wit;
      const bool ok = cloud_within(sampled_singular_subdiff(field, x, plan),
                                   singular_subdiff_inset(f, omega, x).set, tol, &wit);
      sing_tally.feed(ok, label + (wit.empty() ? "" : " member " + wit));
    }
  }

  if (want52 && basic_tally.checked) {
    ctx.add("concordance/thm-5.2", basic_tally.failed == 0,
            basic_tally.summary("20 random two-box scenes"));
  }
  if (want53 && sing_tally.checked) {
    ctx.add("concordance/thm-5.3", sing_tally.failed == 0,
            sing_tally.summary("20 random two-box scenes"));
  }
}

// ---------------------------------------------------------------------------
// Lipschitz characterization suite

inline void lipschitz_scene(Ctx& ctx, const Scene& scene) {
  if (!ctx.wants("lipschitz/singular-zero")) return;

  struct Probe {
    Vec x;
    bool expect_lipschitz;
  };
  std::vector<Probe> probes;
  if (scene.name == "example-5.3") {
    probes = {{Vec{Rat(1), Rat(0)}, true}, {Vec{Rat(0), Rat(1)}, false}};
  } else if (scene.name == "example-6.4") {
    probes = {{Vec{Rat(1, 2), Rat(1, 2)}, true}};
  } else if (scene.name == "example-7.4") {
    probes = {{Vec{Rat(1), Rat(0)}, true},
              {Vec{Rat(2), Rat(1, 2)}, true},
              {Vec{Rat(0), Rat(1)}, false}};
  } else {
    return;
  }

  const Dynamics f = scene.dynamics();
  const TimeField field = scene.field();
  const SamplingPlan plan = SamplingPlan::defaults(2, 12, 32);

  for (const auto& probe : probes) {
    const SubdiffResult sing = scene.target.contains(probe.x)
                                   ? singular_subdiff_inset(f, scene.target, probe.x)
                                   : subdiff_outset_via_projection(f, scene.target, probe.x).singular;
    const bool singular_zero = union_equals(sing.set, u1(point_set(zero_vec(scene.dim))));
    const CalmnessProbe cp = calmness_probe(field, probe.x, plan);
    const bool lip = probe.expect_lipschitz;
    const bool ok = singular_zero == lip && cp.divergent != lip;
    ctx.add("lipschitz/singular-zero", ok,
            scene.name + " at " + vec_str(probe.x) + ": singular set " +
                (singular_zero ? "{0}" : "nontrivial") + ", quotient probe " +
                (cp.divergent ? "divergent" : "bounded"));
  }
}

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// driver

inline VerifyRun run_verify_suites(const std::vector<Scene>& scenes, const SuiteSelector& sel) {
  VerifyRun run;
  verify_detail::Ctx ctx{sel, run};
  if (sel.none()) return run;  // the empty selector selects nothing and passes

  for (const Scene& scene : scenes) {
    if (scene.name == "example-5.3") {
      verify_detail::golden_53(ctx, scene);
      verify_detail::concordance_fixture(ctx, scene);
    } else if (scene.name == "example-6.4") {
      verify_detail::golden_64(ctx, scene);
    } else if (scene.name == "example-7.4") {
      verify_detail::golden_74(ctx, scene);
    } else if (scene.name == "section-6-counterexample") {
      verify_detail::counterexample_6(ctx, scene);
    }
    verify_detail::sec3_fixture(ctx, scene);
    verify_detail::sec4_scene(ctx, scene);
    verify_detail::lipschitz_scene(ctx, scene);
  }

  verify_detail::sec3_random(ctx);
  verify_detail::convex_equiv(ctx);
  verify_detail::concordance_random(ctx);
  return run;
}

inline std::vector<Scene> all_bundled_scenes() {
  std::vector<Scene> scenes;
  for (const auto& id : bundled_scene_names()) scenes.push_back(bundled_scene(id));
  return scenes;
}

}  // namespace mintime

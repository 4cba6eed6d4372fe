#pragma once

#include <functional>
#include <vector>

#include "mintime/enumeration.hpp"
#include "mintime/polyhedron.hpp"

namespace mintime {

// Mixed closed/strict linear system. Emptiness is decidable exactly: maximize a
// shared slack on the strict rows; the region is nonempty iff the slack can be
// made positive (or is unbounded).
struct StrictSystem {
  size_t dim = 0;
  std::vector<Halfspace> weak;     // <a,x> <= b
  std::vector<Halfspace> strict;   // <a,x> <  b
  std::vector<Halfspace> equal;    // <a,x> == b

  explicit StrictSystem(size_t d = 0) : dim(d) {}
};

inline bool strict_system_nonempty(const StrictSystem& s) {
  LinearProgram lp(s.dim + 1);  // variables (x, eps); maximize eps
  Vec obj = zero_vec(s.dim + 1);
  obj[s.dim] = -1;
  lp.objective = obj;
  const auto widen = [&](const Vec& a, int eps_coef) {
    Vec row = a;
    row.push_back(Rat(eps_coef));
    return row;
  };
  for (const auto& h : s.weak) lp.add_ineq(widen(h.normal, 0), h.offset);
  for (const auto& h : s.strict) lp.add_ineq(widen(h.normal, 1), h.offset);
  for (const auto& h : s.equal) lp.add_eq(widen(h.normal, 0), h.offset);
  // Cap eps so a fat region cannot make the program unbounded in eps alone.
  Vec cap = zero_vec(s.dim + 1);
  cap[s.dim] = 1;
  lp.add_ineq(cap, Rat(1));
  const LPResult r = lp_solve(lp);
  if (r.status == LPStatus::infeasible) return false;
  if (r.status == LPStatus::unbounded) return true;
  return -r.value > Rat(0);  // max eps > 0
}

// A witness point satisfying all strict rows with positive margin, if any.
inline std::optional<Vec> strict_system_point(const StrictSystem& s) {
  LinearProgram lp(s.dim + 1);
  Vec obj = zero_vec(s.dim + 1);
  obj[s.dim] = -1;
  lp.objective = obj;
  const auto widen = [&](const Vec& a, int eps_coef) {
    Vec row = a;
    row.push_back(Rat(eps_coef));
    return row;
  };
  for (const auto& h : s.weak) lp.add_ineq(widen(h.normal, 0), h.offset);
  for (const auto& h : s.strict) lp.add_ineq(widen(h.normal, 1), h.offset);
  for (const auto& h : s.equal) lp.add_eq(widen(h.normal, 0), h.offset);
  Vec cap = zero_vec(s.dim + 1);
  cap[s.dim] = 1;
  lp.add_ineq(cap, Rat(1));
  const LPResult r = lp_solve(lp);
  if (r.status != LPStatus::optimal || -r.value <= Rat(0)) return std::nullopt;
  return Vec(r.point.begin(), r.point.end() - 1);
}

namespace detail {

// Is region \ (pieces[k], pieces[k+1], ...) empty?  Splits the region against
// the first piece into disjoint strict cells and recurses.
inline bool region_covered(const StrictSystem& region, const std::vector<HPolyhedron>& pieces,
                           size_t k) {
  if (!strict_system_nonempty(region)) return true;
  if (k == pieces.size()) return false;
  const HPolyhedron& q = pieces[k];
  StrictSystem prefix = region;
  for (const auto& row : q.faces) {
    StrictSystem part = prefix;
    part.strict.push_back({negate(row.normal), -row.offset});  // <a,x> > b
    if (!region_covered(part, pieces, k + 1)) return false;
    prefix.weak.push_back(row);
  }
  // prefix now equals region ∩ q, which is covered by construction.
  return true;
}

}  // namespace detail

// Exact test for P ⊆ union(pieces). Dimension-free (pure LP).
inline bool hpoly_covered_by(const HPolyhedron& p, const std::vector<HPolyhedron>& pieces) {
  StrictSystem region(p.dim);
  region.weak = p.faces;
  return detail::region_covered(region, pieces, 0);
}

inline bool union_subset(const PolyhedralUnion& a, const PolyhedralUnion& b) {
  for (const auto& piece : a.pieces) {
    if (!hpoly_covered_by(piece, b.pieces)) return false;
  }
  return true;
}

inline bool union_equals(const PolyhedralUnion& a, const PolyhedralUnion& b) {
  return union_subset(a, b) && union_subset(b, a);
}

inline bool hpoly_subset(const HPolyhedron& a, const HPolyhedron& b) {
  return hpoly_covered_by(a, {b});
}

inline bool hpoly_equals(const HPolyhedron& a, const HPolyhedron& b) {
  return hpoly_subset(a, b) && hpoly_subset(b, a);
}

inline PolyhedralUnion union_of(const HPolyhedron& p) {
  PolyhedralUnion u(p.dim);
  u.pieces.push_back(p);
  return u;
}

// --- Cone operations -------------------------------------------------------

inline PolyhedralCone cone_intersect(const PolyhedralCone& a, const PolyhedralCone& b) {
  if (a.dim != b.dim) throw InputError("cone_intersect: dimension mismatch");
  PolyhedralCone out(a.dim);
  out.normals = a.normals;
  out.normals.insert(out.normals.end(), b.normals.begin(), b.normals.end());
  return out;
}

// Membership x ∈ cone via h-rep when present, otherwise via the conic
// combination feasibility program over the generators (any dimension).
inline bool cone_contains(const PolyhedralCone& c, const Vec& x) {
  if (c.hrep_known && (!c.normals.empty() || !c.gens)) return c.contains(x);
  const auto& g = *c.gens;
  const size_t nr = g.rays.size(), nl = g.lines.size();
  LinearProgram lp(nr + nl);
  for (size_t i = 0; i < nr; ++i) lp.nonneg[i] = true;
  for (size_t d = 0; d < c.dim; ++d) {
    Vec row(nr + nl, Rat(0));
    for (size_t i = 0; i < nr; ++i) row[i] = g.rays[i][d];
    for (size_t j = 0; j < nl; ++j) row[nr + j] = g.lines[j][d];
    lp.add_eq(std::move(row), x[d]);
  }
  return lp_feasible(lp);
}

// c1 ⊆ c2, decided through c1's generators. In dimension > 3 the generators
// must already be attached; otherwise this is an enumeration call.
inline bool cone_is_subset(PolyhedralCone c1, const PolyhedralCone& c2) {
  if (!c1.gens) {
    if (c1.dim > 3) {
      throw UnsupportedDimensionError(
          "cone_is_subset: need generators (dim <= 3) for the left cone");
    }
    ensure_generators(c1);
  }
  for (const auto& r : c1.gens->rays) {
    if (!cone_contains(c2, r)) return false;
  }
  for (const auto& l : c1.gens->lines) {
    if (!cone_contains(c2, l) || !cone_contains(c2, negate(l))) return false;
  }
  return true;
}

inline bool cone_equals(const PolyhedralCone& a, const PolyhedralCone& b) {
  return cone_is_subset(a, b) && cone_is_subset(b, a);
}

// A canonical printable form: minimal, sorted h-rep of the closure.
inline PolyhedralCone cone_canonical(const PolyhedralCone& c) {
  PolyhedralCone out(c.dim);
  HPolyhedron h(c.dim);
  for (const auto& n : c.normals) h.add(n, Rat(0));
  const HPolyhedron min = minimal_faces(h);
  for (const auto& f : min.faces) out.normals.push_back(f.normal);
  if (c.dim <= 3) ensure_generators(out);
  return out;
}

// --- Arrangement cells -----------------------------------------------------

// One relative-interior point for every nonempty cell of the arrangement of
// `cutters` (and Q's own facet hyperplanes) inside the bounded polyhedron Q.
// Cells are sign-vector classes; a depth-first scan with strict-feasibility
// pruning enumerates exactly the nonempty ones.
inline std::vector<Vec> arrangement_cell_points(const HPolyhedron& q,
                                                const std::vector<Halfspace>& cutters) {
  // Hyperplane list: Q's facets first (their sign is forced to <= 0), then cutters.
  struct Plane {
    Halfspace h;
    bool q_facet;
  };
  std::vector<Plane> planes;
  detail::DirSet seen;  // dedupe by canonical (normal, offset) with sign flip
  const auto plane_key = [](const Halfspace& h) {
    Vec joint = h.normal;
    joint.push_back(h.offset);
    return primitive(joint, true);
  };
  const auto add_plane = [&](const Halfspace& h, bool q_facet) {
    if (is_zero(h.normal)) return;
    const Vec key = plane_key(h);
    std::vector<std::string> skey;
    for (const auto& x : key) skey.push_back(x.str());
    if (!seen.seen.insert(std::move(skey)).second) return;
    planes.push_back({canonical_halfspace(h), q_facet});
  };
  for (const auto& h : q.faces) add_plane(h, true);
  for (const auto& h : cutters) add_plane(h, false);

  std::vector<Vec> out;
  std::vector<int> sign(planes.size(), 0);
  const auto system_for = [&](size_t depth) {
    StrictSystem s(q.dim);
    s.weak = q.faces;  // keep the original Q constraints (incl. any duplicates)
    for (size_t i = 0; i < depth; ++i) {
      const auto& pl = planes[i].h;
      if (sign[i] == 0) {
        s.equal.push_back(pl);
      } else if (sign[i] < 0) {
        s.strict.push_back(pl);
      } else {
        s.strict.push_back({negate(pl.normal), -pl.offset});
      }
    }
    return s;
  };
  const std::function<void(size_t)> dfs = [&](size_t depth) {
    if (depth == planes.size()) {
      const auto pt = strict_system_point(system_for(depth));
      if (pt) out.push_back(*pt);
      return;
    }
    const bool allow_plus = !planes[depth].q_facet;
    for (int sgn : {-1, 0, 1}) {
      if (sgn == 1 && !allow_plus) continue;
      sign[depth] = sgn;
      if (strict_system_nonempty(system_for(depth + 1))) dfs(depth + 1);
    }
    sign[depth] = 0;
  };
  dfs(0);
  return out;
}

}  // namespace mintime

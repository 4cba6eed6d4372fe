#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "mintime/linprog.hpp"
#include "mintime/vec.hpp"

namespace mintime {

// Closed halfspace {x : <normal, x> <= offset}. With offset 0 it doubles as a
// homogeneous cone constraint.
struct Halfspace {
  Vec normal;
  Rat offset;

  bool admits(const Vec& x) const { return dot(normal, x) <= offset; }
  Rat slack(const Vec& x) const { return offset - dot(normal, x); }

  friend bool operator==(const Halfspace& a, const Halfspace& b) {
    return a.normal == b.normal && a.offset == b.offset;
  }
};

// Scales so the combined (normal, offset) vector has coprime integer entries;
// positive scaling only, so the halfspace is unchanged.
inline Halfspace canonical_halfspace(const Halfspace& h) {
  Vec joint = h.normal;
  joint.push_back(h.offset);
  joint = primitive(joint);
  Halfspace out;
  out.offset = joint.back();
  joint.pop_back();
  out.normal = std::move(joint);
  return out;
}

// Intersection of finitely many closed halfspaces. May be empty, unbounded or
// lower-dimensional; no constraint ordering is implied.
struct HPolyhedron {
  size_t dim = 0;
  std::vector<Halfspace> faces;

  explicit HPolyhedron(size_t d = 0) : dim(d) {}
  HPolyhedron(size_t d, std::vector<Halfspace> f) : dim(d), faces(std::move(f)) {
    for (const auto& h : faces) {
      if (h.normal.size() != dim) throw InputError("halfspace dimension mismatch");
    }
  }

  void add(Vec normal, Rat offset) {
    if (normal.size() != dim) throw InputError("halfspace dimension mismatch");
    faces.push_back({std::move(normal), std::move(offset)});
  }

  bool contains(const Vec& x) const {
    if (x.size() != dim) throw InputError("point dimension mismatch");
    for (const auto& h : faces) {
      if (!h.admits(x)) return false;
    }
    return true;
  }

  // Indices of constraints active (tight) at x.
  std::vector<size_t> active_at(const Vec& x) const {
    std::vector<size_t> idx;
    for (size_t i = 0; i < faces.size(); ++i) {
      if (faces[i].slack(x).is_zero()) idx.push_back(i);
    }
    return idx;
  }
};

inline HPolyhedron intersect(const HPolyhedron& a, const HPolyhedron& b) {
  if (a.dim != b.dim) throw InputError("intersect: dimension mismatch");
  HPolyhedron out = a;
  out.faces.insert(out.faces.end(), b.faces.begin(), b.faces.end());
  return out;
}

// A canonical nonempty H-representation of the empty set (0 <= -1 is false).
inline HPolyhedron empty_hpoly(size_t dim) {
  HPolyhedron out(dim);
  out.add(zero_vec(dim), Rat(-1));
  return out;
}

inline LinearProgram feasibility_lp(const HPolyhedron& p) {
  LinearProgram lp(p.dim);
  for (const auto& h : p.faces) lp.add_ineq(h.normal, h.offset);
  return lp;
}

inline bool is_empty(const HPolyhedron& p) { return !lp_feasible(feasibility_lp(p)); }

// Convex hull of finitely many points (duplicates and interior points allowed).
struct VPolytope {
  size_t dim = 0;
  std::vector<Vec> vertices;

  VPolytope() = default;
  VPolytope(size_t d, std::vector<Vec> v) : dim(d), vertices(std::move(v)) {
    if (vertices.empty()) throw InputError("polytope needs at least one point");
    for (const auto& p : vertices) {
      if (p.size() != dim) throw InputError("polytope vertex dimension mismatch");
    }
  }

  // Membership via the convex-combination feasibility program; any dimension.
  bool contains(const Vec& x) const {
    if (x.size() != dim) throw InputError("point dimension mismatch");
    LinearProgram lp(vertices.size());
    lp.nonneg.assign(vertices.size(), true);
    for (size_t c = 0; c < dim; ++c) {
      Vec row(vertices.size(), Rat(0));
      for (size_t j = 0; j < vertices.size(); ++j) row[j] = vertices[j][c];
      lp.add_eq(std::move(row), x[c]);
    }
    lp.add_eq(Vec(vertices.size(), Rat(1)), Rat(1));
    return lp_feasible(lp);
  }
};

// Minkowski-Weyl data: conv(points) + cone(rays) + span(lines).
// Empty set iff points is empty (rays/lines alone generate nothing here).
struct Generators {
  std::vector<Vec> points;
  std::vector<Vec> rays;
  std::vector<Vec> lines;

  bool empty() const { return points.empty(); }
};

// Generators of a cone: always contains the origin, so only rays and lines.
struct ConeGens {
  std::vector<Vec> rays;
  std::vector<Vec> lines;
};

// Polyhedral cone {x : <n, x> <= 0 for n in normals}; generator form cached on
// demand (conversion requires dim <= 3).
struct PolyhedralCone {
  size_t dim = 0;
  std::vector<Vec> normals;             // h-rep, homogeneous
  std::optional<ConeGens> gens;         // v-rep when available
  bool hrep_known = true;               // false: only gens describe the cone

  explicit PolyhedralCone(size_t d = 0) : dim(d) {}

  bool contains(const Vec& x) const {
    if (x.size() != dim) throw InputError("point dimension mismatch");
    if (!hrep_known) throw WrongRegimeError("cone membership needs an h-rep here");
    for (const auto& n : normals) {
      if (dot(n, x).sign() > 0) return false;
    }
    return true;
  }

  HPolyhedron as_hpoly() const {
    HPolyhedron out(dim);
    for (const auto& n : normals) out.add(n, Rat(0));
    return out;
  }

  // The cone {0}: canonical h-rep intersects all coordinate halfspaces both ways.
  static PolyhedralCone zero(size_t d) {
    PolyhedralCone c(d);
    for (size_t i = 0; i < d; ++i) {
      Vec e = zero_vec(d);
      e[i] = 1;
      c.normals.push_back(e);
      c.normals.push_back(negate(e));
    }
    c.gens = ConeGens{};
    return c;
  }

  bool is_zero_cone() const {
    if (gens) return gens->rays.empty() && gens->lines.empty();
    throw Error("is_zero_cone needs generator form; call ensure_generators first");
  }
};

// Finite union of H-polyhedra. Empty union = empty set.
struct PolyhedralUnion {
  size_t dim = 0;
  std::vector<HPolyhedron> pieces;

  explicit PolyhedralUnion(size_t d = 0) : dim(d) {}
  PolyhedralUnion(size_t d, std::vector<HPolyhedron> ps) : dim(d), pieces(std::move(ps)) {
    for (const auto& p : pieces) {
      if (p.dim != dim) throw InputError("union piece dimension mismatch");
    }
  }

  bool contains(const Vec& x) const {
    for (const auto& p : pieces) {
      if (p.contains(x)) return true;
    }
    return false;
  }
};

}  // namespace mintime

#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "mintime/linalg.hpp"
#include "mintime/polyhedron.hpp"

namespace mintime {

// Exact vertex/ray/facet enumeration for dimension <= 3 (cones are homogenized
// into one dimension higher internally, so the core works up to dimension 4).
// Everything reduces to one kernel: extreme rays of {x : A x <= 0}.

namespace detail {

inline void check_enum_dim(size_t dim, const char* what) {
  if (dim > 3) {
    throw UnsupportedDimensionError(std::string(what) +
                                    ": explicit enumeration supports dimension <= 3");
  }
}

// Deduplicating collector for primitive direction vectors.
struct DirSet {
  std::set<std::vector<std::string>> seen;
  std::vector<Vec> out;

  void insert(const Vec& v) {
    std::vector<std::string> key;
    key.reserve(v.size());
    for (const auto& x : v) key.push_back(x.str());
    if (seen.insert(std::move(key)).second) out.push_back(v);
  }
};

// Extreme rays of a *pointed* cone {y : A y <= 0} (ker A = {0}).
// Every extreme ray has >= dim-1 independent active rows, so scanning all
// (dim-1)-subsets finds them all; the A y <= 0 filter keeps candidates valid.
inline std::vector<Vec> pointed_cone_rays(const Mat& a, size_t dim) {
  DirSet rays;
  if (dim == 0) return rays.out;
  const auto admits = [&](const Vec& t) {
    for (const auto& row : a) {
      if (dot(row, t).sign() > 0) return false;
    }
    return true;
  };
  const size_t k = dim - 1;
  // Iterate over all k-subsets of row indices (k = 0 means the single empty set).
  std::vector<size_t> idx(k);
  const size_t m = a.size();
  if (k > m) return rays.out;  // cannot be pointed with so few rows unless dim<=1
  for (size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    Mat sub;
    for (size_t i : idx) sub.push_back(a[i]);
    const std::vector<Vec> null = kernel_basis(sub.empty() ? Mat(0, zero_vec(dim)) : sub);
    if (sub.empty() && dim == 1) {
      // No constraints selected in dimension 1: candidates are +-e1.
      for (int s : {1, -1}) {
        Vec t = {Rat(s)};
        if (admits(t)) rays.insert(primitive(t));
      }
    } else if (null.size() == 1) {
      const Vec t = primitive(null[0]);
      if (admits(t)) rays.insert(t);
      const Vec nt = negate(t);
      if (admits(nt)) rays.insert(nt);
    }
    // Next subset in lexicographic order.
    if (k == 0) break;
    size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return rays.out;
}

}  // namespace detail

// Generators (extreme rays + lineality basis) of {x : <n,x> <= 0, n in normals}.
// Handles non-pointed cones by splitting off the lineality space first.
inline ConeGens cone_generators_hrep(const std::vector<Vec>& normals, size_t dim) {
  ConeGens out;
  Mat a(normals.begin(), normals.end());
  std::vector<Vec> lines = a.empty() ? std::vector<Vec>() : kernel_basis(a);
  if (a.empty()) {
    // No constraints: the whole space.
    for (size_t i = 0; i < dim; ++i) {
      Vec e = zero_vec(dim);
      e[i] = 1;
      out.lines.push_back(e);
    }
    return out;
  }
  for (const auto& l : lines) out.lines.push_back(primitive(l, true));
  if (out.lines.size() == dim) return out;  // whole space again

  // Complement basis: extend the lineality basis with coordinate directions.
  Mat basis = lines;
  std::vector<Vec> complement;
  for (size_t i = 0; i < dim; ++i) {
    Vec e = zero_vec(dim);
    e[i] = 1;
    Mat probe = basis;
    probe.push_back(e);
    if (rank(probe) > basis.size()) {
      basis.push_back(e);
      complement.push_back(e);
    }
  }
  // Constrain in complement coordinates: x = sum z_j * complement[j] (+ lineality).
  const size_t k = complement.size();
  Mat reduced;
  for (const auto& row : a) {
    Vec r(k, Rat(0));
    for (size_t j = 0; j < k; ++j) r[j] = dot(row, complement[j]);
    reduced.push_back(std::move(r));
  }
  for (const Vec& t : detail::pointed_cone_rays(reduced, k)) {
    Vec x = zero_vec(dim);
    for (size_t j = 0; j < k; ++j) x = add(x, scale(t[j], complement[j]));
    out.rays.push_back(primitive(x));
  }
  return out;
}

inline ConeGens cone_generators(const PolyhedralCone& c) {
  detail::check_enum_dim(c.dim, "cone_generators");
  return cone_generators_hrep(c.normals, c.dim);
}

inline void ensure_generators(PolyhedralCone& c) {
  if (!c.gens) c.gens = cone_generators(c);
}

// H-representation of cone(rays) + span(lines) via polarity: facet normals of
// the cone are the extreme rays of its polar {a : <a,r> <= 0, <a,l> == 0}.
inline std::vector<Vec> cone_hrep_from_generators(const ConeGens& g, size_t dim) {
  detail::check_enum_dim(dim, "cone_hrep_from_generators");
  std::vector<Vec> polar_rows;
  for (const auto& r : g.rays) polar_rows.push_back(r);
  for (const auto& l : g.lines) {
    polar_rows.push_back(l);
    polar_rows.push_back(negate(l));
  }
  const ConeGens polar = cone_generators_hrep(polar_rows, dim);
  std::vector<Vec> normals;
  for (const auto& r : polar.rays) normals.push_back(r);
  for (const auto& l : polar.lines) {
    normals.push_back(l);
    normals.push_back(negate(l));
  }
  return normals;
}

inline PolyhedralCone cone_from_generators(ConeGens g, size_t dim) {
  PolyhedralCone c(dim);
  c.normals = cone_hrep_from_generators(g, dim);
  c.gens = std::move(g);
  return c;
}

// Vertices, rays and lines of an H-polyhedron via homogenization.
inline Generators polyhedron_generators(const HPolyhedron& p) {
  detail::check_enum_dim(p.dim, "polyhedron_generators");
  std::vector<Vec> rows;
  for (const auto& h : p.faces) {
    Vec r = h.normal;
    r.push_back(-h.offset);
    rows.push_back(std::move(r));
  }
  Vec tpos = zero_vec(p.dim + 1);
  tpos[p.dim] = -1;  // -t <= 0
  rows.push_back(std::move(tpos));
  const ConeGens cg = cone_generators_hrep(rows, p.dim + 1);
  Generators out;
  for (const auto& r : cg.rays) {
    const Rat t = r.back();
    Vec x(r.begin(), r.end() - 1);
    if (t.sign() > 0) {
      out.points.push_back(scale(Rat(1) / t, x));
    } else {
      out.rays.push_back(primitive(x));
    }
  }
  for (const auto& l : cg.lines) {
    // The homogenizing coordinate of a line is forced to 0 by t >= 0.
    Vec x(l.begin(), l.end() - 1);
    out.lines.push_back(primitive(x, true));
  }
  return out;
}

// Facets of conv(points) + cone(rays) + span(lines) via the polar construction
// on the homogenization. Lines of the polar become equalities (halfspace pairs).
inline HPolyhedron facets_from_generators(const Generators& g, size_t dim) {
  detail::check_enum_dim(dim, "facets_from_generators");
  if (g.empty()) return empty_hpoly(dim);
  std::vector<Vec> polar_rows;  // rows over (a, beta)
  for (const auto& u : g.points) {
    Vec r = u;
    r.push_back(Rat(1));
    polar_rows.push_back(std::move(r));
  }
  for (const auto& ray : g.rays) {
    Vec r = ray;
    r.push_back(Rat(0));
    polar_rows.push_back(std::move(r));
  }
  for (const auto& l : g.lines) {
    Vec r = l;
    r.push_back(Rat(0));
    polar_rows.push_back(r);
    polar_rows.push_back(negate(r));
  }
  const ConeGens polar = cone_generators_hrep(polar_rows, dim + 1);
  HPolyhedron out(dim);
  const auto push = [&](const Vec& v) {
    Vec normal(v.begin(), v.end() - 1);
    if (is_zero(normal)) return;  // the vacuous 0.x <= const direction
    out.faces.push_back(canonical_halfspace({std::move(normal), -v.back()}));
  };
  for (const auto& r : polar.rays) push(r);
  for (const auto& l : polar.lines) {
    push(l);
    push(negate(l));
  }
  // Deduplicate (canonical form makes duplicates literal).
  std::sort(out.faces.begin(), out.faces.end(), [](const Halfspace& a, const Halfspace& b) {
    if (a.normal != b.normal) return lex_less(a.normal, b.normal);
    return a.offset < b.offset;
  });
  out.faces.erase(std::unique(out.faces.begin(), out.faces.end()), out.faces.end());
  return out;
}

inline HPolyhedron facets_of_polytope(const VPolytope& v) {
  return facets_from_generators({v.vertices, {}, {}}, v.dim);
}

// Removes points inside the hull of the others; sorts the survivors for a
// canonical vertex list. Works in any dimension (pure LP).
inline VPolytope canonical_vertices(const VPolytope& p) {
  std::vector<Vec> pts = p.vertices;
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<bool> removed(pts.size(), false);
  for (size_t i = 0; i < pts.size(); ++i) {
    std::vector<Vec> others;
    for (size_t j = 0; j < pts.size(); ++j) {
      if (j != i && !removed[j]) others.push_back(pts[j]);
    }
    if (others.empty()) continue;
    if (VPolytope(p.dim, others).contains(pts[i])) removed[i] = true;
  }
  std::vector<Vec> keep;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (!removed[i]) keep.push_back(pts[i]);
  }
  return VPolytope(p.dim, keep);
}

// Drops redundant halfspaces: face i is redundant when the others already
// force <a_i, x> <= b_i (checked by maximizing the left side).
inline HPolyhedron minimal_faces(const HPolyhedron& p) {
  std::vector<Halfspace> faces;
  for (const auto& h : p.faces) faces.push_back(canonical_halfspace(h));
  std::sort(faces.begin(), faces.end(), [](const Halfspace& a, const Halfspace& b) {
    if (a.normal != b.normal) return lex_less(a.normal, b.normal);
    return a.offset < b.offset;
  });
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  std::vector<bool> removed(faces.size(), false);
  for (size_t i = 0; i < faces.size(); ++i) {
    LinearProgram lp(p.dim);
    lp.objective = negate(faces[i].normal);  // maximize <a_i, x>
    for (size_t j = 0; j < faces.size(); ++j) {
      if (j != i && !removed[j]) lp.add_ineq(faces[j].normal, faces[j].offset);
    }
    const LPResult r = lp_solve(lp);
    if (r.status == LPStatus::optimal && -r.value <= faces[i].offset) removed[i] = true;
  }
  HPolyhedron out(p.dim);
  for (size_t i = 0; i < faces.size(); ++i) {
    if (!removed[i]) out.faces.push_back(faces[i]);
  }
  return out;
}

// Minkowski sum via generators: sum points pairwise, pool rays and lines.
inline Generators minkowski_sum(const Generators& a, const Generators& b) {
  Generators out;
  if (a.empty() || b.empty()) return out;
  for (const auto& u : a.points) {
    for (const auto& w : b.points) out.points.push_back(add(u, w));
  }
  out.rays = a.rays;
  out.rays.insert(out.rays.end(), b.rays.begin(), b.rays.end());
  out.lines = a.lines;
  out.lines.insert(out.lines.end(), b.lines.begin(), b.lines.end());
  return out;
}

inline HPolyhedron minkowski_sum_hpoly(const HPolyhedron& p, const VPolytope& q) {
  const Generators gp = polyhedron_generators(p);
  const Generators sum = minkowski_sum(gp, {q.vertices, {}, {}});
  return minimal_faces(facets_from_generators(sum, p.dim));
}

// Exact squared Euclidean distance to a nonempty polyhedron (dim <= 3): the
// nearest point lies in some face, and projecting onto each face's affine span
// plus a membership filter finds it.
struct NearestPoint {
  Rat dist_sq;
  Vec point;
};

inline NearestPoint nearest_point(const HPolyhedron& p, const Vec& x) {
  detail::check_enum_dim(p.dim, "nearest_point");
  if (p.contains(x)) return {Rat(0), x};
  std::optional<NearestPoint> best;
  const size_t m = p.faces.size();
  // All active subsets of size 1..dim; a spanning subset of the true active set
  // appears among them.
  std::vector<std::vector<size_t>> subsets;
  for (size_t i = 0; i < m; ++i) subsets.push_back({i});
  if (p.dim >= 2) {
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = i + 1; j < m; ++j) subsets.push_back({i, j});
    }
  }
  if (p.dim >= 3) {
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = i + 1; j < m; ++j) {
        for (size_t k = j + 1; k < m; ++k) subsets.push_back({i, j, k});
      }
    }
  }
  for (const auto& sel : subsets) {
    Mat a;
    Vec b;
    for (size_t i : sel) {
      a.push_back(p.faces[i].normal);
      b.push_back(p.faces[i].offset);
    }
    const auto y0 = solve_linear(a, b);
    if (!y0) continue;
    const std::vector<Vec> kern = kernel_basis(a);
    // Least squares onto the affine flat y0 + span(kern).
    Vec y = *y0;
    if (!kern.empty()) {
      Mat gram(kern.size(), zero_vec(kern.size()));
      Vec rhs(kern.size(), Rat(0));
      const Vec d = sub(x, *y0);
      for (size_t i = 0; i < kern.size(); ++i) {
        rhs[i] = dot(kern[i], d);
        for (size_t j = 0; j < kern.size(); ++j) gram[i][j] = dot(kern[i], kern[j]);
      }
      const auto z = solve_linear(gram, rhs);
      if (!z) continue;  // cannot happen for independent kernel vectors
      for (size_t i = 0; i < kern.size(); ++i) y = add(y, scale((*z)[i], kern[i]));
    }
    if (!p.contains(y)) continue;
    const Rat d2 = norm_sq(sub(x, y));
    if (!best || d2 < best->dist_sq || (d2 == best->dist_sq && lex_less(y, best->point))) {
      best = {d2, y};
    }
  }
  if (!best) throw Error("nearest_point: no candidate face (is the polyhedron empty?)");
  return *best;
}

}  // namespace mintime

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mintime/set_algebra.hpp"

namespace mintime {

namespace detail {

// H-rep + generators of the conic hull of finitely many direction vectors.
// In dimensions above the enumeration gate the h-rep is left unknown and the
// cone answers membership through its generators only.
inline PolyhedralCone conic_hull(const std::vector<Vec>& dirs, size_t dim) {
  ConeGens gens;
  DirSet dedupe;
  for (const auto& d : dirs) {
    if (!is_zero(d)) dedupe.insert(primitive(d));
  }
  gens.rays = dedupe.out;
  if (dim <= 3) {
    PolyhedralCone c = cone_from_generators(gens, dim);
    return cone_canonical(c);
  }
  PolyhedralCone c(dim);
  c.gens = std::move(gens);
  c.hrep_known = false;
  return c;
}

}  // namespace detail

// Regular (one-sided limit) normal cone to a finite union of polyhedra:
// empty away from the set; on the set, the intersection over the pieces
// through the point of the conic hulls of their active face normals.
inline std::optional<PolyhedralCone> frechet_normal_cone(const PolyhedralUnion& omega,
                                                         const Vec& x) {
  check_dim(x, omega.dim, "frechet_normal_cone point");
  std::vector<PolyhedralCone> piece_cones;
  for (const auto& piece : omega.pieces) {
    if (!piece.contains(x)) continue;
    std::vector<Vec> active;
    for (size_t i : piece.active_at(x)) active.push_back(piece.faces[i].normal);
    piece_cones.push_back(detail::conic_hull(active, omega.dim));
  }
  if (piece_cones.empty()) return std::nullopt;
  if (piece_cones.size() == 1) return piece_cones[0];
  if (omega.dim > 3)
    throw UnsupportedDimensionError("normal cone to a union needs dim <= 3");
  PolyhedralCone out = piece_cones[0];
  for (size_t i = 1; i < piece_cones.size(); ++i) out = cone_intersect(out, piece_cones[i]);
  return cone_canonical(out);
}

namespace detail {

// one active hyperplane through the base point with per-(piece,row) orientation
struct ActivePlane {
  Vec normal;  // primitive, sign-normalized
};

inline std::string cone_key(const PolyhedralCone& c) {
  std::string k;
  for (const auto& n : c.normals) k += vec_str(n) + ";";
  return k;
}

}  // namespace detail

// All limits of regular normal cones along set points approaching x: the
// local face arrangement is stratified by sign vectors of the active
// hyperplanes; each stratum that meets the set nearby contributes its
// (constant) regular cone. Convex inputs collapse to the regular cone.
inline std::vector<PolyhedralCone> limiting_normal_cone_pieces(const PolyhedralUnion& omega,
                                                               const Vec& x) {
  check_dim(x, omega.dim, "limiting_normal_cone point");
  // pieces through x and their active rows
  struct PieceInfo {
    std::vector<size_t> plane_of_row;  // active-plane index per active row
    std::vector<int> orient;           // +1: row normal = +plane normal
  };
  std::vector<PieceInfo> infos;
  std::vector<Vec> planes;
  std::map<std::string, size_t> plane_index;
  bool any_piece = false;
  for (const auto& piece : omega.pieces) {
    if (!piece.contains(x)) continue;
    any_piece = true;
    PieceInfo info;
    for (size_t i : piece.active_at(x)) {
      const Vec pos = primitive(piece.faces[i].normal, /*sign_normalize=*/true);
      const std::string key = vec_str(pos);
      auto it = plane_index.find(key);
      size_t id;
      if (it == plane_index.end()) {
        id = planes.size();
        plane_index.emplace(key, id);
        planes.push_back(pos);
      } else {
        id = it->second;
      }
      info.plane_of_row.push_back(id);
      info.orient.push_back(primitive(piece.faces[i].normal) == pos ? 1 : -1);
    }
    infos.push_back(std::move(info));
  }
  if (!any_piece) return {};
  if (infos.size() == 1 && planes.empty()) return {detail::conic_hull({}, omega.dim)};
  if (omega.dim > 3 && infos.size() > 1)
    throw UnsupportedDimensionError("limiting cone of a union needs dim <= 3");
  if (infos.size() == 1) {
    // convex piece: regular = limiting
    return {*frechet_normal_cone(PolyhedralUnion(
                omega.dim, [&] {
                  std::vector<HPolyhedron> ps;
                  for (const auto& piece : omega.pieces)
                    if (piece.contains(x)) ps.push_back(piece);
                  return ps;
                }()),
            x)};
  }

  std::vector<PolyhedralCone> out;
  std::map<std::string, bool> seen;
  std::vector<int> sign(planes.size(), 0);
  const std::function<void(size_t)> dfs = [&](size_t depth) {
    if (depth < planes.size()) {
      for (int s : {-1, 0, 1}) {
        sign[depth] = s;
        dfs(depth + 1);
      }
      return;
    }
    // stratum nonempty? directions d with <plane_h, d> sign-matching
    StrictSystem sys(omega.dim);
    for (size_t h = 0; h < planes.size(); ++h) {
      if (sign[h] == 0) {
        sys.equal.push_back({planes[h], Rat(0)});
      } else if (sign[h] < 0) {
        sys.strict.push_back({planes[h], Rat(0)});
      } else {
        sys.strict.push_back({negate(planes[h]), Rat(0)});
      }
    }
    if (!strict_system_nonempty(sys)) return;
    // which pieces cover the stratum, and with which rows active there
    std::vector<std::vector<Vec>> active_normals;
    for (const auto& info : infos) {
      bool admissible = true;
      std::vector<Vec> act;
      for (size_t k = 0; k < info.plane_of_row.size(); ++k) {
        const int s = info.orient[k] * sign[info.plane_of_row[k]];
        if (s > 0) {
          admissible = false;
          break;
        }
        if (s == 0) act.push_back(scale(Rat(info.orient[k]), planes[info.plane_of_row[k]]));
      }
      if (admissible) active_normals.push_back(std::move(act));
    }
    if (active_normals.empty()) return;  // stratum misses the set
    PolyhedralCone cone = detail::conic_hull(active_normals[0], omega.dim);
    for (size_t i = 1; i < active_normals.size(); ++i)
      cone = cone_intersect(cone, detail::conic_hull(active_normals[i], omega.dim));
    cone = cone_canonical(cone);
    const std::string key = detail::cone_key(cone);
    if (!seen.emplace(key, true).second) return;
    out.push_back(std::move(cone));
  };
  dfs(0);
  // drop cones contained in another contributed cone, keep a deterministic order
  std::vector<PolyhedralCone> minimal;
  for (size_t i = 0; i < out.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < out.size() && !dominated; ++j) {
      if (i == j) continue;
      const bool fwd = cone_is_subset(out[i], out[j]);
      const bool bwd = cone_is_subset(out[j], out[i]);
      if (fwd && !bwd) dominated = true;
      if (fwd && bwd && j < i) dominated = true;  // set-equal duplicates: keep the first
    }
    if (!dominated) minimal.push_back(out[i]);
  }
  std::sort(minimal.begin(), minimal.end(),
            [](const PolyhedralCone& a, const PolyhedralCone& b) {
              return detail::cone_key(a) < detail::cone_key(b);
            });
  return minimal;
}

inline PolyhedralUnion limiting_normal_cone(const PolyhedralUnion& omega, const Vec& x) {
  PolyhedralUnion u;
  u.dim = omega.dim;
  for (const auto& c : limiting_normal_cone_pieces(omega, x)) u.pieces.push_back(c.as_hpoly());
  return u;
}

}  // namespace mintime

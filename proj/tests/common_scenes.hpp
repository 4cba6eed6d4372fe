#pragma once

// Shared scene builders for the test suites. The same sets are shipped as
// runtime fixtures; tests build them directly to stay independent of I/O.

#include "mintime/dynamics.hpp"
#include "mintime/polyhedron.hpp"

namespace mintime::testing {

// Horizontal unit segment dynamics [-1,1] x {0}.
inline Dynamics segment_dynamics() {
  return Dynamics::polytope(VPolytope(2, {{Rat(-1), Rat(0)}, {Rat(1), Rat(0)}}));
}

// Plane minus the open unit square: four closed halfplanes.
inline PolyhedralUnion box_complement_target() {
  PolyhedralUnion u;
  u.dim = 2;
  const auto half = [](Rat a, Rat b, Rat c) {
    HPolyhedron p(2);
    p.add({std::move(a), std::move(b)}, std::move(c));
    return p;
  };
  u.pieces.push_back(half(Rat(-1), Rat(0), Rat(-1)));  // x1 >= 1
  u.pieces.push_back(half(Rat(1), Rat(0), Rat(-1)));   // x1 <= -1
  u.pieces.push_back(half(Rat(0), Rat(-1), Rat(-1)));  // x2 >= 1
  u.pieces.push_back(half(Rat(0), Rat(1), Rat(-1)));   // x2 <= -1
  return u;
}

// Closed unit square target.
inline PolyhedralUnion box_target() {
  HPolyhedron p(2);
  p.add({Rat(1), Rat(0)}, Rat(1));
  p.add({Rat(-1), Rat(0)}, Rat(1));
  p.add({Rat(0), Rat(1)}, Rat(1));
  p.add({Rat(0), Rat(-1)}, Rat(1));
  PolyhedralUnion u;
  u.dim = 2;
  u.pieces.push_back(p);
  return u;
}

// One-dimensional forward dynamics [0,1] with the left half-line target.
inline Dynamics forward_dynamics_1d() {
  return Dynamics::polytope(VPolytope(1, {{Rat(0)}, {Rat(1)}}));
}

inline PolyhedralUnion halfline_target_1d() {
  HPolyhedron p(1);
  p.add({Rat(1)}, Rat(0));  // x <= 0
  PolyhedralUnion u;
  u.dim = 1;
  u.pieces.push_back(p);
  return u;
}

// One-dimensional backward dynamics [-1,0]: reaches the left half-line with
// minimal time max(0, x).
inline Dynamics backward_dynamics_1d() {
  return Dynamics::polytope(VPolytope(1, {{Rat(-1)}, {Rat(0)}}));
}

// Full square dynamics [-1,1]^2 (origin interior, gauge = sup-norm).
inline Dynamics square_dynamics() {
  return Dynamics::polytope(VPolytope(
      2, {{Rat(1), Rat(1)}, {Rat(1), Rat(-1)}, {Rat(-1), Rat(1)}, {Rat(-1), Rat(-1)}}));
}

inline Vec pt(Rat a, Rat b) { return {std::move(a), std::move(b)}; }

// H-polyhedron from rows of (normal..., offset).
inline HPolyhedron make_h(size_t dim, std::vector<std::vector<Rat>> rows) {
  HPolyhedron p(dim);
  for (auto& r : rows) {
    Vec n(r.begin(), r.end() - 1);
    p.add(std::move(n), r.back());
  }
  return p;
}

// The singleton {p} as an H-polyhedron.
inline HPolyhedron singleton(const Vec& p) {
  HPolyhedron out(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    Vec e = zero_vec(p.size());
    e[i] = 1;
    out.add(e, p[i]);
    out.add(negate(e), -p[i]);
  }
  return out;
}

}  // namespace mintime::testing

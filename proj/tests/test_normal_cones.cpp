#include <catch2/catch_amalgamated.hpp>

#include "common_scenes.hpp"
#include "mintime/normal_cone.hpp"
#include "mintime/support_sets.hpp"

using namespace mintime;
using namespace mintime::testing;

namespace {

PolyhedralCone ray_cone(std::vector<Vec> rays, size_t dim = 2) {
  return cone_from_generators(ConeGens{std::move(rays), {}}, dim);
}

}  // namespace

TEST_CASE("support level set of the segment dynamics is the unit strip") {
  const Dynamics f = segment_dynamics();
  const DualBand cs = c_star(f);
  CHECK(cs.tight);
  HPolyhedron strip(2);
  strip.add({Rat(1), Rat(0)}, Rat(1));
  strip.add({Rat(-1), Rat(0)}, Rat(1));
  CHECK(hpoly_equals(cs.inner, strip));
  CHECK(hpoly_equals(cs.outer, strip));
  CHECK(in_c_star(f, Rat(0), pt(Rat(1), Rat(100))));
  CHECK_FALSE(in_c_star(f, Rat(0), pt(Rat(101, 100), Rat(0))));
  // widening: eps = 1 with ||F|| = 1 doubles the halfwidth
  const DualBand wide = c_star(f, Rat(1));
  CHECK(wide.tight);
  CHECK(wide.inner.contains(pt(Rat(2), Rat(-7))));
  CHECK_FALSE(wide.inner.contains(pt(Rat(201, 100), Rat(0))));
}

TEST_CASE("irrational dynamics bound still gives exact membership and a band") {
  const Dynamics f = Dynamics::polytope(VPolytope(
      2, {{Rat(1), Rat(1)}, {Rat(1), Rat(-1)}, {Rat(-1), Rat(1)}, {Rat(-1), Rat(-1)}}));
  // ||F|| = sqrt(2); with eps=1 the cutoff is 1+sqrt(2) = 2.414...
  CHECK(in_c_star(f, Rat(1), pt(Rat(-12, 5), Rat(0))));          // 2.4 <= 1+sqrt2
  CHECK_FALSE(in_c_star(f, Rat(1), pt(Rat(-121, 50), Rat(0))));  // 2.42 > 1+sqrt2
  const DualBand band = c_star(f, Rat(1));
  CHECK_FALSE(band.tight);
  CHECK(hpoly_subset(band.inner, band.outer));
  CHECK(band.inner.contains(pt(Rat(-12, 5), Rat(0))));
  CHECK_FALSE(band.outer.contains(pt(Rat(-121, 50), Rat(0))));
}

TEST_CASE("two-sided support set of the segment dynamics") {
  const Dynamics f = segment_dynamics();
  SECTION("exact set at eps = 0: the two boundary lines of the strip") {
    const PolyhedralUnion s = s_star_exact(f);
    PolyhedralUnion expect(2, {});
    HPolyhedron right(2);
    right.add({Rat(1), Rat(0)}, Rat(1));
    right.add({Rat(-1), Rat(0)}, Rat(-1));
    HPolyhedron left(2);
    left.add({Rat(1), Rat(0)}, Rat(-1));
    left.add({Rat(-1), Rat(0)}, Rat(1));
    expect.pieces = {right, left};
    CHECK(union_equals(s, expect));
    CHECK(in_s_star(f, Rat(0), pt(Rat(1), Rat(5))));
    CHECK(in_s_star(f, Rat(0), pt(Rat(-1), Rat(0))));
    CHECK_FALSE(in_s_star(f, Rat(0), pt(Rat(1, 2), Rat(0))));
    CHECK_FALSE(in_s_star(f, Rat(0), pt(Rat(0), Rat(0))));
  }
  SECTION("eps band: 1/2 <= |x1| <= 3/2") {
    const DualUnionBand b = s_star(f, Rat(1, 2));
    CHECK(b.tight);
    CHECK(union_equals(b.inner, b.outer));
    CHECK(in_s_star(f, Rat(1, 2), pt(Rat(1, 2), Rat(9))));
    CHECK(in_s_star(f, Rat(1, 2), pt(Rat(-3, 2), Rat(0))));
    CHECK_FALSE(in_s_star(f, Rat(1, 2), pt(Rat(49, 100), Rat(0))));
    CHECK_FALSE(in_s_star(f, Rat(1, 2), pt(Rat(151, 100), Rat(0))));
    CHECK(b.inner.contains(pt(Rat(1), Rat(3))));
  }
}

TEST_CASE("positive dual cone of the dynamics") {
  const Dynamics seg = segment_dynamics();
  const PolyhedralCone fp = f_dual_plus(seg);
  CHECK(cone_contains(fp, pt(Rat(0), Rat(5))));
  CHECK(cone_contains(fp, pt(Rat(0), Rat(-5))));
  CHECK_FALSE(cone_contains(fp, pt(Rat(1, 10), Rat(0))));
  CHECK(in_f_dual_plus(seg, pt(Rat(0), Rat(-3))));
  CHECK_FALSE(in_f_dual_plus(seg, pt(Rat(-1), Rat(0))));

  const Dynamics fwd = forward_dynamics_1d();
  CHECK(in_f_dual_plus(fwd, {Rat(2)}));
  CHECK_FALSE(in_f_dual_plus(fwd, {Rat(-1, 10)}));

  const Dynamics ball = Dynamics::ball(2, Rat(3));
  CHECK(f_dual_plus(ball).is_zero_cone());
  CHECK(in_f_dual_plus(ball, pt(Rat(0), Rat(0))));
  CHECK_FALSE(in_f_dual_plus(ball, pt(Rat(0), Rat(1, 1000))));
}

TEST_CASE("regular normal cone of the box") {
  const PolyhedralUnion omega = box_target();
  SECTION("facet point") {
    const auto n = frechet_normal_cone(omega, pt(Rat(1), Rat(0)));
    REQUIRE(n.has_value());
    CHECK(cone_equals(*n, ray_cone({{Rat(1), Rat(0)}})));
  }
  SECTION("corner point") {
    const auto n = frechet_normal_cone(omega, pt(Rat(1), Rat(1)));
    REQUIRE(n.has_value());
    CHECK(cone_equals(*n, ray_cone({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}})));
  }
  SECTION("interior gives the zero cone, outside gives nothing") {
    const auto n = frechet_normal_cone(omega, pt(Rat(0), Rat(0)));
    REQUIRE(n.has_value());
    CHECK(n->is_zero_cone());
    CHECK_FALSE(frechet_normal_cone(omega, pt(Rat(2), Rat(0))).has_value());
  }
}

TEST_CASE("regular normal cone of the box complement") {
  const PolyhedralUnion omega = box_complement_target();
  SECTION("boundary edge looks like a halfplane from inside") {
    const auto n = frechet_normal_cone(omega, pt(Rat(1), Rat(0)));
    REQUIRE(n.has_value());
    CHECK(cone_equals(*n, ray_cone({{Rat(-1), Rat(0)}})));
  }
  SECTION("reentrant corner: two pieces meet, cones intersect to zero") {
    const auto n = frechet_normal_cone(omega, pt(Rat(1), Rat(1)));
    REQUIRE(n.has_value());
    CHECK(n->is_zero_cone());
  }
  SECTION("top edge") {
    const auto n = frechet_normal_cone(omega, pt(Rat(0), Rat(1)));
    REQUIRE(n.has_value());
    CHECK(cone_equals(*n, ray_cone({{Rat(0), Rat(-1)}})));
  }
}

TEST_CASE("one-dimensional half-line cone") {
  const PolyhedralUnion omega = halfline_target_1d();
  const auto n = frechet_normal_cone(omega, {Rat(0)});
  REQUIRE(n.has_value());
  CHECK(cone_equals(*n, ray_cone({{Rat(1)}}, 1)));
  CHECK(frechet_normal_cone(omega, {Rat(-2)})->is_zero_cone());
}

TEST_CASE("limiting cone equals the regular cone on convex sets") {
  const PolyhedralUnion omega = box_target();
  for (const Vec& x : {pt(Rat(1), Rat(0)), pt(Rat(1), Rat(1)), pt(Rat(0), Rat(0))}) {
    const auto pieces = limiting_normal_cone_pieces(omega, x);
    REQUIRE(pieces.size() == 1);
    CHECK(cone_equals(pieces[0], *frechet_normal_cone(omega, x)));
  }
  CHECK(limiting_normal_cone_pieces(omega, pt(Rat(5), Rat(5))).empty());
}

TEST_CASE("limiting cone on the box complement") {
  const PolyhedralUnion omega = box_complement_target();
  SECTION("edge interior: the set is locally one halfplane") {
    const auto pieces = limiting_normal_cone_pieces(omega, pt(Rat(1), Rat(1, 2)));
    REQUIRE(pieces.size() == 1);
    CHECK(cone_equals(pieces[0], ray_cone({{Rat(-1), Rat(0)}})));
  }
  SECTION("reentrant corner keeps both edge normals as separate limits") {
    const auto pieces = limiting_normal_cone_pieces(omega, pt(Rat(1), Rat(1)));
    REQUIRE(pieces.size() == 2);
    const PolyhedralUnion u = limiting_normal_cone(omega, pt(Rat(1), Rat(1)));
    CHECK(u.contains(pt(Rat(-5), Rat(0))));
    CHECK(u.contains(pt(Rat(0), Rat(-3))));
    CHECK(u.contains(pt(Rat(0), Rat(0))));
    CHECK_FALSE(u.contains(pt(Rat(-1), Rat(-1))));
    CHECK_FALSE(u.contains(pt(Rat(1), Rat(0))));
    // strictly bigger than the regular cone {0}
    CHECK(frechet_normal_cone(omega, pt(Rat(1), Rat(1)))->is_zero_cone());
  }
  SECTION("top edge golden value") {
    const auto pieces = limiting_normal_cone_pieces(omega, pt(Rat(0), Rat(1)));
    REQUIRE(pieces.size() == 1);
    CHECK(cone_equals(pieces[0], ray_cone({{Rat(0), Rat(-1)}})));
  }
}

TEST_CASE("union covering the whole plane has only the zero normal cone") {
  HPolyhedron lower(2), upper(2);
  lower.add({Rat(0), Rat(1)}, Rat(0));
  upper.add({Rat(0), Rat(-1)}, Rat(0));
  const PolyhedralUnion omega(2, {lower, upper});
  const auto pieces = limiting_normal_cone_pieces(omega, pt(Rat(0), Rat(0)));
  REQUIRE(pieces.size() == 1);
  CHECK(pieces[0].is_zero_cone());
  CHECK(frechet_normal_cone(omega, pt(Rat(0), Rat(0)))->is_zero_cone());
}

TEST_CASE("two quadrants meeting at the origin produce the four axis rays") {
  HPolyhedron q1(2), q3(2);
  q1.add({Rat(-1), Rat(0)}, Rat(0));
  q1.add({Rat(0), Rat(-1)}, Rat(0));
  q3.add({Rat(1), Rat(0)}, Rat(0));
  q3.add({Rat(0), Rat(1)}, Rat(0));
  const PolyhedralUnion omega(2, {q1, q3});
  CHECK(frechet_normal_cone(omega, pt(Rat(0), Rat(0)))->is_zero_cone());
  const auto pieces = limiting_normal_cone_pieces(omega, pt(Rat(0), Rat(0)));
  CHECK(pieces.size() == 4);
  const PolyhedralUnion u = limiting_normal_cone(omega, pt(Rat(0), Rat(0)));
  for (const Vec& d : {pt(Rat(1), Rat(0)), pt(Rat(-1), Rat(0)), pt(Rat(0), Rat(1)),
                       pt(Rat(0), Rat(-1))}) {
    CHECK(u.contains(d));
  }
  CHECK_FALSE(u.contains(pt(Rat(1), Rat(1))));
  CHECK_FALSE(u.contains(pt(Rat(-1), Rat(1))));
}

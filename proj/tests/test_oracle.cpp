#include "mintime/oracle.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <set>
#include <string>

#include "common_scenes.hpp"
#include "mintime/subdiff.hpp"

using namespace mintime;
using namespace mintime::testing;

namespace {

bool cloud_has(const DualCloud& c, const Rat& a, const Rat& b) {
  return c.contains_member(pt(a, b));
}

// every cloud member must land inside the formula set, every formula grid
// point must be picked up by the cloud: the two computations are independent.
void check_cloud_matches_set(const DualCloud& cloud, const PolyhedralUnion& set) {
  for (const Vec& m : cloud.members) {
    INFO("cloud member " << vec_str(m) << " outside formula set");
    CHECK(set.contains(m));
  }
  const SamplingPlan plan = SamplingPlan::defaults();
  size_t grid_in_set = 0;
  for (const Vec& g :
       oracle_detail::box_grid(set.dim, plan.grid_halfwidth, plan.grid_step)) {
    if (!set.contains(g)) continue;
    ++grid_in_set;
    INFO("formula point " << vec_str(g) << " missing from cloud");
    CHECK(cloud.contains_member(g));
  }
  CHECK(grid_in_set > 0);
}

}  // namespace

TEST_CASE("sampling plan defaults and environment override") {
  const SamplingPlan plan = SamplingPlan::defaults();
  REQUIRE(plan.radii.size() == 11);
  CHECK(plan.radii.front() == Rat(1, 4));
  CHECK(plan.radii.back() == Rat(1, 4096));
  CHECK(plan.directions == 64);
  CHECK(plan.tolerance == Rat(1, 1000000000));
  REQUIRE_NOTHROW(plan.validate());

  SamplingPlan bad = plan;
  bad.radii[0] = bad.radii[1];
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = plan;
  bad.tolerance = Rat(0);
  CHECK_THROWS_AS(bad.validate(), InputError);

  ::setenv("MINTIME_SAMPLING", "3:8:32", 1);
  const SamplingPlan env = SamplingPlan::from_env();
  CHECK(env.radii.size() == 6);
  CHECK(env.radii.front() == Rat(1, 8));
  CHECK(env.radii.back() == Rat(1, 256));
  CHECK(env.directions == 32);

  ::setenv("MINTIME_SAMPLING", "banana", 1);
  CHECK_THROWS_AS(SamplingPlan::from_env(), InputError);
  ::setenv("MINTIME_SAMPLING", "8:3:32", 1);
  CHECK_THROWS_AS(SamplingPlan::from_env(), InputError);
  ::unsetenv("MINTIME_SAMPLING");
  CHECK(SamplingPlan::from_env().radii.size() == 11);
}

TEST_CASE("direction generators produce exact unit vectors") {
  for (size_t dim : {1u, 2u, 3u, 4u}) {
    const auto dirs = oracle_detail::unit_directions(dim, 64);
    REQUIRE(dirs.size() >= 2);
    std::set<std::string> seen;
    for (const Vec& d : dirs) {
      REQUIRE(d.size() == dim);
      CHECK(norm_sq(d) == Rat(1));
      seen.insert(vec_str(d));
    }
    CHECK(seen.size() == dirs.size());
  }
  CHECK(oracle_detail::unit_directions(2, 64).size() == 64);
  CHECK(oracle_detail::unit_directions(1, 64).size() == 2);
}

TEST_CASE("sampled subgradients on an affine region") {
  const Dynamics f = segment_dynamics();
  const PolyhedralUnion box = box_target();
  const TimeField field = time_field(f, box);
  const SamplingPlan plan = SamplingPlan::defaults();
  const Vec x = pt(Rat(2), Rat(1, 2));  // T = x1 - 1 locally

  SECTION("single dual verdicts") {
    CHECK(sampled_eps_subgradient(field, x, pt(Rat(1), Rat(0)), Rat(0), plan) ==
          Verdict::member);
    CHECK(sampled_eps_subgradient(field, x, pt(Rat(2), Rat(0)), Rat(0), plan) ==
          Verdict::non_member);
    CHECK(sampled_eps_subgradient(field, x, pt(Rat(1, 2), Rat(0)), Rat(0), plan) ==
          Verdict::non_member);
    CHECK(sampled_eps_subgradient(field, x, pt(Rat(1), Rat(1, 8)), Rat(0), plan) ==
          Verdict::non_member);
    // slack 1/4 admits duals within distance 1/4 of the gradient
    CHECK(sampled_eps_subgradient(field, x, pt(Rat(1), Rat(1, 8)), Rat(1, 4), plan) ==
          Verdict::member);
    CHECK(sampled_eps_subgradient(field, x, pt(Rat(3, 2), Rat(0)), Rat(1, 4), plan) ==
          Verdict::non_member);
  }

  SECTION("gradient cloud is the single gradient") {
    const DualCloud cloud = sampled_frechet_subdiff(field, x, Rat(0), plan);
    REQUIRE(cloud.members.size() == 1);
    CHECK(cloud.members[0] == pt(Rat(1), Rat(0)));
    CHECK(cloud.uncertain.empty());
    CHECK(cloud.scanned == 33 * 33);
  }

  SECTION("interior point cloud is the origin") {
    const DualCloud cloud = sampled_frechet_subdiff(field, pt(Rat(0), Rat(0)), Rat(0), plan);
    REQUIRE(cloud.members.size() == 1);
    CHECK(cloud.members[0] == pt(Rat(0), Rat(0)));
  }

  SECTION("slack grows the cloud monotonically") {
    const DualCloud tight = sampled_frechet_subdiff(field, x, Rat(0), plan);
    const DualCloud loose = sampled_frechet_subdiff(field, x, Rat(1, 4), plan);
    CHECK(loose.members.size() > tight.members.size());
    for (const Vec& m : tight.members) CHECK(loose.contains_member(m));
    CHECK(loose.contains_member(pt(Rat(5, 4), Rat(0))));
    CHECK(loose.contains_member(pt(Rat(1), Rat(1, 4))));
    CHECK_FALSE(loose.contains_member(pt(Rat(0), Rat(0))));
  }

  SECTION("infinite base point is rejected") {
    CHECK_THROWS_AS(sampled_frechet_subdiff(field, pt(Rat(0), Rat(2)), Rat(0), plan),
                    WrongRegimeError);
  }
}

TEST_CASE("sampled clouds agree with formula sets at kink points") {
  const Dynamics f = segment_dynamics();
  const SamplingPlan plan = SamplingPlan::defaults();

  SECTION("box boundary point") {
    const PolyhedralUnion box = box_target();
    const TimeField field = time_field(f, box);
    const Vec x = pt(Rat(1), Rat(0));
    const DualCloud cloud = sampled_frechet_subdiff(field, x, Rat(0), plan);
    // formula: [0,1] x {0}; grid has 9 points on it
    CHECK(cloud.members.size() == 9);
    check_cloud_matches_set(cloud, basic_subdiff_inset(f, box, x).set);

    const DualCloud lim = sampled_limiting_subdiff(field, x, plan);
    for (const Vec& m : cloud.members) CHECK(lim.contains_member(m));
    check_cloud_matches_set(lim, basic_subdiff_inset(f, box, x).set);
  }

  SECTION("union corner mixes a segment and a ray") {
    const PolyhedralUnion comp = box_complement_target();
    const TimeField field = time_field(f, comp);
    const Vec x = pt(Rat(1), Rat(1));
    // pointwise strict subgradients collapse to the origin at the corner
    const DualCloud frechet = sampled_frechet_subdiff(field, x, Rat(0), plan);
    REQUIRE(frechet.members.size() == 1);
    CHECK(frechet.members[0] == pt(Rat(0), Rat(0)));

    // nearby boundary points contribute the segment and the downward ray
    const DualCloud lim = sampled_limiting_subdiff(field, x, plan);
    check_cloud_matches_set(lim, basic_subdiff_inset(f, comp, x).set);
    CHECK(cloud_has(lim, Rat(-1), Rat(0)));
    CHECK(cloud_has(lim, Rat(0), Rat(-2)));
    CHECK_FALSE(cloud_has(lim, Rat(-1, 8), Rat(-1, 8)));
  }
}

TEST_CASE("sampled clouds on the curved benchmark field") {
  const TimeField field = unit_ball_complement_field();
  const SamplingPlan plan = SamplingPlan::defaults();
  const Vec origin = pt(Rat(0), Rat(0));

  SECTION("no strict subgradients at the center") {
    const DualCloud cloud = sampled_frechet_subdiff(field, origin, Rat(0), plan);
    CHECK(cloud.members.empty());
    CHECK(cloud.uncertain.empty());
  }

  SECTION("limiting cloud hugs the unit circle") {
    const DualCloud cloud = sampled_limiting_subdiff(field, origin, plan);
    REQUIRE(cloud.members.size() >= 64);
    std::set<std::string> distinct;
    for (const Vec& m : cloud.members) {
      const double r2 = norm_sq(m).to_double();
      CHECK(std::abs(r2 - 1.0) < 3.0e-3);  // |r - 1| <= 1e-3 near r = 1
      distinct.insert(vec_str(m));
    }
    CHECK(distinct.size() >= 64);
  }

  SECTION("field values are certified enclosures") {
    const TimeValue t = field.eval(pt(Rat(1, 3), Rat(1, 3)));
    REQUIRE(t.finite);
    REQUIRE_FALSE(t.exact);
    CHECK(t.enclosure.width() <= Rat(1, 1000000000));
    CHECK(field.eval(pt(Rat(3, 5), Rat(4, 5))).exact);
    CHECK(field.eval(pt(Rat(2), Rat(0))).value == Rat(0));
  }
}

TEST_CASE("sampled singular subgradients detect vertical normals") {
  const Dynamics f = segment_dynamics();
  const PolyhedralUnion comp = box_complement_target();
  const TimeField field = time_field(f, comp);
  const SamplingPlan plan = SamplingPlan::defaults();

  SECTION("jump point grows a downward ray") {
    const DualCloud cloud = sampled_singular_subdiff(field, pt(Rat(0), Rat(1)), plan);
    bool deep = false;
    for (const Vec& m : cloud.members) {
      CHECK(m[0] == Rat(0));        // confined to the vertical axis
      CHECK(m[1].sign() <= 0);      // pointing down
      if (m[1] <= Rat(-1, 2)) deep = true;
    }
    CHECK(deep);
    CHECK(cloud.contains_member(pt(Rat(0), Rat(0))));
    // independent formula for the same set
    const SubdiffResult sing = singular_subdiff_inset(f, comp, pt(Rat(0), Rat(1)));
    for (const Vec& m : cloud.members) CHECK(sing.set.contains(m));
  }

  SECTION("calm point keeps the singular cloud at the origin") {
    const DualCloud cloud = sampled_singular_subdiff(field, pt(Rat(1), Rat(0)), plan);
    REQUIRE(cloud.members.size() == 1);
    CHECK(cloud.members[0] == pt(Rat(0), Rat(0)));
  }
}

TEST_CASE("sampled eps-normals of polyhedral targets") {
  const SamplingPlan plan = SamplingPlan::defaults();

  SECTION("box corner sees the first quadrant") {
    const PolyhedralUnion box = box_target();
    const Vec x = pt(Rat(1), Rat(1));
    const DualCloud cloud = sampled_eps_normals(box, x, Rat(0), plan);
    CHECK(cloud.members.size() == 17 * 17);
    for (const Vec& m : cloud.members) {
      CHECK(m[0].sign() >= 0);
      CHECK(m[1].sign() >= 0);
    }
    const DualCloud loose = sampled_eps_normals(box, x, Rat(1, 4), plan);
    CHECK(loose.members.size() > cloud.members.size());
    for (const Vec& m : cloud.members) CHECK(loose.contains_member(m));
  }

  SECTION("edge point sees a half-line of normals") {
    const PolyhedralUnion box = box_target();
    const DualCloud cloud = sampled_eps_normals(box, pt(Rat(1), Rat(0)), Rat(0), plan);
    for (const Vec& m : cloud.members) {
      CHECK(m[1] == Rat(0));
      CHECK(m[0].sign() >= 0);
    }
    CHECK(cloud.members.size() == 17);
  }

  SECTION("isolated target point accepts every dual") {
    const PolyhedralUnion point(2, {singleton(pt(Rat(0), Rat(0)))});
    const DualCloud cloud = sampled_eps_normals(point, pt(Rat(0), Rat(0)), Rat(0), plan);
    CHECK(cloud.members.size() == 33 * 33);
  }

  SECTION("base point must belong to the target") {
    CHECK_THROWS_AS(sampled_eps_normals(box_target(), pt(Rat(2), Rat(0)), Rat(0), plan),
                    WrongRegimeError);
  }
}

TEST_CASE("calmness probe separates Lipschitz from jump points") {
  const Dynamics f = segment_dynamics();
  const PolyhedralUnion comp = box_complement_target();
  const PolyhedralUnion box = box_target();
  const TimeField comp_field = time_field(f, comp);
  const TimeField box_field = time_field(f, box);
  const SamplingPlan plan = SamplingPlan::defaults();

  SECTION("smooth reach point is Lipschitz with rate near one") {
    const CalmnessProbe p = calmness_probe(comp_field, pt(Rat(1), Rat(0)), plan);
    CHECK(p.lipschitz);
    CHECK_FALSE(p.divergent);
    CHECK(p.estimate.certified);
    CHECK(p.estimate.kappa_hat >= Rat(1));
    CHECK(p.estimate.kappa_hat <= Rat(4));
    for (const Rat& q : p.max_quotients) {
      CHECK(q >= Rat(0));
      CHECK(Rat(2) * q <= p.estimate.kappa_hat);
    }
  }

  SECTION("jump point diverges") {
    const CalmnessProbe p = calmness_probe(comp_field, pt(Rat(0), Rat(1)), plan);
    CHECK_FALSE(p.lipschitz);
    CHECK(p.divergent);
    CHECK_FALSE(p.estimate.certified);
  }

  SECTION("unreachable directions diverge") {
    const CalmnessProbe p = calmness_probe(box_field, pt(Rat(0), Rat(1)), plan);
    CHECK_FALSE(p.lipschitz);
    CHECK(p.max_quotients.back() == Rat(-1));
  }

  SECTION("box reach points are Lipschitz") {
    CHECK(calmness_probe(box_field, pt(Rat(2), Rat(1, 2)), plan).lipschitz);
    CHECK(calmness_probe(box_field, pt(Rat(1), Rat(0)), plan).lipschitz);
  }

  SECTION("curved field is Lipschitz and certified") {
    const CalmnessProbe p = calmness_probe(unit_ball_complement_field(),
                                           pt(Rat(0), Rat(0)), plan);
    CHECK(p.lipschitz);
    CHECK(p.estimate.certified);
    CHECK(p.estimate.kappa_hat >= Rat(1));
  }

  SECTION("rate bound shrinks with the window") {
    const CalmnessProbe wide = calmness_probe(comp_field, pt(Rat(1), Rat(0)), plan, Rat(1, 4));
    const CalmnessProbe mid = calmness_probe(comp_field, pt(Rat(1), Rat(0)), plan, Rat(1, 16));
    const CalmnessProbe tight =
        calmness_probe(comp_field, pt(Rat(1), Rat(0)), plan, Rat(1, 64));
    CHECK(mid.estimate.kappa_hat <= wide.estimate.kappa_hat);
    CHECK(tight.estimate.kappa_hat <= mid.estimate.kappa_hat);
    CHECK(wide.estimate.window == Rat(1, 4));
  }

  SECTION("singular formula agrees with the probe verdict") {
    // Lipschitz exactly when the singular set collapses to the origin
    struct Case {
      const PolyhedralUnion* target;
      Vec x;
    };
    const std::vector<Case> cases = {
        {&comp, pt(Rat(1), Rat(0))}, {&comp, pt(Rat(0), Rat(1))},
        {&comp, pt(Rat(1), Rat(1))}, {&box, pt(Rat(1), Rat(0))},
        {&box, pt(Rat(0), Rat(1))},
    };
    const PolyhedralUnion zero(2, {singleton(pt(Rat(0), Rat(0)))});
    for (const Case& c : cases) {
      const TimeField fld = time_field(f, *c.target);
      const bool probe_lip = calmness_probe(fld, c.x, plan).lipschitz;
      const SubdiffResult sing = singular_subdiff_inset(f, *c.target, c.x);
      const bool formula_lip = union_equals(sing.set, zero);
      INFO("at " << vec_str(c.x));
      CHECK(probe_lip == formula_lip);
    }
  }
}

TEST_CASE("definitional convex subgradient check") {
  const Dynamics f = segment_dynamics();
  const PolyhedralUnion box = box_target();
  const Vec x = pt(Rat(2), Rat(1, 2));

  CHECK(definitional_convex_subgradient_check(f, box, x, pt(Rat(1), Rat(0))));
  CHECK_FALSE(definitional_convex_subgradient_check(f, box, x, pt(Rat(0), Rat(1))));
  CHECK_FALSE(definitional_convex_subgradient_check(f, box, x, pt(Rat(2), Rat(0))));
  CHECK_FALSE(definitional_convex_subgradient_check(f, box, x, pt(Rat(1, 2), Rat(0))));

  // boundary point: every formula subgradient satisfies the global inequality
  const Vec edge = pt(Rat(1), Rat(0));
  for (long k = 0; k <= 4; ++k) {
    CHECK(definitional_convex_subgradient_check(f, box, edge, pt(Rat(k, 4), Rat(0))));
  }
  CHECK_FALSE(definitional_convex_subgradient_check(f, box, edge, pt(Rat(5, 4), Rat(0))));

  CHECK_THROWS_AS(
      definitional_convex_subgradient_check(f, box, pt(Rat(0), Rat(2)), pt(Rat(0), Rat(0))),
      WrongRegimeError);
}

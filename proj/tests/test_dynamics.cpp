#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mintime/dynamics.hpp"

using namespace mintime;

namespace {

Dynamics square_dyn() {
  return Dynamics::polytope(VPolytope(
      2, {{Rat(1), Rat(1)}, {Rat(1), Rat(-1)}, {Rat(-1), Rat(1)}, {Rat(-1), Rat(-1)}}));
}

Dynamics segment_dyn() {
  return Dynamics::polytope(VPolytope(2, {{Rat(-1), Rat(0)}, {Rat(1), Rat(0)}}));
}

}  // namespace

TEST_CASE("polytope dynamics: support, norm, origin queries") {
  const Dynamics f = square_dyn();
  CHECK(f.support({Rat(1), Rat(0)}) == Rat(1));
  CHECK(f.support({Rat(1), Rat(1)}) == Rat(2));
  CHECK(f.support({Rat(-3), Rat(2)}) == Rat(5));
  CHECK(f.norm_sq() == Rat(2));
  CHECK_FALSE(f.norm().exact);
  CHECK(f.contains_origin());
  CHECK(f.origin_interior());
  CHECK(f.g_hull().vertices.size() == 4);  // 0 is interior, hull unchanged

  const Dynamics seg = segment_dyn();
  CHECK(seg.contains_origin());
  CHECK_FALSE(seg.origin_interior());
  CHECK(seg.norm_sq() == Rat(1));
  CHECK(seg.g_hull().vertices.size() == 2);
}

TEST_CASE("gauge of a segment is finite only along its span") {
  const Dynamics seg = segment_dyn();
  CHECK(seg.gauge({Rat(1, 2), Rat(0)}) == ExtRat(Rat(1, 2)));
  CHECK(seg.gauge({Rat(-3), Rat(0)}) == ExtRat(Rat(3)));
  CHECK(seg.gauge({Rat(0), Rat(0)}) == ExtRat(Rat(0)));
  CHECK(seg.gauge({Rat(1), Rat(1)}).is_finite() == false);
  CHECK(seg.gauge({Rat(0), Rat(1, 1000)}).is_finite() == false);
}

TEST_CASE("gauge of a shifted square misses the origin") {
  const Dynamics f = Dynamics::polytope(VPolytope(
      2, {{Rat(1), Rat(0)}, {Rat(2), Rat(0)}, {Rat(1), Rat(1)}, {Rat(2), Rat(1)}}));
  CHECK_FALSE(f.contains_origin());
  CHECK(f.gauge({Rat(1), Rat(0)}) == ExtRat(Rat(1, 2)));
  CHECK(f.gauge({Rat(0), Rat(1)}).is_finite() == false);
  CHECK(f.gauge({Rat(-1), Rat(0)}).is_finite() == false);
  // hull with the origin gains it as a vertex
  CHECK(f.g_hull().contains({Rat(0), Rat(0)}));
  CHECK(f.g_hull().contains({Rat(1), Rat(1, 2)}));
  CHECK(f.g_hull().vertices.size() == 4);  // (1,0) and (1,1) absorbed? no: 0,(2,0),(2,1),(1,1)
}

TEST_CASE("gauge witnesses reproduce the point") {
  const Dynamics f = square_dyn();
  const auto g = f.gauge_with_coeffs({Rat(3), Rat(1)});
  REQUIRE(g.has_value());
  CHECK(g->first == Rat(3));
  const auto& verts = f.vertices().vertices;
  Vec rebuilt = zero_vec(2);
  Rat total(0);
  for (size_t i = 0; i < verts.size(); ++i) {
    rebuilt = add(rebuilt, scale(g->second[i], verts[i]));
    total += g->second[i];
  }
  CHECK(rebuilt == Vec{Rat(3), Rat(1)});
  CHECK(total == Rat(3));
}

TEST_CASE("ball dynamics: squared tests decide everything exactly") {
  const Dynamics b = Dynamics::ball(2, Rat(2));
  CHECK(b.contains({Rat(1), Rat(1)}));
  CHECK(b.contains({Rat(2), Rat(0)}));
  CHECK_FALSE(b.contains({Rat(2), Rat(1, 100)}));
  CHECK(b.contains_origin());
  CHECK(b.origin_interior());
  CHECK(b.norm_sq() == Rat(4));
  CHECK(b.norm().exact);
  CHECK(b.norm().exact_value == Rat(2));
  CHECK(b.gauge_sq({Rat(1), Rat(1)}) == Rat(1, 2));
  // sigma_B(3,4) = 2 * 5 = 10
  CHECK(b.support_le({Rat(3), Rat(4)}, Rat(10)));
  CHECK(b.support_ge({Rat(3), Rat(4)}, Rat(10)));
  CHECK_FALSE(b.support_le({Rat(3), Rat(4)}, Rat(999, 100)));
  CHECK_FALSE(b.support_ge({Rat(3), Rat(4)}, Rat(1001, 100)));
  CHECK(b.support_ge({Rat(3), Rat(4)}, Rat(-5)));
  CHECK_FALSE(b.support_le({Rat(1), Rat(0)}, Rat(-1)));
  CHECK_THROWS_AS(b.support({Rat(1), Rat(0)}), WrongRegimeError);
  CHECK_THROWS_AS(b.vertices(), WrongRegimeError);
  CHECK_THROWS_AS(Dynamics::ball(2, Rat(0)), InputError);
}

TEST_CASE("support is lipschitz with the dynamics norm as modulus") {
  std::mt19937 rng(20240811);
  std::uniform_int_distribution<int> coord(-6, 6);
  std::uniform_int_distribution<int> den(1, 4);
  std::uniform_int_distribution<int> count(1, 5);
  const auto rv = [&]() { return Vec{Rat(coord(rng), den(rng)), Rat(coord(rng), den(rng))}; };
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Vec> pts;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) pts.push_back(rv());
    const Dynamics f = Dynamics::polytope(VPolytope(2, pts));
    const Vec x1 = rv(), x2 = rv();
    const Rat d = f.support(x1) - f.support(x2);
    CHECK(d * d <= f.norm_sq() * norm_sq(sub(x1, x2)));
    // positive homogeneity and subadditivity of the support function
    CHECK(f.support(scale(Rat(3, 2), x1)) == Rat(3, 2) * f.support(x1));
    CHECK(f.support(add(x1, x2)) <= f.support(x1) + f.support(x2));
  }
}

TEST_CASE("gauge is positively homogeneous and subadditive") {
  std::mt19937 rng(77);
  std::uniform_int_distribution<int> coord(-5, 5);
  std::uniform_int_distribution<int> count(1, 4);
  const auto rv = [&]() { return Vec{Rat(coord(rng)), Rat(coord(rng))}; };
  int finite_pairs = 0;
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Vec> pts;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) pts.push_back(rv());
    const Dynamics f = Dynamics::polytope(VPolytope(2, pts));
    const Vec u = rv(), w = rv();
    const ExtRat gu = f.gauge(u);
    const ExtRat gw = f.gauge(w);
    if (gu.is_finite()) {
      const ExtRat gs = f.gauge(scale(Rat(5, 3), u));
      REQUIRE(gs.is_finite());
      CHECK(gs.value() == Rat(5, 3) * gu.value());
    }
    if (gu.is_finite() && gw.is_finite()) {
      ++finite_pairs;
      const ExtRat gsum = f.gauge(add(u, w));
      REQUIRE(gsum.is_finite());
      CHECK(gsum.value() <= gu.value() + gw.value());
    }
  }
  CHECK(finite_pairs > 20);
}

#include "mintime/scene.hpp"

#include <cstdlib>

#include <catch2/catch_amalgamated.hpp>

#include "common_scenes.hpp"
#include "mintime/set_algebra.hpp"
#include "mintime/svg.hpp"

using namespace mintime;
using namespace mintime::testing;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("exact scalars round-trip through json") {
  const Rat r(-7, 3);
  CHECK(rat_from_json(rat_json(r), "t") == r);
  CHECK(rat_from_json(Json(5), "t") == Rat(5));  // bare integers are tolerated
  CHECK(rat_from_json(Json("10/4"), "t") == Rat(5, 2));
  CHECK_THROWS_AS(rat_from_json(Json("1.5"), "t"), ParseError);
  CHECK_THROWS_AS(rat_from_json(Json(Json::array()), "t"), ParseError);
  REQUIRE_THROWS_WITH(rat_from_json(Json("x"), "options.eps"), ContainsSubstring("options.eps"));

  CHECK(ext_from_json(Json("inf"), "t") == ExtRat::infinity());
  CHECK(ext_from_json(Json("3/2"), "t") == ExtRat(Rat(3, 2)));
  CHECK(ext_json(ExtRat::infinity()) == Json("inf"));

  const Vec v = pt(Rat(1, 2), Rat(-3));
  CHECK(vec_from_json(vec_json(v), "p") == v);
  CHECK_THROWS_AS(vec_from_json(vec_json(v), "p", 3), ParseError);
}

TEST_CASE("bundled scenes serialize and parse back unchanged") {
  for (const auto& id : bundled_scene_names()) {
    const Scene s = bundled_scene(id);
    const Json j = scene_to_json(s);
    const Scene back = scene_from_json(j);
    CHECK(scene_to_json(back).dump(2) == j.dump(2));
    CHECK(back.name == s.name);
    CHECK(back.dim == s.dim);
    CHECK(back.points == s.points);
    if (s.target_kind == TargetKind::polyhedral) {
      CHECK(union_equals(back.target, s.target));
    }
  }
  CHECK_THROWS_AS(bundled_scene("example-0.0"), InputError);
}

TEST_CASE("fixture files match the in-code catalogue") {
  for (const auto& id : bundled_scene_names()) {
    const Scene from_file = load_scene(id);  // resolved against the fixture directory
    CHECK(scene_to_json(from_file).dump(2) == scene_to_json(bundled_scene(id)).dump(2));
  }
  CHECK_THROWS_AS(load_scene("no-such-scene"), InputError);
}

TEST_CASE("scene parsing reports located errors") {
  Json good = scene_to_json(bundled_scene("example-7.4"));

  Json bad = good;
  bad["schema"] = "mintime-scene/9";
  CHECK_THROWS_AS(scene_from_json(bad), ParseError);

  bad = good;
  bad.erase("dynamics");
  REQUIRE_THROWS_WITH(scene_from_json(bad), ContainsSubstring("dynamics"));

  bad = good;
  bad["dynamics"]["kind"] = "cone";
  REQUIRE_THROWS_WITH(scene_from_json(bad), ContainsSubstring("dynamics.kind"));

  bad = good;
  bad["target"]["pieces"] = Json::array();  // empty target is rejected at load
  CHECK_THROWS_AS(scene_from_json(bad), ParseError);

  bad = good;
  bad["points"][0][1] = "1/0";
  REQUIRE_THROWS_WITH(scene_from_json(bad), ContainsSubstring("points[0]"));

  bad = good;
  bad["options"]["eta"] = "0";
  CHECK_THROWS_AS(scene_from_json(bad), ParseError);

  // curved target demands ball dynamics
  bad = good;
  bad["target"] = Json{{"kind", "ball-complement"}, {"radius", "1"}};
  CHECK_THROWS_AS(scene_from_json(bad), ParseError);

  // malformed file text surfaces the parser diagnostics and the path
  const char* path = "/tmp/mintime-test-broken-scene.json";
  {
    std::ofstream out(path);
    out << "{ \"schema\": ";
  }
  REQUIRE_THROWS_WITH(load_scene_file(path), ContainsSubstring(path));
  CHECK_THROWS_AS(load_scene_file("/tmp/mintime-test-does-not-exist.json"), InputError);
}

TEST_CASE("scene files written to disk load back identically") {
  const Scene s = bundled_scene("example-5.3");
  const char* path = "/tmp/mintime-test-roundtrip-scene.json";
  save_scene_file(s, path);
  const Scene back = load_scene_file(path);
  CHECK(scene_to_json(back).dump(2) == scene_to_json(s).dump(2));
  CHECK(union_equals(back.target, box_complement_target()));
  CHECK(back.dynamics().vertices().vertices == segment_dynamics().vertices().vertices);
}

TEST_CASE("sampling plan precedence is env, then scene, then defaults") {
  Scene s = bundled_scene("example-7.4");
  unsetenv("MINTIME_SAMPLING");
  CHECK(s.plan().radii.size() == SamplingPlan::defaults().radii.size());

  s.options.sampling = "4:8:16";
  CHECK(s.plan().radii.size() == 5);  // exponents 4..8
  CHECK(s.plan().directions == 16);

  setenv("MINTIME_SAMPLING", "3:10:32", 1);
  CHECK(s.plan().radii.size() == 8);  // env wins
  CHECK(s.plan().directions == 32);
  unsetenv("MINTIME_SAMPLING");

  s.options.sampling = "nonsense";
  CHECK_THROWS_AS(s.validate(), InputError);
}

TEST_CASE("curved benchmark scene evaluates its closed form") {
  const Scene s = bundled_scene("section-6-counterexample");
  CHECK(s.target_contains(pt(Rat(1), Rat(0))));
  CHECK(s.target_contains(pt(Rat(3, 5), Rat(4, 5))));
  CHECK_FALSE(s.target_contains(pt(Rat(1, 2), Rat(0))));

  const TimeField field = s.field();
  const TimeValue at_origin = field.eval(pt(Rat(0), Rat(0)));
  REQUIRE(at_origin.exact);
  CHECK(at_origin.value == Rat(1));
  const TimeValue on_axis = field.eval(pt(Rat(1, 2), Rat(0)));
  REQUIRE(on_axis.exact);
  CHECK(on_axis.value == Rat(1, 2));
  const TimeValue off_axis = field.eval(pt(Rat(1, 3), Rat(1, 3)));
  REQUIRE(off_axis.finite);
  REQUIRE_FALSE(off_axis.exact);
  // 1 - sqrt(2)/3 = 0.5285954...
  CHECK(off_axis.enclosure.lo < Rat(5286, 10000));
  CHECK(off_axis.enclosure.hi > Rat(5285, 10000));
  CHECK(off_axis.enclosure.hi - off_axis.enclosure.lo < Rat(1, 1000000000));

  // outside the hole the time vanishes exactly
  const TimeValue outside = field.eval(pt(Rat(2), Rat(2)));
  REQUIRE(outside.exact);
  CHECK(outside.value == Rat(0));
}

TEST_CASE("reports round-trip losslessly") {
  Report r;
  r.command = "eval";
  r.scene = "example-7.4";
  Json entry;
  entry["point"] = vec_json(pt(Rat(2), Rat(1, 2)));
  entry["time"] = time_json(TimeValue::of(Rat(1)));
  entry["unreachable"] = time_json(TimeValue::infinite());
  entry["enclosed"] = time_json(TimeValue::interval({Rat(1, 3), Rat(2, 3)}));
  r.results.push_back(entry);
  r.summary["points"] = 1;

  const Json j = report_to_json(r);
  const std::string text = j.dump(2);
  const Report back = report_from_json(Json::parse(text));
  CHECK(report_to_json(back).dump(2) == text);
  CHECK(back.results[0]["time"] == Json("1"));
  CHECK(back.results[0]["unreachable"] == Json("inf"));

  Json bad = j;
  bad["schema"] = "mintime-report/2";
  CHECK_THROWS_AS(report_from_json(bad), ParseError);
}

TEST_CASE("set json carries h-rep and generator form") {
  const Json j = set_json(box_target());
  REQUIRE(j["pieces"].size() == 1);
  CHECK(j["pieces"][0]["faces"].size() == 4);
  REQUIRE(j.contains("generators"));
  CHECK(j["generators"][0]["points"].size() == 4);
  CHECK(j["generators"][0]["rays"].size() == 0);
}

TEST_CASE("svg output is deterministic and positions exact geometry") {
  const Scene s = bundled_scene("example-7.4");
  const std::string svg = render_scene_svg(s, PlotLayers::all());
  CHECK(svg == render_scene_svg(s, PlotLayers::all()));  // byte-identical re-render

  CHECK_THAT(svg, ContainsSubstring("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\""));
  CHECK_THAT(svg, ContainsSubstring("<title>example-7.4</title>"));

  // world frame maps x to 40 + 70(x+4): the target square lands on [250,390]^2
  CHECK_THAT(svg, ContainsSubstring(
                      "<polygon points=\"390.00,250.00 250.00,250.00 250.00,390.00 390.00,390.00\""));

  // level curves of the minimal time widen in x1 only: the height stays [250,390]
  CHECK_THAT(svg, ContainsSubstring(
                      "<polygon points=\"425.00,250.00 215.00,250.00 215.00,390.00 425.00,390.00\""));
  CHECK_THAT(svg, ContainsSubstring(
                      "<polygon points=\"530.00,250.00 110.00,250.00 110.00,390.00 530.00,390.00\""));

  // the dual inset at (1,0) draws the basic set as the segment from 0 to (1,0)
  CHECK_THAT(svg, ContainsSubstring("<line x1=\"521.00\" y1=\"91.00\" x2=\"558.50\" y2=\"91.00\""));

  // projection segment from (2,1/2) to the witness (1,1/2)
  CHECK_THAT(svg, ContainsSubstring("<line x1=\"460.00\" y1=\"285.00\" x2=\"390.00\" y2=\"285.00\""));
}

TEST_CASE("svg renders every bundled planar scene and honors empty overlays") {
  const std::string bare = render_scene_svg(bundled_scene("example-7.4"), PlotLayers{});
  CHECK_THAT(bare, ContainsSubstring("</svg>"));
  CHECK_THAT(bare, !ContainsSubstring("<polygon"));

  // unbounded target pieces are clipped to the window
  const std::string complement =
      render_scene_svg(bundled_scene("example-5.3"), PlotLayers::parse("target,dynamics,points"));
  CHECK(std::count(complement.begin(), complement.end(), '\n') > 10);
  CHECK_THAT(complement, ContainsSubstring("<polygon"));

  // curved scene: disc hole plus a single positive-radius level circle
  const Scene curved = bundled_scene("section-6-counterexample");
  const std::string disc = render_scene_svg(curved, PlotLayers::parse("target,levels,dynamics"));
  CHECK_THAT(disc, ContainsSubstring("r=\"35.00\""));  // level 1/2 circle
  CHECK_THROWS_AS(render_scene_svg(curved, PlotLayers::parse("projection")), WrongRegimeError);
  CHECK_THROWS_AS(render_scene_svg(curved, PlotLayers::parse("subdiff")), WrongRegimeError);

  CHECK_THROWS_AS(render_scene_svg(bundled_scene("section-1-halfline"), PlotLayers{}),
                  UnsupportedDimensionError);
  CHECK_THROWS_AS(PlotLayers::parse("target,towers"), InputError);
}

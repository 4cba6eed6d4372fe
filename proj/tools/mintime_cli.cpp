// command line front end: loads a scene, runs one analysis command, emits a
// machine-readable json report (or an svg for `plot`).  exit codes: 0 success,
// 1 verification failures, 2 usage / malformed input / wrong regime.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mintime/oracle.hpp"
#include "mintime/scene.hpp"
#include "mintime/subdiff.hpp"
#include "mintime/subdiff_eps.hpp"
#include "mintime/support_sets.hpp"
#include "mintime/svg.hpp"
#include "mintime/verify.hpp"

namespace {

using namespace mintime;

struct Options {
  std::string scene_ref;
  std::string point_csv;
  std::string eps_text;
  std::string eta_text;
  std::string which;
  bool which_given = false;
  std::string out_path;
  std::string suite = "all";
};

Rat parse_rat_flag(const std::string& text, const std::string& flag) {
  try {
    return Rat::parse(text);
  } catch (const ParseError& e) {
    throw InputError(flag + ": " + e.what());
  }
}

Vec parse_point(const std::string& csv, size_t dim) {
  Vec v;
  std::istringstream in(csv);
  std::string part;
  while (std::getline(in, part, ',')) v.push_back(parse_rat_flag(part, "--point"));
  if (v.size() != dim) {
    throw InputError("--point: wants " + std::to_string(dim) + " coordinates, got " +
                     std::to_string(v.size()));
  }
  return v;
}

// scene plus the per-invocation overrides folded in
Scene load(const Options& opt) {
  if (opt.scene_ref.empty()) throw InputError("--scene is required");
  Scene s = load_scene(opt.scene_ref);
  if (!opt.point_csv.empty()) s.points = {parse_point(opt.point_csv, s.dim)};
  if (!opt.eps_text.empty()) s.options.eps = parse_rat_flag(opt.eps_text, "--eps");
  if (!opt.eta_text.empty()) s.options.eta = parse_rat_flag(opt.eta_text, "--eta");
  s.options.validate();
  return s;
}

const std::vector<Vec>& query_points(const Scene& s) {
  if (s.points.empty()) {
    throw InputError("no query points: pass --point or add points to the scene");
  }
  return s.points;
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw InputError("cannot open output file '" + out_path + "'");
  f << text;
}

void emit_report(const Report& rep, const std::string& out_path) {
  emit_text(report_to_json(rep).dump(2) + "\n", out_path);
}

Json witness_json(const TimeWitness& wit) {
  Json j;
  j["t"] = rat_json(wit.t);
  j["w"] = vec_json(wit.w);
  j["q"] = vec_json(wit.q);
  j["lambda"] = vec_json(wit.lambda);
  j["piece"] = wit.piece;
  return j;
}

Json hypotheses_json(const SubdiffHypotheses& h) {
  Json j;
  j["convex_target"] = h.convex_target;
  j["origin_in_dynamics"] = h.origin_in_dynamics;
  j["origin_interior"] = h.origin_interior;
  return j;
}

Json cloud_json(const DualCloud& cloud) {
  Json j;
  Json members = Json::array();
  for (const auto& m : cloud.members) members.push_back(vec_json(m));
  j["members"] = members;
  j["uncertain"] = cloud.uncertain.size();
  j["scanned"] = cloud.scanned;
  return j;
}

// catalogue tag naming the formula behind a basic/singular/outset result
std::string formula_tag(const std::string& which, bool inside, const SubdiffHypotheses& hyp) {
  if (!inside) return hyp.convex_target ? "Thm 7.3" : "Thm 6.3 (finite-dim)";
  if (which == "singular") return hyp.convex_target ? "Thm 7.2(i)" : "Thm 5.3 (finite-dim)";
  return hyp.convex_target ? "Thm 7.1" : "Thm 5.2 (finite-dim)";
}

// every generator point of the set, deduplicated; nullopt if a piece is
// unbounded (rays or lines present), in which case no finite witness list
// can cover the set
std::optional<std::vector<Vec>> bounded_generators(const PolyhedralUnion& u) {
  std::vector<Vec> out;
  std::set<std::string> seen;
  for (const auto& p : u.pieces) {
    const Generators g = polyhedron_generators(p);
    if (!g.rays.empty() || !g.lines.empty()) return std::nullopt;
    for (const auto& v : g.points) {
      if (seen.insert(vec_str(v)).second) out.push_back(v);
    }
  }
  return out;
}

// upper estimates cannot be promoted to exact, but sampling can certify the
// extreme points: each generator that passes the zero-slack subgradient test
// at x is a true member, so a fully witnessed generator list pins the set
// from below as well
void attach_tightness(Json& entry, const Scene& scene, const Vec& x, const PolyhedralUnion& set) {
  const auto gens = bounded_generators(set);
  if (!gens || gens->empty()) {
    entry["tightness"] = "unconfirmed";
    return;
  }
  const DualCloud cloud = sampled_frechet_subdiff(scene.field(), x, Rat(0), scene.plan(), *gens);
  Json witnessed = Json::array();
  bool all = true;
  for (const auto& g : *gens) {
    if (cloud.contains_member(g)) {
      witnessed.push_back(vec_json(g));
    } else {
      all = false;
    }
  }
  entry["tightness"] = all ? "witnessed" : "unconfirmed";
  entry["tightness_witnesses"] = witnessed;
}

// ---------------------------------------------------------------------------
// eval: minimal time, witness data, gauge and support samples

int cmd_eval(const Options& opt) {
  const Scene scene = load(opt);
  Report rep;
  rep.command = "eval";
  rep.scene = scene.name;

  const Dynamics f = scene.dynamics();
  size_t finite = 0;
  for (const Vec& x : query_points(scene)) {
    Json e;
    e["point"] = vec_json(x);
    if (scene.target_kind == TargetKind::polyhedral) {
      const MinTimeResult mt = minimal_time(f, scene.target, x);
      e["time"] = time_json(mt.time);
      if (mt.time.finite) ++finite;
      if (mt.piece) e["piece"] = *mt.piece;
      if (mt.witness) {
        e["witness"] = witness_json(*mt.witness);
        e["gauge_at_witness"] = ext_json(f.gauge(sub(mt.witness->w, x)));
      }
      if (mt.nearest) {
        Json n;
        n["point"] = vec_json(mt.nearest->point);
        n["dist_sq"] = rat_json(mt.nearest->dist_sq);
        e["nearest"] = n;
      }
    } else {
      const TimeValue t = scene.field().eval(x);
      e["time"] = time_json(t);
      if (t.finite) ++finite;
    }
    if (f.kind() == DynamicsKind::polytope) {
      Json samples = Json::array();
      for (size_t i = 0; i < scene.dim; ++i) {
        for (int sgn : {+1, -1}) {
          Vec d(scene.dim, Rat(0));
          d[i] = Rat(sgn);
          Json s;
          s["dir"] = vec_json(d);
          s["value"] = rat_json(f.support(d));
          samples.push_back(s);
        }
      }
      e["support_samples"] = samples;
    } else {
      e["dynamics_radius"] = rat_json(f.radius());
    }
    rep.results.push_back(e);
  }
  rep.summary["points"] = rep.results.size();
  rep.summary["finite"] = finite;
  emit_report(rep, opt.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// project: generalized projection set and one witness

int cmd_project(const Options& opt) {
  const Scene scene = load(opt);
  if (scene.target_kind != TargetKind::polyhedral) {
    throw WrongRegimeError("project: polyhedral targets only");
  }
  Report rep;
  rep.command = "project";
  rep.scene = scene.name;

  const Dynamics f = scene.dynamics();
  for (const Vec& x : query_points(scene)) {
    const ProjectionSet ps = projection_set(f, scene.target, x);
    Json e;
    e["point"] = vec_json(x);
    e["time"] = rat_json(ps.witness.t);
    e["projection"] = set_json(ps.pieces);
    e["witness_point"] = vec_json(ps.witness_point);
    e["witness"] = witness_json(ps.witness);
    rep.results.push_back(e);
  }
  rep.summary["points"] = rep.results.size();
  emit_report(rep, opt.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// subdiff: basic / singular / frechet-eps / one-sided sets at each point

void subdiff_entry_exact(Json& e, const Scene& scene, const Vec& x, const std::string& which) {
  const Dynamics f = scene.dynamics();
  const bool inside = scene.target_contains(x);
  e["regime"] = inside ? "in-set" : "out-of-set";

  SubdiffResult res;
  if (inside) {
    res = (which == "singular") ? singular_subdiff_inset(f, scene.target, x)
                                : basic_subdiff_inset(f, scene.target, x);
  } else {
    const OutsetProjection routes = subdiff_outset_via_projection(f, scene.target, x);
    res = (which == "singular") ? routes.singular : routes.basic;
  }
  e["set"] = set_json(res.set);
  e["exactness"] = exactness_str(res.exactness);
  e["theorem"] = formula_tag(which, inside, res.hypotheses);
  e["source"] = res.source;
  e["hypotheses"] = hypotheses_json(res.hypotheses);
  if (which == "basic" && !inside && res.exactness == Exactness::upper_estimate) {
    attach_tightness(e, scene, x, res.set);
  }
}

void subdiff_entry_frechet_eps(Json& e, const Scene& scene, const Vec& x) {
  const Rat eps = scene.options.eps;
  e["eps"] = rat_json(eps);
  const bool inside = scene.target_contains(x);
  e["regime"] = inside ? "in-set" : "out-of-set";

  const Dynamics f = scene.dynamics();
  if (inside && scene.target_kind == TargetKind::polyhedral &&
      f.kind() == DynamicsKind::polytope) {
    // polyhedral band: normal cone sliced with the eps-inflated dual body;
    // an upper estimate, two-sided only in the slice width
    const auto cone = frechet_normal_cone(scene.target, x);
    if (!cone) throw Error("normal cone unavailable at an in-set point");
    if (!cone->hrep_known) {
      throw UnsupportedDimensionError("frechet-eps needs cone h-reps (dim <= 3)");
    }
    const DualBand band = c_star(f, eps);
    auto slice = [&](const HPolyhedron& cap) {
      PolyhedralUnion u(scene.dim, {});
      HPolyhedron b = detail::intersect_hpoly(cone->as_hpoly(), cap);
      if (!is_empty(b)) u.pieces.push_back(minimal_faces(b));
      return u;
    };
    e["set_inner"] = set_json(slice(band.inner));
    e["set_outer"] = set_json(slice(band.outer));
    e["band_tight"] = band.tight;
    e["exactness"] = "upper-estimate";
    e["theorem"] = "Prop 4.1";
    return;
  }
  // sampled route: grid duals passing the eps-subgradient test around x
  e["cloud"] = cloud_json(sampled_frechet_subdiff(scene.field(), x, eps, scene.plan()));
  e["exactness"] = "sampled";
  e["theorem"] = inside ? "Prop 4.1" : "Prop 4.4";
}

void subdiff_entry_one_sided(Json& e, const Scene& scene, const Vec& x) {
  if (scene.target_kind != TargetKind::polyhedral) {
    throw WrongRegimeError("one-sided subdifferentials: polyhedral targets only");
  }
  const Dynamics f = scene.dynamics();
  const OutsetEnlargement en = subdiff_outset_via_enlargement(f, scene.target, x);
  e["regime"] = "out-of-set";
  e["r"] = rat_json(en.r);
  e["normal_cone"] = set_json(en.normal_cone);

  auto put = [&](const char* key, const SubdiffResult& res, const std::string& tag) {
    Json s;
    s["set"] = set_json(res.set);
    s["exactness"] = exactness_str(res.exactness);
    s["theorem"] = tag;
    s["source"] = res.source;
    e[key] = s;
  };
  put("basic", en.one_sided_basic, "Thm 6.5");
  put("singular", en.one_sided_singular, "Thm 6.5");
  if (en.convex_exact_basic.exactness == Exactness::exact) {
    put("convex_exact_basic", en.convex_exact_basic, "Thm 7.3");
    put("convex_exact_singular", en.convex_exact_singular, "Thm 7.3");
  }
}

int cmd_subdiff(const Options& opt) {
  const Scene scene = load(opt);
  const std::string which = opt.which.empty() ? "basic" : opt.which;
  if (which != "basic" && which != "singular" && which != "frechet-eps" &&
      which != "one-sided") {
    throw InputError("--which must be basic, singular, frechet-eps, or one-sided");
  }
  if ((which == "basic" || which == "singular") &&
      scene.target_kind != TargetKind::polyhedral) {
    throw WrongRegimeError("exact subdifferential sets: polyhedral targets only");
  }

  Report rep;
  rep.command = "subdiff";
  rep.scene = scene.name;
  for (const Vec& x : query_points(scene)) {
    Json e;
    e["point"] = vec_json(x);
    e["which"] = which;
    if (which == "frechet-eps") {
      subdiff_entry_frechet_eps(e, scene, x);
    } else if (which == "one-sided") {
      subdiff_entry_one_sided(e, scene, x);
    } else {
      subdiff_entry_exact(e, scene, x, which);
    }
    rep.results.push_back(e);
  }
  rep.summary["points"] = rep.results.size();
  rep.summary["which"] = which;
  emit_report(rep, opt.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// enlarge: explicit enlargement set, plus its normal cone at out-of-set points

int cmd_enlarge(const Options& opt) {
  const Scene scene = load(opt);
  if (scene.target_kind != TargetKind::polyhedral) {
    throw WrongRegimeError("enlarge: polyhedral targets only");
  }
  Report rep;
  rep.command = "enlarge";
  rep.scene = scene.name;

  const Dynamics f = scene.dynamics();
  for (const Vec& x : query_points(scene)) {
    Json e;
    e["point"] = vec_json(x);
    Rat r;
    if (scene.options.r) {
      r = *scene.options.r;
    } else {
      const MinTimeResult mt = minimal_time(f, scene.target, x);
      if (!mt.time.finite) {
        throw EmptyProjectionError("enlarge: infinite time and no options.r given");
      }
      r = mt.time.value;
    }
    e["r"] = rat_json(r);
    e["enlargement"] = set_json(enlargement(f, scene.target, r));
    e["contains_point"] = true;  // overwritten below for explicit radii
    if (scene.options.r) {
      const MinTimeResult mt = minimal_time(f, scene.target, x);
      e["contains_point"] = mt.time.finite && mt.time.value <= r;
    }
    if (!scene.target.contains(x) && r.sign() > 0) {
      const MinTimeResult mt = minimal_time(f, scene.target, x);
      if (mt.time.finite && mt.time.value == r) {
        e["normal_cone"] = set_json(subdiff_outset_via_enlargement(f, scene.target, x).normal_cone);
      }
    }
    rep.results.push_back(e);
  }
  rep.summary["points"] = rep.results.size();
  emit_report(rep, opt.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// verify: suite runner over one scene or the whole bundled fixture set

int cmd_verify(const Options& opt) {
  std::vector<Scene> scenes;
  std::string label;
  if (opt.scene_ref.empty()) {
    scenes = all_bundled_scenes();
    label = "all-fixtures";
  } else {
    Scene s = load_scene(opt.scene_ref);
    if (!opt.point_csv.empty()) s.points = {parse_point(opt.point_csv, s.dim)};
    label = s.name;
    scenes.push_back(std::move(s));
  }
  const VerifyRun run = run_verify_suites(scenes, SuiteSelector(opt.suite));
  emit_report(verify_report(run, label), opt.out_path);
  std::cerr << "verify: " << run.checks.size() << " checks, " << run.failures()
            << " failed, " << run.notes << " notes\n";
  return run.ok() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// plot: deterministic svg for planar scenes

int cmd_plot(const Options& opt) {
  const Scene scene = load(opt);
  if (scene.dim != 2) throw UnsupportedDimensionError("plot: two-dimensional scenes only");
  const PlotLayers layers =
      opt.which_given ? PlotLayers::parse(opt.which) : PlotLayers::all();
  emit_text(render_scene_svg(scene, layers), opt.out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact minimal-time analysis for polyhedral scenes"};
  app.require_subcommand(1);

  Options opt;
  auto* eval = app.add_subcommand("eval", "minimal time, witness, gauge and support samples");
  auto* project = app.add_subcommand("project", "generalized projection set");
  auto* subdiff = app.add_subcommand("subdiff", "subdifferential sets at the query points");
  auto* enlarge = app.add_subcommand("enlarge", "target enlargement and its normal cone");
  auto* verify = app.add_subcommand("verify", "run verification suites, nonzero exit on failure");
  auto* plot = app.add_subcommand("plot", "svg figure for a planar scene");

  for (auto* c : {eval, project, subdiff, enlarge, verify, plot}) {
    c->add_option("--scene", opt.scene_ref,
                  "scene json path or bundled fixture name" +
                      std::string(c == verify ? " (default: all fixtures)" : ""));
    c->add_option("--point", opt.point_csv, "query point, comma-separated rationals");
    c->add_option("--eps", opt.eps_text, "slack for approximate sets, rational");
    c->add_option("--eta", opt.eta_text, "witness localization slack, rational");
    c->add_option("--out", opt.out_path, "write the report here instead of stdout");
  }
  subdiff->add_option("--which", opt.which, "basic | singular | frechet-eps | one-sided");
  auto* plot_which =
      plot->add_option("--which", opt.which, "layer csv: target,dynamics,levels,projection,points,subdiff");
  verify->add_option("--suite", opt.suite, "suite selector csv (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  opt.which_given = plot_which->count() > 0;

  try {
    if (app.got_subcommand(eval)) return cmd_eval(opt);
    if (app.got_subcommand(project)) return cmd_project(opt);
    if (app.got_subcommand(subdiff)) return cmd_subdiff(opt);
    if (app.got_subcommand(enlarge)) return cmd_enlarge(opt);
    if (app.got_subcommand(verify)) return cmd_verify(opt);
    if (app.got_subcommand(plot)) return cmd_plot(opt);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const WrongRegimeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EmptyProjectionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedDimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

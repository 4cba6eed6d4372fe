#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mintime/dynamics.hpp"
#include "mintime/enumeration.hpp"
#include "mintime/errors.hpp"
#include "mintime/mintime.hpp"
#include "mintime/oracle.hpp"
#include "mintime/polyhedron.hpp"
#include "mintime/rat.hpp"
#include "mintime/vec.hpp"

// Scene files: dynamics, target, query points and options in JSON. Rationals
// travel as "p/q" strings and extended values as "inf", so files round-trip
// exactly. A small catalogue of bundled scenes ships with the fixtures.

namespace mintime {

// insertion-ordered json so emitted documents are byte-stable
using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// exact scalars in json

inline Json rat_json(const Rat& r) { return Json(r.str()); }
inline Json ext_json(const ExtRat& v) { return Json(v.str()); }

inline Json vec_json(const Vec& v) {
  Json arr = Json::array();
  for (const auto& c : v) arr.push_back(rat_json(c));
  return arr;
}

inline Rat rat_from_json(const Json& j, const std::string& where) {
  try {
    if (j.is_number_integer()) return Rat::parse(j.dump());  // tolerate bare ints
    if (j.is_string()) return Rat::parse(j.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ": expected a rational encoded as \"p/q\"");
}

inline ExtRat ext_from_json(const Json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "inf") return ExtRat::infinity();
  return ExtRat(rat_from_json(j, where));
}

inline Vec vec_from_json(const Json& j, const std::string& where, size_t want_dim = 0) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of rationals");
  Vec v;
  for (size_t i = 0; i < j.size(); ++i) {
    v.push_back(rat_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  if (want_dim != 0 && v.size() != want_dim) {
    throw ParseError(where + ": wants " + std::to_string(want_dim) + " coordinates, got " +
                     std::to_string(v.size()));
  }
  return v;
}

namespace scene_detail {

inline const Json& need(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

inline std::string need_string(const Json& j, const std::string& key, const std::string& where) {
  const Json& f = need(j, key, where);
  if (!f.is_string()) throw ParseError(where + "." + key + ": expected a string");
  return f.get<std::string>();
}

inline size_t need_size(const Json& j, const std::string& key, const std::string& where) {
  const Json& f = need(j, key, where);
  if (!f.is_number_unsigned()) throw ParseError(where + "." + key + ": expected a nonnegative integer");
  return f.get<size_t>();
}

}  // namespace scene_detail

// ---------------------------------------------------------------------------
// scene description

struct SceneOptions {
  Rat eps{0};              // slack for approximate subdifferentials / normals
  Rat eta = Rat(1, 10);    // witness localization slack
  std::optional<Rat> r;       // enlargement amount for the enlarge command
  std::optional<Rat> lambda;  // scaling factor for the scaling identities
  std::optional<std::string> sampling;  // "kmin:kmax:dirs" plan override

  void validate() const {
    if (eps.sign() < 0) throw InputError("options.eps must be >= 0");
    if (eta.sign() <= 0) throw InputError("options.eta must be > 0");
    if (r && r->sign() <= 0) throw InputError("options.r must be > 0");
    if (lambda && lambda->sign() <= 0) throw InputError("options.lambda must be > 0");
    if (sampling) (void)SamplingPlan::parse(*sampling);
  }
};

// Targets are either explicit polyhedral unions or the one curved benchmark
// shape: the complement of an open euclidean ball, whose minimal time under
// ball dynamics has the closed form max(0, R - |x|) / rf.
enum class TargetKind { polyhedral, ball_complement };

struct Scene {
  std::string name;
  size_t dim = 0;

  DynamicsKind dynamics_kind = DynamicsKind::polytope;
  std::vector<Vec> dynamics_vertices;  // polytope case
  Rat dynamics_radius{0};              // ball case

  TargetKind target_kind = TargetKind::polyhedral;
  PolyhedralUnion target;  // polyhedral case
  Rat hole_radius{0};      // ball-complement case: boundary radius

  std::vector<Vec> points;
  SceneOptions options;

  Dynamics dynamics() const {
    if (dynamics_kind == DynamicsKind::polytope) {
      return Dynamics::polytope(VPolytope(dim, dynamics_vertices));
    }
    return Dynamics::ball(dim, dynamics_radius);
  }

  void validate() const {
    if (name.empty()) throw InputError("scene needs a name");
    if (dim == 0) throw InputError("scene dimension must be positive");
    (void)dynamics();  // throws on malformed dynamics data
    if (target_kind == TargetKind::polyhedral) {
      if (target.dim != dim) throw InputError("target dimension mismatch");
      (void)validated_target(target);  // rejects empty targets
    } else {
      if (dynamics_kind != DynamicsKind::ball) {
        throw InputError("ball-complement targets need ball dynamics");
      }
      if (hole_radius.sign() <= 0) throw InputError("ball-complement radius must be > 0");
    }
    for (const auto& p : points) {
      if (p.size() != dim) throw InputError("query point dimension mismatch");
    }
    options.validate();
  }

  bool target_contains(const Vec& x) const {
    if (x.size() != dim) throw InputError("point dimension mismatch");
    if (target_kind == TargetKind::polyhedral) return target.contains(x);
    return norm_sq(x) >= hole_radius * hole_radius;
  }

  // black-box minimal time field for the sampling oracles; solver-backed for
  // polyhedral targets, certified closed-form enclosures for the curved one
  TimeField field(unsigned precision_bits = 96) const {
    if (target_kind == TargetKind::polyhedral) return time_field(dynamics(), target);
    const Rat R = hole_radius;
    const Rat rf = dynamics_radius;
    const size_t d = dim;
    TimeField out;
    out.dim = d;
    out.eval = [R, rf, d, precision_bits](const Vec& x) {
      check_dim(x, d, "scene field point");
      const Rat ns = norm_sq(x);
      if (ns >= R * R) return TimeValue::of(Rat(0));
      const SqrtValue s = sqrt_rational(ns, precision_bits);
      if (s.exact) return TimeValue::of((R - s.exact_value) / rf);
      return TimeValue::interval({(R - s.enclosure.hi) / rf, (R - s.enclosure.lo) / rf});
    };
    return out;
  }

  // env override beats the per-scene override beats the defaults
  SamplingPlan plan() const {
    if (const char* env = std::getenv("MINTIME_SAMPLING"); env != nullptr && *env != '\0') {
      return SamplingPlan::from_env();
    }
    if (options.sampling) return SamplingPlan::parse(*options.sampling);
    return SamplingPlan::defaults();
  }
};

// ---------------------------------------------------------------------------
// json serialization

inline Json halfspace_json(const Halfspace& h) {
  Json f;
  f["normal"] = vec_json(h.normal);
  f["offset"] = rat_json(h.offset);
  return f;
}

inline Json hpoly_json(const HPolyhedron& p) {
  Json faces = Json::array();
  for (const auto& h : p.faces) faces.push_back(halfspace_json(h));
  Json j;
  j["faces"] = faces;
  return j;
}

inline Json union_json(const PolyhedralUnion& u) {
  Json pieces = Json::array();
  for (const auto& p : u.pieces) pieces.push_back(hpoly_json(p));
  Json j;
  j["pieces"] = pieces;
  return j;
}

inline Halfspace halfspace_from_json(const Json& j, const std::string& where, size_t dim) {
  Halfspace h;
  h.normal = vec_from_json(scene_detail::need(j, "normal", where), where + ".normal", dim);
  h.offset = rat_from_json(scene_detail::need(j, "offset", where), where + ".offset");
  return h;
}

inline HPolyhedron hpoly_from_json(const Json& j, const std::string& where, size_t dim) {
  const Json& faces = scene_detail::need(j, "faces", where);
  if (!faces.is_array()) throw ParseError(where + ".faces: expected an array");
  HPolyhedron p(dim);
  for (size_t i = 0; i < faces.size(); ++i) {
    p.faces.push_back(halfspace_from_json(faces[i], where + ".faces[" + std::to_string(i) + "]", dim));
  }
  return p;
}

inline PolyhedralUnion union_from_json(const Json& j, const std::string& where, size_t dim) {
  const Json& pieces = scene_detail::need(j, "pieces", where);
  if (!pieces.is_array()) throw ParseError(where + ".pieces: expected an array");
  PolyhedralUnion u(dim);
  for (size_t i = 0; i < pieces.size(); ++i) {
    u.pieces.push_back(hpoly_from_json(pieces[i], where + ".pieces[" + std::to_string(i) + "]", dim));
  }
  return u;
}

inline Json scene_to_json(const Scene& s) {
  Json j;
  j["schema"] = "mintime-scene/1";
  j["name"] = s.name;
  j["dim"] = s.dim;
  Json dyn;
  if (s.dynamics_kind == DynamicsKind::polytope) {
    dyn["kind"] = "polytope";
    Json vs = Json::array();
    for (const auto& v : s.dynamics_vertices) vs.push_back(vec_json(v));
    dyn["vertices"] = vs;
  } else {
    dyn["kind"] = "ball";
    dyn["radius"] = rat_json(s.dynamics_radius);
  }
  j["dynamics"] = dyn;
  Json tgt;
  if (s.target_kind == TargetKind::polyhedral) {
    tgt["kind"] = "union";
    tgt["pieces"] = union_json(s.target)["pieces"];
  } else {
    tgt["kind"] = "ball-complement";
    tgt["radius"] = rat_json(s.hole_radius);
  }
  j["target"] = tgt;
  Json pts = Json::array();
  for (const auto& p : s.points) pts.push_back(vec_json(p));
  j["points"] = pts;
  Json opt;
  opt["eps"] = rat_json(s.options.eps);
  opt["eta"] = rat_json(s.options.eta);
  if (s.options.r) opt["r"] = rat_json(*s.options.r);
  if (s.options.lambda) opt["lambda"] = rat_json(*s.options.lambda);
  if (s.options.sampling) opt["sampling"] = *s.options.sampling;
  j["options"] = opt;
  return j;
}

inline Scene scene_from_json(const Json& j, const std::string& where = "scene") {
  using scene_detail::need;
  using scene_detail::need_string;
  if (need_string(j, "schema", where) != "mintime-scene/1") {
    throw ParseError(where + ".schema: expected \"mintime-scene/1\"");
  }
  Scene s;
  s.name = need_string(j, "name", where);
  s.dim = scene_detail::need_size(j, "dim", where);
  if (s.dim == 0) throw ParseError(where + ".dim: must be positive");

  const Json& dyn = need(j, "dynamics", where);
  const std::string dk = need_string(dyn, "kind", where + ".dynamics");
  if (dk == "polytope") {
    s.dynamics_kind = DynamicsKind::polytope;
    const Json& vs = need(dyn, "vertices", where + ".dynamics");
    if (!vs.is_array() || vs.empty()) {
      throw ParseError(where + ".dynamics.vertices: expected a nonempty array");
    }
    for (size_t i = 0; i < vs.size(); ++i) {
      s.dynamics_vertices.push_back(
          vec_from_json(vs[i], where + ".dynamics.vertices[" + std::to_string(i) + "]", s.dim));
    }
  } else if (dk == "ball") {
    s.dynamics_kind = DynamicsKind::ball;
    s.dynamics_radius = rat_from_json(need(dyn, "radius", where + ".dynamics"), where + ".dynamics.radius");
  } else {
    throw ParseError(where + ".dynamics.kind: expected \"polytope\" or \"ball\"");
  }

  const Json& tgt = need(j, "target", where);
  const std::string tk = need_string(tgt, "kind", where + ".target");
  if (tk == "union") {
    s.target_kind = TargetKind::polyhedral;
    s.target = union_from_json(tgt, where + ".target", s.dim);
  } else if (tk == "ball-complement") {
    s.target_kind = TargetKind::ball_complement;
    s.hole_radius = rat_from_json(need(tgt, "radius", where + ".target"), where + ".target.radius");
  } else {
    throw ParseError(where + ".target.kind: expected \"union\" or \"ball-complement\"");
  }

  if (j.contains("points")) {
    const Json& pts = j["points"];
    if (!pts.is_array()) throw ParseError(where + ".points: expected an array");
    for (size_t i = 0; i < pts.size(); ++i) {
      s.points.push_back(vec_from_json(pts[i], where + ".points[" + std::to_string(i) + "]", s.dim));
    }
  }

  if (j.contains("options")) {
    const Json& opt = j["options"];
    if (!opt.is_object()) throw ParseError(where + ".options: expected an object");
    if (opt.contains("eps")) s.options.eps = rat_from_json(opt["eps"], where + ".options.eps");
    if (opt.contains("eta")) s.options.eta = rat_from_json(opt["eta"], where + ".options.eta");
    if (opt.contains("r")) s.options.r = rat_from_json(opt["r"], where + ".options.r");
    if (opt.contains("lambda")) {
      s.options.lambda = rat_from_json(opt["lambda"], where + ".options.lambda");
    }
    if (opt.contains("sampling")) {
      if (!opt["sampling"].is_string()) {
        throw ParseError(where + ".options.sampling: expected a string");
      }
      s.options.sampling = opt["sampling"].get<std::string>();
    }
  }

  try {
    s.validate();
  } catch (const InputError& e) {
    throw ParseError(where + ": " + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// files and fixture lookup

inline Scene load_scene_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open scene file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("scene file '" + path + "': " + e.what());
  }
  try {
    return scene_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError("scene file '" + path + "': " + e.what());
  }
}

inline void save_scene_file(const Scene& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write scene file '" + path + "'");
  out << scene_to_json(s).dump(2) << "\n";
}

inline std::string fixture_directory() {
  if (const char* env = std::getenv("MINTIME_FIXTURE_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
#ifdef MINTIME_FIXTURE_DIR
  return MINTIME_FIXTURE_DIR;
#else
  return "fixtures";
#endif
}

// a scene reference is a file path or the name of a bundled fixture
inline std::string resolve_scene_ref(const std::string& ref) {
  std::error_code ec;
  if (std::filesystem::exists(ref, ec)) return ref;
  const std::string fixture = fixture_directory() + "/" + ref + ".json";
  if (std::filesystem::exists(fixture, ec)) return fixture;
  throw InputError("scene '" + ref + "' is neither a file nor a bundled fixture name");
}

inline Scene load_scene(const std::string& ref) { return load_scene_file(resolve_scene_ref(ref)); }

// ---------------------------------------------------------------------------
// bundled scenes

inline const std::vector<std::string>& bundled_scene_names() {
  static const std::vector<std::string> names = {
      "example-5.3", "example-6.4", "example-7.4", "section-6-counterexample",
      "section-1-halfline"};
  return names;
}

// the in-code catalogue; the fixture files under the fixture directory hold
// the same data, and the tests pin the two against each other
inline Scene bundled_scene(const std::string& id) {
  auto pt = [](int a, int b) { return Vec{Rat(a), Rat(b)}; };
  auto face = [](Vec n, Rat off) {
    Halfspace h;
    h.normal = std::move(n);
    h.offset = std::move(off);
    return h;
  };
  auto piece = [](size_t d, std::vector<Halfspace> fs) { return HPolyhedron(d, std::move(fs)); };

  Scene s;
  s.name = id;
  if (id == "example-5.3" || id == "example-6.4") {
    // horizontal unit segment dynamics against the closed complement of the
    // open unit box; minimal time 1 - |x1| off the target
    s.dim = 2;
    s.dynamics_kind = DynamicsKind::polytope;
    s.dynamics_vertices = {pt(-1, 0), pt(1, 0)};
    s.target = PolyhedralUnion(
        2, {piece(2, {face({Rat(-1), Rat(0)}, Rat(-1))}),    // right half-plane x1 >= 1
            piece(2, {face({Rat(1), Rat(0)}, Rat(-1))}),     // left half-plane x1 <= -1
            piece(2, {face({Rat(0), Rat(-1)}, Rat(-1))}),    // upper half-plane x2 >= 1
            piece(2, {face({Rat(0), Rat(1)}, Rat(-1))})});   // lower half-plane x2 <= -1
    if (id == "example-5.3") {
      s.points = {pt(1, 0), pt(0, 1), pt(0, 0)};
    } else {
      s.points = {Vec{Rat(1, 2), Rat(1, 2)}};
    }
  } else if (id == "example-7.4") {
    // horizontal unit segment dynamics against the solid unit box; finite
    // time only inside the band |x2| <= 1
    s.dim = 2;
    s.dynamics_kind = DynamicsKind::polytope;
    s.dynamics_vertices = {pt(-1, 0), pt(1, 0)};
    s.target = PolyhedralUnion(2, {piece(2, {face({Rat(1), Rat(0)}, Rat(1)),
                                             face({Rat(-1), Rat(0)}, Rat(1)),
                                             face({Rat(0), Rat(1)}, Rat(1)),
                                             face({Rat(0), Rat(-1)}, Rat(1))})});
    s.points = {pt(1, 0), pt(0, 1), Vec{Rat(2), Rat(1, 2)}, pt(0, 2)};
  } else if (id == "section-6-counterexample") {
    // unit disc dynamics against the complement of the open unit disc:
    // normal cone to the 1-enlargement degenerates while the limiting
    // subdifferential fills the whole unit circle
    s.dim = 2;
    s.dynamics_kind = DynamicsKind::ball;
    s.dynamics_radius = Rat(1);
    s.target_kind = TargetKind::ball_complement;
    s.hole_radius = Rat(1);
    s.points = {pt(0, 0)};
    s.options.r = Rat(1);
  } else if (id == "section-1-halfline") {
    // one-sided dynamics [0,1] on the line against the left half-line: the
    // only admissible motion points away from the target, so time is
    // infinite off the target
    s.dim = 1;
    s.dynamics_kind = DynamicsKind::polytope;
    s.dynamics_vertices = {Vec{Rat(0)}, Vec{Rat(1)}};
    s.target = PolyhedralUnion(1, {piece(1, {face({Rat(1)}, Rat(0))})});
    s.points = {Vec{Rat(1)}, Vec{Rat(0)}, Vec{Rat(-2)}};
  } else {
    throw InputError("unknown bundled scene '" + id + "'");
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// reports

// every command emits a report document; exact values inside results and
// summary are encoded as strings, so parse/serialize round-trips are lossless
struct Report {
  std::string command;
  std::string scene;
  Json results = Json::array();
  Json summary = Json::object();
};

inline Json report_to_json(const Report& r) {
  Json j;
  j["schema"] = "mintime-report/1";
  j["command"] = r.command;
  j["scene"] = r.scene;
  j["results"] = r.results;
  j["summary"] = r.summary;
  return j;
}

inline Report report_from_json(const Json& j, const std::string& where = "report") {
  using scene_detail::need;
  using scene_detail::need_string;
  if (need_string(j, "schema", where) != "mintime-report/1") {
    throw ParseError(where + ".schema: expected \"mintime-report/1\"");
  }
  Report r;
  r.command = need_string(j, "command", where);
  r.scene = need_string(j, "scene", where);
  const Json& res = need(j, "results", where);
  if (!res.is_array()) throw ParseError(where + ".results: expected an array");
  r.results = res;
  const Json& sum = need(j, "summary", where);
  if (!sum.is_object()) throw ParseError(where + ".summary: expected an object");
  r.summary = sum;
  return r;
}

inline Json time_json(const TimeValue& t) {
  if (!t.finite) return Json("inf");
  if (t.exact) return rat_json(t.value);
  Json j;
  j["lo"] = rat_json(t.enclosure.lo);
  j["hi"] = rat_json(t.enclosure.hi);
  return j;
}

// h-rep plus, in low dimension, the generator form for readability
inline Json set_json(const PolyhedralUnion& u) {
  Json j = union_json(u);
  if (u.dim >= 1 && u.dim <= 3) {
    Json gens = Json::array();
    for (const auto& p : u.pieces) {
      const Generators g = polyhedron_generators(p);
      Json e;
      Json pts = Json::array();
      for (const auto& v : g.points) pts.push_back(vec_json(v));
      Json rays = Json::array();
      for (const auto& v : g.rays) rays.push_back(vec_json(v));
      Json lines = Json::array();
      for (const auto& v : g.lines) lines.push_back(vec_json(v));
      e["points"] = pts;
      e["rays"] = rays;
      e["lines"] = lines;
      gens.push_back(e);
    }
    j["generators"] = gens;
  }
  return j;
}

}  // namespace mintime

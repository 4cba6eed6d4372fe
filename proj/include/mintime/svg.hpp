#pragma once

#include <algorithm>
#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "mintime/enumeration.hpp"
#include "mintime/errors.hpp"
#include "mintime/mintime.hpp"
#include "mintime/scene.hpp"
#include "mintime/subdiff.hpp"

// Deterministic SVG 1.1 renderer for planar scenes: fixed canvas, fixed
// element order, exact rational coordinate arithmetic rounded to hundredths
// of a pixel, no timestamps or floats — equal input means equal bytes.

namespace mintime {

struct PlotLayers {
  bool target = false;
  bool dynamics = false;
  bool levels = false;      // minimal time level curves
  bool projection = false;  // segment from each query point to a projection witness
  bool points = false;      // query point markers
  bool subdiff = false;     // dual-space inset panel at the first query point

  // comma-separated layer names; the empty string selects nothing
  static PlotLayers parse(const std::string& csv) {
    PlotLayers out;
    std::istringstream in(csv);
    std::string part;
    while (std::getline(in, part, ',')) {
      std::string w;
      for (char c : part) {
        if (!std::isspace(static_cast<unsigned char>(c))) w += c;
      }
      if (w.empty()) continue;
      if (w == "target") out.target = true;
      else if (w == "dynamics") out.dynamics = true;
      else if (w == "levels") out.levels = true;
      else if (w == "projection") out.projection = true;
      else if (w == "points") out.points = true;
      else if (w == "subdiff") out.subdiff = true;
      else throw InputError("unknown plot layer '" + w + "'");
    }
    return out;
  }

  static PlotLayers all() {
    PlotLayers out;
    out.target = out.dynamics = out.levels = out.projection = out.points = out.subdiff = true;
    return out;
  }
};

namespace svg_detail {

// hundredths of a pixel, half-up rounding, no trailing float noise
inline std::string fmt_px(const Rat& v) {
  const Rat shifted = v * Rat(100) + Rat(1, 2);
  mpz_class q;
  const mpz_class num = shifted.num();
  const mpz_class den = shifted.den();
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  const bool neg = q < 0;
  mpz_class a = abs(q);
  const mpz_class whole = a / 100;
  const mpz_class frac = a % 100;
  std::string fs = frac.get_str();
  if (fs.size() < 2) fs = std::string(2 - fs.size(), '0') + fs;
  std::string out = whole.get_str() + "." + fs;
  if (neg && a != 0) out = "-" + out;
  return out;
}

// maps a rational world window onto a pixel rectangle; y flips
struct Frame {
  Rat xmin, xmax, ymin, ymax;
  Rat px, py, pw, ph;

  Rat sx(const Rat& x) const { return px + (x - xmin) * pw / (xmax - xmin); }
  Rat sy(const Rat& y) const { return py + (ymax - y) * ph / (ymax - ymin); }
  Rat slen(const Rat& d) const { return d * pw / (xmax - xmin); }
  std::string at(const Vec& p) const { return fmt_px(sx(p[0])) + "," + fmt_px(sy(p[1])); }
};

// vertices of the piece clipped to the frame window (always bounded)
inline std::vector<Vec> clipped_vertices(const Frame& fr, const HPolyhedron& piece) {
  HPolyhedron c = piece;
  c.add({Rat(1), Rat(0)}, fr.xmax);
  c.add({Rat(-1), Rat(0)}, -fr.xmin);
  c.add({Rat(0), Rat(1)}, fr.ymax);
  c.add({Rat(0), Rat(-1)}, -fr.ymin);
  return polyhedron_generators(c).points;
}

// counterclockwise order around the vertex centroid, exact comparisons only
inline std::vector<Vec> ccw_order(std::vector<Vec> pts) {
  if (pts.size() < 3) return pts;
  Vec c = zero_vec(2);
  for (const auto& p : pts) c = add(c, p);
  c = scale(Rat(1, static_cast<long>(pts.size())), c);
  auto lower_half = [&](const Vec& p) {
    const Rat dx = p[0] - c[0];
    const Rat dy = p[1] - c[1];
    return (dy.sign() < 0 || (dy.sign() == 0 && dx.sign() < 0)) ? 1 : 0;
  };
  std::sort(pts.begin(), pts.end(), [&](const Vec& a, const Vec& b) {
    const int ha = lower_half(a);
    const int hb = lower_half(b);
    if (ha != hb) return ha < hb;
    const Rat cross = (a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]);
    if (cross.sign() != 0) return cross.sign() > 0;
    return norm_sq(sub(a, c)) < norm_sq(sub(b, c));
  });
  return pts;
}

inline void shape_elem(std::ostringstream& out, const Frame& fr, const std::vector<Vec>& raw,
                       const std::string& style) {
  const std::vector<Vec> pts = ccw_order(raw);
  if (pts.empty()) return;
  if (pts.size() == 1) {
    out << "  <circle cx=\"" << fmt_px(fr.sx(pts[0][0])) << "\" cy=\"" << fmt_px(fr.sy(pts[0][1]))
        << "\" r=\"3.00\" " << style << "/>\n";
    return;
  }
  if (pts.size() == 2) {
    out << "  <line x1=\"" << fmt_px(fr.sx(pts[0][0])) << "\" y1=\"" << fmt_px(fr.sy(pts[0][1]))
        << "\" x2=\"" << fmt_px(fr.sx(pts[1][0])) << "\" y2=\"" << fmt_px(fr.sy(pts[1][1]))
        << "\" " << style << " stroke-width=\"2\"/>\n";
    return;
  }
  out << "  <polygon points=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) out << " ";
    out << fr.at(pts[i]);
  }
  out << "\" " << style << "/>\n";
}

inline void frame_and_axes(std::ostringstream& out, const Frame& fr) {
  out << "  <rect x=\"" << fmt_px(fr.px) << "\" y=\"" << fmt_px(fr.py) << "\" width=\""
      << fmt_px(fr.pw) << "\" height=\"" << fmt_px(fr.ph)
      << "\" fill=\"#ffffff\" stroke=\"#333333\"/>\n";
  if (fr.xmin.sign() < 0 && fr.xmax.sign() > 0) {
    out << "  <line x1=\"" << fmt_px(fr.sx(Rat(0))) << "\" y1=\"" << fmt_px(fr.py) << "\" x2=\""
        << fmt_px(fr.sx(Rat(0))) << "\" y2=\"" << fmt_px(fr.py + fr.ph)
        << "\" stroke=\"#bbbbbb\"/>\n";
  }
  if (fr.ymin.sign() < 0 && fr.ymax.sign() > 0) {
    out << "  <line x1=\"" << fmt_px(fr.px) << "\" y1=\"" << fmt_px(fr.sy(Rat(0))) << "\" x2=\""
        << fmt_px(fr.px + fr.pw) << "\" y2=\"" << fmt_px(fr.sy(Rat(0)))
        << "\" stroke=\"#bbbbbb\"/>\n";
  }
}

inline void circle_elem(std::ostringstream& out, const Frame& fr, const Vec& center, const Rat& r,
                        const std::string& style) {
  out << "  <circle cx=\"" << fmt_px(fr.sx(center[0])) << "\" cy=\"" << fmt_px(fr.sy(center[1]))
      << "\" r=\"" << fmt_px(fr.slen(r)) << "\" " << style << "/>\n";
}

inline void dot_elem(std::ostringstream& out, const Frame& fr, const Vec& p,
                     const std::string& fill) {
  out << "  <circle cx=\"" << fmt_px(fr.sx(p[0])) << "\" cy=\"" << fmt_px(fr.sy(p[1]))
      << "\" r=\"3.50\" fill=\"" << fill << "\"/>\n";
}

}  // namespace svg_detail

inline std::string render_scene_svg(const Scene& scene, const PlotLayers& layers) {
  using namespace svg_detail;
  scene.validate();
  if (scene.dim != 2) {
    throw UnsupportedDimensionError("svg rendering is available for planar scenes only");
  }

  const Frame world{Rat(-4), Rat(4),  Rat(-4), Rat(4),
                    Rat(40), Rat(40), Rat(560), Rat(560)};
  const Frame inset{Rat(-2), Rat(2),  Rat(-2), Rat(2),
                    Rat(446), Rat(16), Rat(150), Rat(150)};

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"640\""
      << " viewBox=\"0 0 640 640\">\n"
      << "  <title>" << scene.name << "</title>\n"
      << "  <rect x=\"0\" y=\"0\" width=\"640\" height=\"640\" fill=\"#ffffff\"/>\n";
  frame_and_axes(out, world);

  const std::string target_style = "fill=\"#c8d8f0\" fill-opacity=\"0.85\" stroke=\"#3060a0\"";
  const std::string level_style = "fill=\"none\" stroke=\"#d08030\" stroke-width=\"1.5\"";
  const std::string dynamics_style = "fill=\"#f5e0c8\" fill-opacity=\"0.8\" stroke=\"#b07020\"";

  if (layers.target) {
    if (scene.target_kind == TargetKind::polyhedral) {
      for (const auto& piece : scene.target.pieces) {
        shape_elem(out, world, clipped_vertices(world, piece), target_style);
      }
    } else {
      out << "  <rect x=\"" << fmt_px(world.px) << "\" y=\"" << fmt_px(world.py) << "\" width=\""
          << fmt_px(world.pw) << "\" height=\"" << fmt_px(world.ph) << "\" " << target_style
          << "/>\n";
      circle_elem(out, world, zero_vec(2), scene.hole_radius,
                  "fill=\"#ffffff\" stroke=\"#3060a0\"");
    }
  }

  if (layers.levels) {
    const std::vector<Rat> levels = {Rat(1, 2), Rat(1), Rat(3, 2), Rat(2)};
    if (scene.target_kind == TargetKind::polyhedral) {
      const Dynamics f = scene.dynamics();
      if (f.kind() != DynamicsKind::polytope) {
        throw WrongRegimeError("level curves need polytope dynamics or the curved benchmark target");
      }
      for (const auto& c : levels) {
        const PolyhedralUnion u = enlargement(f, scene.target, c);
        for (const auto& piece : u.pieces) {
          shape_elem(out, world, clipped_vertices(world, piece), level_style);
        }
      }
    } else {
      for (const auto& c : levels) {
        const Rat rad = scene.hole_radius - c * scene.dynamics_radius;
        if (rad.sign() > 0) circle_elem(out, world, zero_vec(2), rad, level_style);
      }
    }
  }

  if (layers.dynamics) {
    if (scene.dynamics_kind == DynamicsKind::polytope) {
      shape_elem(out, world, scene.dynamics().vertices().vertices, dynamics_style);
    } else {
      circle_elem(out, world, zero_vec(2), scene.dynamics_radius, dynamics_style);
    }
  }

  if (layers.projection) {
    if (scene.target_kind != TargetKind::polyhedral ||
        scene.dynamics_kind != DynamicsKind::polytope) {
      throw WrongRegimeError("projection segments need polytope dynamics and a polyhedral target");
    }
    const Dynamics f = scene.dynamics();
    for (const auto& x : scene.points) {
      const MinTimeResult mt = minimal_time(f, scene.target, x);
      if (!mt.time.finite || mt.time.value.is_zero()) continue;
      const ProjectionSet ps = projection_set(f, scene.target, x);
      out << "  <line x1=\"" << fmt_px(world.sx(x[0])) << "\" y1=\"" << fmt_px(world.sy(x[1]))
          << "\" x2=\"" << fmt_px(world.sx(ps.witness_point[0])) << "\" y2=\""
          << fmt_px(world.sy(ps.witness_point[1]))
          << "\" stroke=\"#208040\" stroke-width=\"1.5\" stroke-dasharray=\"6,3\"/>\n";
      dot_elem(out, world, ps.witness_point, "#208040");
    }
  }

  if (layers.points) {
    for (const auto& x : scene.points) dot_elem(out, world, x, "#c03030");
  }

  if (layers.subdiff) {
    if (scene.target_kind != TargetKind::polyhedral ||
        scene.dynamics_kind != DynamicsKind::polytope) {
      throw WrongRegimeError("the subdifferential inset needs polytope dynamics and a polyhedral target");
    }
    if (scene.points.empty()) {
      throw InputError("the subdifferential inset needs a query point");
    }
    const Dynamics f = scene.dynamics();
    const Vec& x = scene.points.front();
    SubdiffResult basic;
    SubdiffResult singular;
    if (scene.target.contains(x)) {
      basic = basic_subdiff_inset(f, scene.target, x);
      singular = singular_subdiff_inset(f, scene.target, x);
    } else {
      const OutsetProjection op = subdiff_outset_via_projection(f, scene.target, x);
      basic = op.basic;
      singular = op.singular;
    }
    frame_and_axes(out, inset);
    for (const auto& piece : singular.set.pieces) {
      shape_elem(out, inset, clipped_vertices(inset, piece),
                 "fill=\"none\" stroke=\"#d04040\" stroke-dasharray=\"4,2\"");
    }
    for (const auto& piece : basic.set.pieces) {
      shape_elem(out, inset, clipped_vertices(inset, piece),
                 "fill=\"#9070d0\" fill-opacity=\"0.6\" stroke=\"#5030a0\"");
    }
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace mintime

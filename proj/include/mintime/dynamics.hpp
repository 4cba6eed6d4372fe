#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mintime/enumeration.hpp"
#include "mintime/linprog.hpp"
#include "mintime/polyhedron.hpp"

namespace mintime {

enum class DynamicsKind { polytope, ball };

// The constant dynamics set: a nonempty compact convex set, either the convex
// hull of finitely many rational points or a euclidean ball of rational radius.
// All queries are exact; square roots are reported as exact values when the
// radicand is a perfect square and as certified enclosures otherwise.
class Dynamics {
 public:
  static Dynamics polytope(VPolytope f) {
    Dynamics d;
    d.kind_ = DynamicsKind::polytope;
    d.dim_ = f.dim;
    d.verts_ = canonical_vertices(f);
    d.g_hull_ = d.compute_g_hull();
    return d;
  }

  static Dynamics ball(size_t dim, Rat radius) {
    if (radius.sign() <= 0) throw InputError("ball dynamics needs a positive radius");
    Dynamics d;
    d.kind_ = DynamicsKind::ball;
    d.dim_ = dim;
    d.radius_ = std::move(radius);
    return d;
  }

  DynamicsKind kind() const { return kind_; }
  size_t dim() const { return dim_; }
  bool is_polytope() const { return kind_ == DynamicsKind::polytope; }

  const VPolytope& vertices() const {
    require(DynamicsKind::polytope, "vertices");
    return *verts_;
  }

  const Rat& radius() const {
    require(DynamicsKind::ball, "radius");
    return radius_;
  }

  bool contains(const Vec& x) const {
    check_dim(x, dim_);
    if (kind_ == DynamicsKind::ball) return mintime::norm_sq(x) <= radius_ * radius_;
    return verts_->contains(x);
  }

  bool contains_origin() const { return contains(zero_vec(dim_)); }

  // 0 in int F. For a polytope: the affine hull must be full dimensional and
  // the origin must admit a convex representation with all weights positive.
  bool origin_interior() const {
    if (kind_ == DynamicsKind::ball) return true;
    const auto& v = verts_->vertices;
    Mat diffs;
    for (size_t i = 1; i < v.size(); ++i) diffs.push_back(sub(v[i], v[0]));
    if (rank(diffs) < dim_) return false;
    // max eps s.t. sum lambda_i v_i = 0, sum lambda = 1, lambda_i >= eps.
    const size_t n = v.size();
    LinearProgram lp(n + 1);
    lp.objective = zero_vec(n + 1);
    lp.objective[n] = Rat(-1);  // maximize eps
    for (size_t c = 0; c < dim_; ++c) {
      Vec row = zero_vec(n + 1);
      for (size_t i = 0; i < n; ++i) row[i] = v[i][c];
      lp.add_eq(row, Rat(0));
    }
    Vec ones = zero_vec(n + 1);
    for (size_t i = 0; i < n; ++i) ones[i] = Rat(1);
    lp.add_eq(ones, Rat(1));
    for (size_t i = 0; i < n; ++i) {
      Vec row = zero_vec(n + 1);
      row[i] = Rat(-1);
      row[n] = Rat(1);
      lp.add_ineq(row, Rat(0));  // eps - lambda_i <= 0
    }
    lp.nonneg.assign(n + 1, true);
    lp.nonneg[n] = false;
    const LPResult r = lp_solve(lp);
    return r.status == LPStatus::optimal && -r.value > Rat(0);
  }

  // max squared euclidean norm over F.
  Rat norm_sq() const {
    if (kind_ == DynamicsKind::ball) return radius_ * radius_;
    Rat best(0);
    for (const auto& v : verts_->vertices) best = max(best, mintime::norm_sq(v));
    return best;
  }

  SqrtValue norm() const { return sqrt_rational(norm_sq()); }

  // Support function sigma_F(x) = max over F of <x, .>; exact for polytopes.
  Rat support(const Vec& x) const {
    require(DynamicsKind::polytope, "support");
    check_dim(x, dim_);
    Rat best = dot(x, verts_->vertices[0]);
    for (size_t i = 1; i < verts_->vertices.size(); ++i)
      best = max(best, dot(x, verts_->vertices[i]));
    return best;
  }

  // sigma_F(x) <= c, decided exactly for both kinds (balls by squaring).
  bool support_le(const Vec& x, const Rat& c) const {
    if (kind_ == DynamicsKind::polytope) return support(x) <= c;
    if (c.sign() < 0) return false;
    return radius_ * radius_ * mintime::norm_sq(x) <= c * c;
  }

  bool support_ge(const Vec& x, const Rat& c) const {
    if (kind_ == DynamicsKind::polytope) return support(x) >= c;
    if (c.sign() <= 0) return true;
    return radius_ * radius_ * mintime::norm_sq(x) >= c * c;
  }

  // Minkowski gauge rho_F(u) = inf { t >= 0 : u in t F } for polytopes, with
  // the convex coefficients of the optimal representation u = sum lambda_i v_i,
  // sum lambda_i = rho. Returns nullopt when no t works (value +infinity).
  std::optional<std::pair<Rat, Vec>> gauge_with_coeffs(const Vec& u) const {
    require(DynamicsKind::polytope, "gauge_with_coeffs");
    check_dim(u, dim_);
    const auto& v = verts_->vertices;
    const size_t n = v.size();
    LinearProgram lp(n);
    lp.objective.assign(n, Rat(1));
    for (size_t c = 0; c < dim_; ++c) {
      Vec row(n);
      for (size_t i = 0; i < n; ++i) row[i] = v[i][c];
      lp.add_eq(row, u[c]);
    }
    lp.nonneg.assign(n, true);
    const LPResult r = lp_solve(lp);
    if (r.status == LPStatus::infeasible) return std::nullopt;
    if (r.status != LPStatus::optimal) throw Error("gauge program cannot be unbounded");
    return std::make_pair(r.value, r.point);
  }

  ExtRat gauge(const Vec& u) const {
    const auto g = gauge_with_coeffs(u);
    if (!g) return ExtRat::infinity();
    return ExtRat(g->first);
  }

  // Squared gauge for ball dynamics: (||u|| / r)^2, exact.
  Rat gauge_sq(const Vec& u) const {
    require(DynamicsKind::ball, "gauge_sq");
    check_dim(u, dim_);
    return mintime::norm_sq(u) / (radius_ * radius_);
  }

  // conv(F union {0}): the gauge of this hull is the minimal time function of
  // distance-one enlargements and drives every enlargement computation.
  const VPolytope& g_hull() const {
    require(DynamicsKind::polytope, "g_hull");
    return *g_hull_;
  }

  void require(DynamicsKind k, const char* what) const {
    if (kind_ != k) throw WrongRegimeError(std::string(what) + ": wrong dynamics kind");
  }

 private:
  Dynamics() = default;

  VPolytope compute_g_hull() const {
    std::vector<Vec> pts = verts_->vertices;
    pts.push_back(zero_vec(dim_));
    return canonical_vertices(VPolytope(dim_, std::move(pts)));
  }

  DynamicsKind kind_ = DynamicsKind::polytope;
  size_t dim_ = 0;
  std::optional<VPolytope> verts_;
  std::optional<VPolytope> g_hull_;
  Rat radius_ = Rat(0);
};

}  // namespace mintime

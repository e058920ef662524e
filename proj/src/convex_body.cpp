#include "chordflow/convex_body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <string>

#include "chordflow/errors.hpp"

namespace chordflow {

std::array<double, 2> principal_radii(const SymMat2& b, int dim) {
  if (dim == 2) return {b.xx, b.xx};
  const double mean = 0.5 * (b.xx + b.yy);
  const double diff = 0.5 * (b.xx - b.yy);
  const double r = std::sqrt(diff * diff + b.xy * b.xy);
  return {mean - r, mean + r};
}

ConvexBody::ConvexBody(GridPtr grid, std::vector<double> h, double convex_eps)
    : grid_(std::move(grid)), h_(std::move(h)), convex_eps_(convex_eps) {
  if (!grid_) throw Error(ErrorCode::InvalidConfig, "body needs a grid");
  if (h_.size() != grid_->size()) {
    throw Error(ErrorCode::ShapeMismatch, "support samples do not match grid size");
  }
  for (std::size_t i = 0; i < h_.size(); ++i) {
    if (!(h_[i] > 0.0) || !std::isfinite(h_[i])) {
      throw Error(ErrorCode::NotPositive,
                  "support function must be positive and finite (node " + std::to_string(i) + ")");
    }
  }
  grad_ = grid_->gradient(h_);
  b_ = grid_->hessian(h_);
  const int dim = grid_->dim();
  det_b_.resize(h_.size());
  points_.resize(h_.size());
  min_eig_ = std::numeric_limits<double>::infinity();
  max_eig_ = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h_.size(); ++i) {
    b_[i].xx += h_[i];
    if (dim == 3) b_[i].yy += h_[i];
    det_b_[i] = dim == 2 ? b_[i].xx : b_[i].xx * b_[i].yy - b_[i].xy * b_[i].xy;
    const auto eig = principal_radii(b_[i], dim);
    min_eig_ = std::min(min_eig_, eig[0]);
    max_eig_ = std::max(max_eig_, eig[1]);
    const Vec3 g = grid_->embed(i, grad_[i]);
    const Vec3& x = grid_->node(i);
    points_[i] = {g[0] + h_[i] * x[0], g[1] + h_[i] * x[1], g[2] + h_[i] * x[2]};
  }
}

void ConvexBody::require_strictly_convex() const {
  if (!strictly_convex()) {
    throw Error(ErrorCode::ConvexityLoss,
                "minimum radius of curvature " + std::to_string(min_eig_) + " below " +
                    std::to_string(convex_eps_));
  }
}

double ConvexBody::max_gradient_norm() const {
  double m = 0.0;
  for (const auto& g : grad_) m = std::max(m, std::sqrt(g[0] * g[0] + g[1] * g[1]));
  return m;
}

Vec3 boundary_point(const ConvexBody& body, std::size_t i) { return body.boundary_points()[i]; }

double gauss_curvature(const ConvexBody& body, std::size_t i) {
  const double det = body.radii_product(i);
  if (!(det > body.convex_eps())) {
    throw Error(ErrorCode::ConvexityLoss,
                "det b = " + std::to_string(det) + " at node " + std::to_string(i));
  }
  return 1.0 / det;
}

double radial_from_support(const ConvexBody& body, const Vec3& u) {
  const auto nodes = body.grid().nodes();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double c = dot(nodes[j], u);
    if (c > 0.0) best = std::min(best, body.h(j) / c);
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorCode::DegenerateGrid, "no grid node in the open half-sphere of u");
  }
  return best;
}

RadialFunction radial_function(const ConvexBody& body, const GridPtr& directions) {
  RadialFunction r{directions, std::vector<double>(directions->size())};
  for (std::size_t k = 0; k < directions->size(); ++k) {
    r.rho[k] = radial_from_support(body, directions->node(k));
  }
  return r;
}

std::vector<double> support_from_radial(const RadialFunction& radial, const SphereGrid& grid) {
  std::vector<double> h(grid.size(), -std::numeric_limits<double>::infinity());
  const auto dirs = radial.directions->nodes();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3& x = grid.node(i);
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      h[i] = std::max(h[i], radial.rho[k] * dot(dirs[k], x));
    }
  }
  return h;
}

namespace {

// Intersection of the lines z.x_a = h_a and z.x_b = h_b in the plane.
Vec3 intersect_lines(const Vec3& xa, double ha, const Vec3& xb, double hb) {
  const double det = xa[0] * xb[1] - xa[1] * xb[0];
  return {(ha * xb[1] - hb * xa[1]) / det, (xa[0] * hb - xb[0] * ha) / det, 0.0};
}

// Counter-clockwise angle from a to b in [0, 2 pi).
double ccw_angle(const Vec3& a, const Vec3& b) {
  double t = std::atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1]);
  if (t < 0.0) t += 2.0 * M_PI;
  return t;
}

// Indices of the non-redundant half-planes, in angular order.
std::vector<std::size_t> active_constraints(const ConvexBody& body) {
  const std::size_t n = body.size();
  const auto nodes = body.grid().nodes();
  std::vector<std::size_t> prev(n), next(n);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    prev[i] = (i + n - 1) % n;
    next[i] = (i + 1) % n;
  }
  std::vector<std::size_t> work(n);
  for (std::size_t i = 0; i < n; ++i) work[i] = n - 1 - i;
  std::size_t count = n;
  while (!work.empty() && count > 3) {
    const std::size_t j = work.back();
    work.pop_back();
    if (!alive[j]) continue;
    const std::size_t a = prev[j];
    const std::size_t b = next[j];
    if (ccw_angle(nodes[a], nodes[b]) >= M_PI) continue;
    const Vec3 p = intersect_lines(nodes[a], body.h(a), nodes[b], body.h(b));
    if (dot(p, nodes[j]) <= body.h(j)) {
      alive[j] = false;
      --count;
      next[a] = b;
      prev[b] = a;
      work.push_back(a);
      work.push_back(b);
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

std::vector<Vec3> wulff_polygon(const ConvexBody& body) {
  if (body.dim() != 2) throw Error(ErrorCode::InvalidConfig, "wulff_polygon is planar only");
  const auto nodes = body.grid().nodes();
  const auto active = active_constraints(body);
  std::vector<Vec3> verts;
  verts.reserve(active.size());
  for (std::size_t k = 0; k < active.size(); ++k) {
    const std::size_t a = active[k];
    const std::size_t b = active[(k + 1) % active.size()];
    verts.push_back(intersect_lines(nodes[a], body.h(a), nodes[b], body.h(b)));
  }
  return verts;
}

ConvexBody wulff_project(const ConvexBody& body) {
  const auto nodes = body.grid().nodes();
  const std::size_t n = body.size();
  std::vector<double> h(body.h().begin(), body.h().end());
  if (body.dim() == 2) {
    const auto active = active_constraints(body);
    for (std::size_t k = 0; k < active.size(); ++k) {
      const std::size_t a = active[k];
      const std::size_t b = active[(k + 1) % active.size()];
      const Vec3 v = intersect_lines(nodes[a], body.h(a), nodes[b], body.h(b));
      for (std::size_t j = (a + 1) % n; j != b; j = (j + 1) % n) h[j] = dot(v, nodes[j]);
    }
  } else {
    const RadialFunction radial = radial_function(body, body.grid_ptr());
    const auto hull = support_from_radial(radial, body.grid());
    for (std::size_t i = 0; i < n; ++i) h[i] = std::min(h[i], hull[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0)) {
      throw Error(ErrorCode::NotPositive, "Wulff projection left the origin outside the body");
    }
  }
  return body.with_support(std::move(h));
}

double volume(const ConvexBody& body) {
  std::vector<double> integrand(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) integrand[i] = body.h(i) * body.radii_product(i);
  return body.grid().integrate(integrand) / body.dim();
}

double surface_area(const ConvexBody& body) { return body.grid().integrate(body.radii_product()); }

std::vector<double> discrete_radii(const ConvexBody& body) {
  if (body.dim() != 2) throw Error(ErrorCode::InvalidConfig, "discrete_radii is planar only");
  const std::size_t n = body.size();
  const double c = std::cos(body.grid().spacing());
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hm = body.h((i + n - 1) % n);
    const double hp = body.h((i + 1) % n);
    r[i] = (hm + hp - 2.0 * c * body.h(i)) / (2.0 * (1.0 - c));
  }
  return r;
}

ConvexBody make_disk(const GridPtr& grid, double radius, const Vec3& center) {
  std::vector<double> h(grid->size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = radius + dot(center, grid->node(i));
  return ConvexBody(grid, std::move(h));
}

ConvexBody make_ball(const GridPtr& grid, double radius, const Vec3& center) {
  return make_disk(grid, radius, center);
}

ConvexBody make_ellipse(const GridPtr& grid, double a, double b) {
  if (grid->dim() != 2) throw Error(ErrorCode::InvalidConfig, "ellipse fixture is planar");
  std::vector<double> h(grid->size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Vec3& x = grid->node(i);
    h[i] = std::sqrt(a * a * x[0] * x[0] + b * b * x[1] * x[1]);
  }
  return ConvexBody(grid, std::move(h));
}

}  // namespace chordflow

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "chordflow/sphere_grid.hpp"

namespace chordflow {

using GridPtr = std::shared_ptr<const SphereGrid>;

inline GridPtr make_grid(int dim, int resolution) {
  return std::make_shared<const SphereGrid>(SphereGrid::make(dim, resolution));
}

constexpr double kDefaultConvexEps = 1e-8;

// A convex body sampled by its support function on a sphere grid.
//
// The object is an immutable snapshot: derived fields (gradient, curvature matrix,
// boundary points) are computed once at construction. Constructing a body only
// requires h > 0; strict convexity is checked on demand so that candidate support
// functions (e.g. before Wulff projection) can be represented too.
class ConvexBody {
 public:
  ConvexBody(GridPtr grid, std::vector<double> h, double convex_eps = kDefaultConvexEps);

  const SphereGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int dim() const { return grid_->dim(); }
  std::size_t size() const { return h_.size(); }
  double convex_eps() const { return convex_eps_; }

  std::span<const double> h() const { return h_; }
  double h(std::size_t i) const { return h_[i]; }
  std::span<const TangentVec> gradient() const { return grad_; }
  // b = Hess h + h I in the node frame.
  std::span<const SymMat2> curvature_matrix() const { return b_; }
  // det b: product of the principal radii of curvature.
  std::span<const double> radii_product() const { return det_b_; }
  double radii_product(std::size_t i) const { return det_b_[i]; }
  std::span<const Vec3> boundary_points() const { return points_; }
  // Smallest eigenvalue of b over all nodes.
  double min_radius() const { return min_eig_; }
  double max_radius() const { return max_eig_; }

  bool strictly_convex() const { return min_eig_ >= convex_eps_; }
  // Throws ConvexityLoss unless strictly_convex().
  void require_strictly_convex() const;

  // Largest tangential gradient norm.
  double max_gradient_norm() const;

  ConvexBody with_support(std::vector<double> h) const {
    return ConvexBody(grid_, std::move(h), convex_eps_);
  }

 private:
  GridPtr grid_;
  std::vector<double> h_;
  double convex_eps_;
  std::vector<TangentVec> grad_;
  std::vector<SymMat2> b_;
  std::vector<double> det_b_;
  std::vector<Vec3> points_;
  double min_eig_ = 0.0;
  double max_eig_ = 0.0;
};

struct RadialFunction {
  GridPtr directions;
  std::vector<double> rho;
};

// Eigenvalues (ascending) of a curvature matrix for the given dimension.
std::array<double, 2> principal_radii(const SymMat2& b, int dim);

// X(x_i) = grad h + h x_i; its outward normal is x_i.
Vec3 boundary_point(const ConvexBody& body, std::size_t i);

// 1 / det b at node i; ConvexityLoss when det b <= convex_eps.
double gauss_curvature(const ConvexBody& body, std::size_t i);

// Radial function of the Wulff shape [h] about the origin in direction u:
// min over nodes with x.u > 0 of h(x) / (x.u).
double radial_from_support(const ConvexBody& body, const Vec3& u);

// Samples radial_from_support on every node of `directions`.
RadialFunction radial_function(const ConvexBody& body, const GridPtr& directions);

// h(x) = max_u rho(u) (u.x), sampled on the nodes of `grid`.
std::vector<double> support_from_radial(const RadialFunction& radial, const SphereGrid& grid);

// Support function of the Wulff shape of the samples. For n = 2 this is the exact
// support function of the polygon cut out by the half-planes {z.x_i <= h_i} and is
// therefore idempotent; for n = 3 it is the min of h with the radial round trip.
ConvexBody wulff_project(const ConvexBody& body);

// Vertices (counter-clockwise) of the polygon {z : z.x_i <= h_i} for n = 2.
std::vector<Vec3> wulff_polygon(const ConvexBody& body);

// (1/n) integral of h det b.
double volume(const ConvexBody& body);
// Integral of det b.
double surface_area(const ConvexBody& body);

// n = 2: radius of curvature of the half-plane polygon at each node,
// (h_{i-1} + h_{i+1} - 2 cos(d) h_i) / (2 (1 - cos d)). Zero exactly on
// redundant constraints.
std::vector<double> discrete_radii(const ConvexBody& body);

// Frequently used fixtures.
ConvexBody make_disk(const GridPtr& grid, double radius, const Vec3& center = {0.0, 0.0, 0.0});
ConvexBody make_ellipse(const GridPtr& grid, double a, double b);
ConvexBody make_ball(const GridPtr& grid, double radius, const Vec3& center = {0.0, 0.0, 0.0});

}  // namespace chordflow

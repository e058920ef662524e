#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace chordflow {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Components of a tangent vector in the node's orthonormal frame (e1, e2).
// For dim == 2 only c[0] is used.
using TangentVec = std::array<double, 2>;

// Symmetric 2x2 matrix in the node's orthonormal frame; for dim == 2 only xx is used.
struct SymMat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

// Quadrature nodes, weights and spectral derivative operators on S^{n-1}, n = 2 or 3.
//
// n = 2: N equispaced angles, equal weights, Fourier differentiation matrices.
// n = 3: "double Fourier sphere" grid. m colatitude bands at (j + 1/2) pi / m, 2m
// longitudes, Fejer weights in cos(colatitude). No node sits on a pole; colatitude
// derivatives run over the great circle through both poles, so the pole needs no
// special stencil.
class SphereGrid {
 public:
  static SphereGrid make(int dim, int resolution);

  int dim() const { return dim_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return nodes_.size(); }

  std::span<const Vec3> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  const Vec3& node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  // k-th orthonormal tangent vector at node i (k < dim - 1).
  const Vec3& frame(std::size_t i, int k) const { return frames_[k][i]; }

  // |S^{n-1}|: 2 pi or 4 pi.
  double measure() const;
  // Volume of the unit ball in R^n: pi or 4 pi / 3.
  double unit_ball_volume() const;

  // Sum of w_i * samples_i in node order with compensated summation.
  double integrate(std::span<const double> samples) const;

  std::vector<TangentVec> gradient(std::span<const double> field) const;
  std::vector<SymMat2> hessian(std::span<const double> field) const;

  // Angle spacing between consecutive nodes (n = 2 only).
  double spacing() const { return spacing_; }
  // Upper bound on the spectral radius of the discrete Laplace-Beltrami part of the Hessian.
  double stiffness() const { return stiffness_; }

  // Latitude-longitude shape (n = 3): node index = band * longitudes + lon.
  int bands() const { return bands_; }
  int longitudes() const { return longitudes_; }

  // Tangent vector components -> embedded R^3 vector.
  Vec3 embed(std::size_t i, const TangentVec& t) const;

 private:
  SphereGrid() = default;
  void build_circle(int n);
  void build_sphere(int m);

  void check_size(std::span<const double> field) const;
  // 1-D periodic derivative along colatitude through the poles.
  void colatitude_derivatives(std::span<const double> field, std::vector<double>& d1,
                              std::vector<double>& d2) const;

  int dim_ = 2;
  int resolution_ = 0;
  std::vector<Vec3> nodes_;
  std::vector<double> weights_;
  std::array<std::vector<Vec3>, 2> frames_;
  double spacing_ = 0.0;
  double stiffness_ = 0.0;
  int bands_ = 0;
  int longitudes_ = 0;

  // Dense periodic spectral differentiation matrices (row-major).
  std::vector<double> d1_, d2_;          // n = 2: N x N; n = 3: longitude L x L
  std::vector<double> d1_lat_, d2_lat_;  // n = 3: 2m x 2m along the meridian circle
};

// Periodic Fourier differentiation matrices on n equispaced points (n even).
void periodic_spectral_matrices(int n, std::vector<double>& d1, std::vector<double>& d2);

}  // namespace chordflow

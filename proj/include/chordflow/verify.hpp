#pragma once

#include <string>
#include <vector>

#include "chordflow/convex_body.hpp"
#include "chordflow/orlicz.hpp"

namespace chordflow {

struct ResidualReport {
  std::vector<double> samples;  // c phi(h) V~_{q-1}(X) det b - f
  double sup = 0.0;
  double l2 = 0.0;              // grid-quadrature L2 norm
  double c = 0.0;
};

ResidualReport ma_residual(const ConvexBody& body, const std::vector<double>& f,
                           const OrliczPhi& phi, double q, double c);

// c minimizing the L2 residual: integral f g / integral g^2, g = phi(h) V~_{q-1} det b.
double optimal_c(const ConvexBody& body, const std::vector<double>& f, const OrliczPhi& phi,
                 double q);

// integral over S^{n-1} of max(0, -cos(angle to a fixed pole))^{q-1}.
double hemisphere_integral(int n, double q);

struct BallOracle {
  double radius = 0.0;
  double q = 0.0;
  int n = 2;
  double h = 0.0;
  double gauss_curvature = 0.0;
  double boundary_vq = 0.0;  // V~_{q-1} about a boundary point
  double volume = 0.0;
  double surface = 0.0;
  double chord_integral = 0.0;  // I_q, n = 2 only (NaN otherwise)
};

BallOracle ball_oracle(double radius, double q, int n);

// theta for a centred ball with f == 1: V~_{q-1} R^{n-1} phi(R).
double ball_theta(const BallOracle& ball, const OrliczPhi& phi);

struct CheckRow {
  std::string identity;
  std::string pipeline;
  double value = 0.0;
  double reference = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// I_1 = V, I_0 = omega_{n-1} S / (n omega_n), I_{n+1} = (n+1) V^2 / omega_n, plus
// agreement of the pipelines at q.
// n = 2: polar and line pipelines (pairs replaces polar at q = 0, where the polar
// form degenerates); n = 3: polar pipeline only, I_0 skipped.
std::vector<CheckRow> cross_check(const ConvexBody& body, double q, double tolerance = 1e-2);

}  // namespace chordflow

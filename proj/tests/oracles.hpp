#pragma once

// Reference values computed independently of the library.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

constexpr double kPi = std::numbers::pi;

// Composite Gauss-Legendre (5 points per panel) on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels = 400) {
  static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                              0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                              0.2369268850561891, 0.2369268850561891};
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int k = 0; k < 5; ++k) sum += w[k] * f(mid + 0.5 * h * x[k]);
  }
  return 0.5 * h * sum;
}

// I_q of a disk: integral over offsets of (2 sqrt(R^2 - s^2))^q, by quadrature in s = R sin t.
inline double disk_chord_integral(double R, double q) {
  return integrate([&](double t) { return std::pow(2.0 * R * std::cos(t), q) * R * std::cos(t); },
                   -0.5 * kPi, 0.5 * kPi);
}

// Radial distance from a boundary point P of the ellipse x^2/a^2 + y^2/b^2 = 1 along angle t.
inline double ellipse_radial_from_boundary(double a, double b, double px, double py, double t) {
  const double ux = std::cos(t), uy = std::sin(t);
  const double A = ux * ux / (a * a) + uy * uy / (b * b);
  const double B = px * ux / (a * a) + py * uy / (b * b);
  return std::max(0.0, -2.0 * B / A);
}

// (1/2) integral of rho^q about the boundary point of the ellipse with outer normal angle nu.
inline double ellipse_boundary_vq(double a, double b, double nu, double q) {
  const double hx = a * a * std::cos(nu), hy = b * b * std::sin(nu);
  const double h = std::sqrt(a * a * std::cos(nu) * std::cos(nu) + b * b * std::sin(nu) * std::sin(nu));
  const double px = hx / h, py = hy / h;
  // the chord directions form the half circle opposite the outer normal
  return 0.5 * integrate([&](double t) { return std::pow(ellipse_radial_from_boundary(a, b, px, py, t), q); },
                         nu + 0.5 * kPi, nu + 1.5 * kPi, 2000);
}

// Ellipse perimeter by quadrature of the arclength element.
inline double ellipse_perimeter(double a, double b) {
  return integrate([&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); }, 0.0, 2.0 * kPi);
}

}  // namespace oracle

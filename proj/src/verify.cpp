#include "chordflow/verify.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "chordflow/chord_measures.hpp"
#include "chordflow/errors.hpp"
#include "chordflow/quadrature.hpp"

namespace chordflow {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> ma_factor(const ConvexBody& body, const OrliczPhi& phi, double q) {
  body.require_strictly_convex();
  const std::vector<double> vq = boundary_dual_quermass(body, q - 1.0);
  std::vector<double> g(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) g[i] = phi(body.h(i)) * vq[i] * body.radii_product(i);
  return g;
}

double unit_ball_volume(int n) { return n == 2 ? kPi : 4.0 * kPi / 3.0; }

CheckRow make_row(std::string identity, std::string pipeline, double value, double reference,
                  double tolerance) {
  CheckRow row{std::move(identity), std::move(pipeline), value, reference, 0.0, tolerance, false};
  row.rel_error = std::abs(value - reference) / std::abs(reference);
  row.pass = row.rel_error <= tolerance;
  return row;
}

}  // namespace

ResidualReport ma_residual(const ConvexBody& body, const std::vector<double>& f,
                           const OrliczPhi& phi, double q, double c) {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidConfig, "residual needs c > 0");
  if (f.size() != body.size()) throw Error(ErrorCode::ShapeMismatch, "f does not match the grid");
  const std::vector<double> g = ma_factor(body, phi, q);
  ResidualReport report;
  report.c = c;
  report.samples.resize(g.size());
  std::vector<double> squares(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    report.samples[i] = c * g[i] - f[i];
    report.sup = std::max(report.sup, std::abs(report.samples[i]));
    squares[i] = report.samples[i] * report.samples[i];
  }
  report.l2 = std::sqrt(body.grid().integrate(squares));
  return report;
}

double optimal_c(const ConvexBody& body, const std::vector<double>& f, const OrliczPhi& phi,
                 double q) {
  if (f.size() != body.size()) throw Error(ErrorCode::ShapeMismatch, "f does not match the grid");
  const std::vector<double> g = ma_factor(body, phi, q);
  std::vector<double> fg(g.size()), gg(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    fg[i] = f[i] * g[i];
    gg[i] = g[i] * g[i];
  }
  return body.grid().integrate(fg) / body.grid().integrate(gg);
}

double hemisphere_integral(int n, double q) {
  if (n != 2 && n != 3) throw Error(ErrorCode::InvalidConfig, "dimension must be 2 or 3");
  if (!(q > 0.0)) throw Error(ErrorCode::InvalidExponent, "hemisphere integral needs q > 0");
  static std::mutex mutex;
  static std::map<std::pair<int, double>, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(n, q);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  // Angle a from the inward normal, c = cos a = u^{1/q}, u = 1 - v^2:
  // n = 2: 2 int_0^1 c^{q-1} / sqrt(1 - c^2) dc = (4/q) int_0^1 v / sqrt(1 - (1-v^2)^{2/q}) dv
  // n = 3: 2 pi int_0^1 c^{q-1} dc = 2 pi / q
  double sum = 2.0 * kPi / q;
  if (n == 2) {
    const GaussRule rule = gauss_legendre(256, 0.0, 1.0);
    sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double v = rule.nodes[k];
      sum += rule.weights[k] * v / std::sqrt(-std::expm1(std::log1p(-v * v) * 2.0 / q));
    }
    sum *= 4.0 / q;
  }
  cache.emplace(key, sum);
  return sum;
}

BallOracle ball_oracle(double radius, double q, int n) {
  if (!(radius > 0.0)) throw Error(ErrorCode::NotPositive, "ball radius must be positive");
  BallOracle b;
  b.radius = radius;
  b.q = q;
  b.n = n;
  b.h = radius;
  b.gauss_curvature = std::pow(radius, -(n - 1));
  b.boundary_vq = std::pow(2.0 * radius, q - 1.0) * hemisphere_integral(n, q) / n;
  const double omega = unit_ball_volume(n);
  b.volume = omega * std::pow(radius, n);
  b.surface = n * omega * std::pow(radius, n - 1);
  if (n == 2) {
    // integral over s in (-R, R) of (2 sqrt(R^2 - s^2))^q
    b.chord_integral = std::pow(2.0, q) * std::pow(radius, q + 1.0) * std::sqrt(kPi) *
                       std::tgamma(0.5 * q + 1.0) / std::tgamma(0.5 * q + 1.5);
  } else {
    b.chord_integral = std::numeric_limits<double>::quiet_NaN();
  }
  return b;
}

double ball_theta(const BallOracle& ball, const OrliczPhi& phi) {
  return ball.boundary_vq * std::pow(ball.radius, ball.n - 1) * phi(ball.radius);
}

std::vector<CheckRow> cross_check(const ConvexBody& body, double q, double tolerance) {
  const int n = body.dim();
  const double omega = unit_ball_volume(n);
  const double V = volume(body);
  const double S = surface_area(body);
  std::vector<CheckRow> rows;
  if (n == 2) {
    const double omega1 = 2.0;
    rows.push_back(make_row("I_1=V", "polar", chord_integral(body, 1.0), V, tolerance));
    rows.push_back(make_row("I_1=V", "lines", chord_integral_lines(body, 1.0), V, tolerance));
    const double i0 = omega1 * S / (n * omega);
    rows.push_back(make_row("I_0=S", "pairs", chord_integral_pairs(body, 0.0), i0, tolerance));
    rows.push_back(make_row("I_0=S", "lines", chord_integral_lines(body, 0.0), i0, tolerance));
    const double i3 = (n + 1) * V * V / omega;
    rows.push_back(make_row("I_3=V^2", "polar", chord_integral(body, 3.0), i3, tolerance));
    rows.push_back(make_row("I_3=V^2", "lines", chord_integral_lines(body, 3.0), i3, tolerance));
    if (q > 0.0) {
      const double lines = chord_integral_lines(body, q);
      rows.push_back(make_row("I_q polar=lines", "polar", chord_integral(body, q), lines, tolerance));
    }
  } else {
    rows.push_back(make_row("I_1=V", "polar", chord_integral(body, 1.0), V, tolerance));
    const double i4 = (n + 1) * V * V / omega;
    rows.push_back(make_row("I_4=V^2", "polar", chord_integral(body, 4.0), i4, tolerance));
  }
  return rows;
}

}  // namespace chordflow

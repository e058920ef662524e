#include "chordflow/quadrature.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "chordflow/errors.hpp"

namespace chordflow {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidConfig, "Gauss-Legendre order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

GaussRule gauss_legendre(int n, double a, double b) {
  GaussRule rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

SingularWeights::SingularWeights(double b) : beta(b) {
  // zeta at negative arguments is costly and the flow asks for the same beta every step.
  thread_local std::map<double, std::array<double, 3>> cache;
  auto it = cache.find(b);
  if (it == cache.end()) {
    it = cache.emplace(b, std::array<double, 3>{std::riemann_zeta(-b), std::riemann_zeta(-b - 2.0),
                                                std::riemann_zeta(-b - 4.0)}).first;
  }
  zeta0 = it->second[0];
  zeta2 = it->second[1];
  zeta4 = it->second[2];
}

double singular_periodic_trapezoid(std::span<const double> samples, std::size_t center,
                                   double step, const SingularWeights& sw, double g0) {
  const double beta = sw.beta;
  const std::size_t n = samples.size();
  // Hot loop of the flow; four partial sums keep it vectorizable.
  double part[4] = {0.0, 0.0, 0.0, 0.0};
  auto accumulate = [&](std::size_t begin, std::size_t end) {
    std::size_t j = begin;
    for (; j + 4 <= end; j += 4) {
      for (int k = 0; k < 4; ++k) part[k] += samples[j + k];
    }
    for (; j < end; ++j) part[0] += samples[j];
  };
  accumulate(0, center);
  accumulate(center + 1, n);
  double integral = step * ((part[0] + part[1]) + (part[2] + part[3]));

  // Even part of the smooth factor at 1, 2, 3 steps: G_e(k d) - G0 = a (kd)^2 + c (kd)^4 + e (kd)^6.
  double ge[3] = {0.0, 0.0, 0.0};
  const int depth = n >= 8 ? 3 : 0;
  for (int k = 1; k <= depth; ++k) {
    const double s = k * step;
    const double scale = std::pow(s, beta);
    const double plus = samples[(center + k) % n] / scale;
    const double minus = samples[(center + n - k) % n] / scale;
    ge[k - 1] = 0.5 * (plus + minus) - g0;
  }
  double a = 0.0;
  double c = 0.0;
  if (depth == 3) {
    // Fit G_e(k d) - G0 = A k^2 + C k^4 + E k^6 for k = 1, 2, 3.
    double m[3][4] = {{1.0, 1.0, 1.0, ge[0]}, {4.0, 16.0, 64.0, ge[1]}, {9.0, 81.0, 729.0, ge[2]}};
    for (int col = 0; col < 3; ++col) {
      for (int row = col + 1; row < 3; ++row) {
        const double factor = m[row][col] / m[col][col];
        for (int k = col; k < 4; ++k) m[row][k] -= factor * m[col][k];
      }
    }
    double sol[3];
    for (int row = 2; row >= 0; --row) {
      double acc = m[row][3];
      for (int k = row + 1; k < 3; ++k) acc -= m[row][k] * sol[k];
      sol[row] = acc / m[row][row];
    }
    a = sol[0] / (step * step);
    c = sol[1] / (step * step * step * step);
  }
  const double h1 = std::pow(step, beta + 1.0);
  const double correction =
      sw.zeta0 * g0 + sw.zeta2 * a * step * step + sw.zeta4 * c * step * step * step * step;
  integral -= 2.0 * h1 * correction;
  return integral;
}

}  // namespace chordflow

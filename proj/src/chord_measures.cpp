#include "chordflow/chord_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "chordflow/errors.hpp"
#include "chordflow/quadrature.hpp"

namespace chordflow {

namespace {

constexpr double kPi = std::numbers::pi;

// x2^e for squared distances; exact-integer and half-integer exponents avoid std::pow.
class SquaredPower {
 public:
  explicit SquaredPower(double e) : e_(e) {
    const double twice = 2.0 * e;
    if (std::abs(twice - std::round(twice)) < 1e-14 && std::abs(twice) < 64.0) {
      generic_ = false;
      whole_ = static_cast<int>(std::floor(e));
      half_ = std::abs(e - whole_ - 0.5) < 1e-12;
    }
  }

  double operator()(double x2) const {
    if (generic_) return std::pow(x2, e_);
    double r = 1.0;
    const double base = whole_ < 0 ? 1.0 / x2 : x2;
    for (int k = 0; k < std::abs(whole_); ++k) r *= base;
    if (half_) r *= std::sqrt(x2);
    return r;
  }

  // In place over a buffer; the common exponents get branch-free loops.
  void apply(std::vector<double>& x2) const {
    const std::size_t n = x2.size();
    double* x = x2.data();
    if (!generic_ && half_ && whole_ == -1) {
      for (std::size_t j = 0; j < n; ++j) x[j] = 1.0 / std::sqrt(x[j]);
    } else if (!generic_ && half_ && whole_ == -2) {
      for (std::size_t j = 0; j < n; ++j) x[j] = 1.0 / (x[j] * std::sqrt(x[j]));
    } else if (!generic_ && half_ && whole_ == 0) {
      for (std::size_t j = 0; j < n; ++j) x[j] = std::sqrt(x[j]);
    } else if (!generic_ && !half_ && whole_ == -1) {
      for (std::size_t j = 0; j < n; ++j) x[j] = 1.0 / x[j];
    } else if (!generic_ && !half_ && whole_ == 0) {
      for (std::size_t j = 0; j < n; ++j) x[j] = 1.0;
    } else {
      for (std::size_t j = 0; j < n; ++j) x[j] = (*this)(x[j]);
    }
  }

 private:
  double e_;
  bool generic_ = true;
  int whole_ = 0;
  bool half_ = false;
};

double max_outside(const ConvexBody& body, const Vec3& z) {
  const auto nodes = body.grid().nodes();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < nodes.size(); ++j) worst = std::max(worst, dot(z, nodes[j]) - body.h(j));
  return worst;
}

double radial_min(const ConvexBody& body, const Vec3& z, const Vec3& u) {
  const auto nodes = body.grid().nodes();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double c = dot(nodes[j], u);
    if (c > 0.0) best = std::min(best, (body.h(j) - dot(z, nodes[j])) / c);
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorCode::DegenerateGrid, "no grid node in the open half-sphere of u");
  }
  return std::max(best, 0.0);
}

double power_or_zero(double rho, double q) {
  if (rho <= 0.0) return 0.0;
  return q == 0.0 ? 1.0 : std::pow(rho, q);
}

// Planar V~_q about an interior point: trapezoid over the boundary curve.
double planar_interior_vq(const ConvexBody& body, const Vec3& z, const SquaredPower& lpow) {
  const auto nodes = body.grid().nodes();
  const auto pts = body.boundary_points();
  const auto detb = body.radii_product();
  CompensatedSum sum;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double dx = pts[j][0] - z[0];
    const double dy = pts[j][1] - z[1];
    const double num = body.h(j) - z[0] * nodes[j][0] - z[1] * nodes[j][1];
    sum.add(lpow(dx * dx + dy * dy) * num * detb[j]);
  }
  return 0.5 * body.grid().spacing() * sum.value();
}

// Planar V~_q about the boundary point X(x_i).
double planar_boundary_vq(const ConvexBody& body, std::size_t i, double q, const SquaredPower& lpow,
                          const SingularWeights& sw, std::vector<double>& buffer) {
  const auto nodes = body.grid().nodes();
  const auto pts = body.boundary_points();
  const auto detb = body.radii_product();
  const std::size_t n = nodes.size();
  buffer.resize(n);
  const double px = pts[i][0];
  const double py = pts[i][1];
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = pts[j][0] - px;
    const double dy = pts[j][1] - py;
    buffer[j] = dx * dx + dy * dy;
  }
  buffer[i] = 1.0;
  lpow.apply(buffer);
  for (std::size_t j = 0; j < n; ++j) {
    const double num = std::max(0.0, body.h(j) - px * nodes[j][0] - py * nodes[j][1]);
    buffer[j] *= 0.5 * num * detb[j];
  }
  buffer[i] = 0.0;
  const double g0 = 0.25 * std::pow(detb[i], q);
  return singular_periodic_trapezoid(buffer, i, body.grid().spacing(), sw, g0);
}

// V~_q about X(x_i) on the direction grid (the body grid).
double directional_boundary_vq(const ConvexBody& body, std::size_t i, double q) {
  const SphereGrid& grid = body.grid();
  const auto nodes = grid.nodes();
  const Vec3& z = body.boundary_points()[i];
  const Vec3& normal = nodes[i];
  CompensatedSum sum;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Vec3& u = nodes[k];
    if (dot(u, normal) >= 0.0) continue;
    sum.add(grid.weight(k) * power_or_zero(radial_min(body, z, u), q));
  }
  return sum.value() / grid.dim();
}

void require_positive_q(double q, const char* what) {
  if (!(q > 0.0)) {
    throw Error(ErrorCode::InvalidExponent, std::string(what) + " needs q > 0");
  }
}

}  // namespace

double radial_about(const ConvexBody& body, const Vec3& z, const Vec3& u) {
  if (max_outside(body, z) > 1e-9) {
    throw Error(ErrorCode::PointOutsideBody, "basepoint lies outside the body");
  }
  return radial_min(body, z, u);
}

double dual_quermass_directions(const ConvexBody& body, const Vec3& z, double q,
                                const SphereGrid& directions) {
  if (max_outside(body, z) > 1e-9) {
    throw Error(ErrorCode::PointOutsideBody, "basepoint lies outside the body");
  }
  CompensatedSum sum;
  for (std::size_t k = 0; k < directions.size(); ++k) {
    const double rho = radial_min(body, z, directions.node(k));
    const double v = power_or_zero(rho, q);
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidExponent, "nonfinite radial power");
    sum.add(directions.weight(k) * v);
  }
  return sum.value() / directions.dim();
}

double dual_quermass(const ConvexBody& body, const Vec3& z, double q) {
  const double outside = max_outside(body, z);
  if (outside > 1e-9) throw Error(ErrorCode::PointOutsideBody, "basepoint lies outside the body");
  double scale = 0.0;
  for (double v : body.h()) scale = std::max(scale, v);
  const bool on_boundary = outside > -1e-9 * scale;
  if (on_boundary && q <= -1.0) {
    throw Error(ErrorCode::InvalidExponent, "radial power not integrable at a boundary basepoint");
  }
  if (body.dim() != 2) return dual_quermass_directions(body, z, q, body.grid());
  const SquaredPower lpow(0.5 * (q - 2.0));
  if (!on_boundary) return planar_interior_vq(body, z, lpow);

  const auto pts = body.boundary_points();
  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = pts[i][0] - z[0];
    const double dy = pts[i][1] - z[1];
    const double d = dx * dx + dy * dy;
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  if (std::sqrt(best) <= 1e-8 * scale) {
    std::vector<double> buffer;
    return planar_boundary_vq(body, nearest, q, lpow, SingularWeights(q), buffer);
  }
  return dual_quermass_directions(body, z, q, body.grid());
}

std::vector<double> boundary_dual_quermass(const ConvexBody& body, double q) {
  if (q <= -1.0) {
    throw Error(ErrorCode::InvalidExponent, "radial power not integrable at a boundary basepoint");
  }
  std::vector<double> out(body.size());
  if (body.dim() == 2) {
    const SquaredPower lpow(0.5 * (q - 2.0));
    const SingularWeights sw(q);
    std::vector<double> buffer;
    for (std::size_t i = 0; i < body.size(); ++i) {
      out[i] = planar_boundary_vq(body, i, q, lpow, sw, buffer);
    }
  } else {
    for (std::size_t i = 0; i < body.size(); ++i) out[i] = directional_boundary_vq(body, i, q);
  }
  return out;
}

ChordIntegralResult chord_integral_polar(const ConvexBody& body, double q,
                                         const ChordIntegralOptions& options) {
  require_positive_q(q, "chord integral");
  const GridPtr dirs = options.directions ? options.directions : body.grid_ptr();
  const GridPtr inner = options.inner_directions ? options.inner_directions : body.grid_ptr();
  const int n = body.dim();
  std::vector<double> rho(dirs->size());
  for (std::size_t k = 0; k < dirs->size(); ++k) rho[k] = radial_from_support(body, dirs->node(k));
  const SquaredPower lpow(0.5 * (q - 3.0));
  // V~_0 about any interior point is omega_n.
  const double omega = body.grid().unit_ball_volume();

  auto evaluate = [&](int points) {
    const GaussRule rule = gauss_legendre(points, 0.0, 1.0);
    std::vector<double> per_direction(dirs->size());
    for (std::size_t k = 0; k < dirs->size(); ++k) {
      const Vec3& xi = dirs->node(k);
      CompensatedSum radial;
      for (int r = 0; r < points; ++r) {
        const double t = rule.nodes[r] * rho[k];
        const Vec3 z = {t * xi[0], t * xi[1], t * xi[2]};
        double vq = omega;
        if (q != 1.0) {
          vq = n == 2 ? planar_interior_vq(body, z, lpow)
                      : dual_quermass_directions(body, z, q - 1.0, *inner);
        }
        radial.add(rule.weights[r] * rho[k] * vq * std::pow(t, n - 1));
      }
      per_direction[k] = radial.value();
    }
    return q / body.grid().unit_ball_volume() * dirs->integrate(per_direction);
  };

  int points = options.radial_points;
  double value = evaluate(points);
  if (options.adaptive) {
    while (points < options.max_radial_points) {
      const double refined = evaluate(2 * points);
      points *= 2;
      const bool settled = std::abs(refined - value) <= 1e-3 * std::abs(refined);
      value = refined;
      if (settled) break;
    }
  }
  return {value, points};
}

double chord_integral(const ConvexBody& body, double q) { return chord_integral_polar(body, q).value; }

double chord_integral_lines(const ConvexBody& body, double q, const LineSamplerOptions& options) {
  if (body.dim() != 2) {
    throw Error(ErrorCode::InvalidConfig, "line-space chord integral is implemented for n = 2");
  }
  if (q < 0.0) throw Error(ErrorCode::InvalidExponent, "chord integral needs q >= 0");
  const std::vector<Vec3> poly = wulff_polygon(body);

  struct Width {
    double lo, hi;
  };
  auto width = [&](double nx, double ny) {
    Width w{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& v : poly) {
      const double s = v[0] * nx + v[1] * ny;
      w.lo = std::min(w.lo, s);
      w.hi = std::max(w.hi, s);
    }
    return w;
  };
  // Length of the chord cut by {y : y.n = s}.
  auto chord = [&](double nx, double ny, double s) {
    double tmin = std::numeric_limits<double>::infinity();
    double tmax = -std::numeric_limits<double>::infinity();
    const std::size_t m = poly.size();
    for (std::size_t a = 0; a < m; ++a) {
      const Vec3& p = poly[a];
      const Vec3& r = poly[(a + 1) % m];
      const double fp = p[0] * nx + p[1] * ny - s;
      const double fr = r[0] * nx + r[1] * ny - s;
      if ((fp <= 0.0 && fr > 0.0) || (fp > 0.0 && fr <= 0.0)) {
        const double t = fp / (fp - fr);
        const double x = p[0] + t * (r[0] - p[0]);
        const double y = p[1] + t * (r[1] - p[1]);
        const double along = -x * ny + y * nx;
        tmin = std::min(tmin, along);
        tmax = std::max(tmax, along);
      }
    }
    return tmax > tmin ? tmax - tmin : 0.0;
  };
  auto chord_power = [q](double len) { return len <= 0.0 ? 0.0 : (q == 0.0 ? 1.0 : std::pow(len, q)); };

  if (options.monte_carlo) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CompensatedSum sum;
    for (int k = 0; k < options.samples; ++k) {
      const double alpha = kPi * unit(rng);
      const double nx = std::cos(alpha);
      const double ny = std::sin(alpha);
      const Width w = width(nx, ny);
      const double s = w.lo + unit(rng) * (w.hi - w.lo);
      sum.add((w.hi - w.lo) * chord_power(chord(nx, ny, s)));
    }
    return sum.value() / options.samples;
  }

  const int angles = options.angles > 0 ? options.angles
                                        : std::max(64, static_cast<int>(body.size()) / 2);
  const GaussRule rule = gauss_legendre(options.offsets, 0.0, kPi);
  CompensatedSum total;
  for (int k = 0; k < angles; ++k) {
    const double alpha = kPi * k / angles;
    const double nx = std::cos(alpha);
    const double ny = std::sin(alpha);
    const Width w = width(nx, ny);
    const double mid = 0.5 * (w.hi + w.lo);
    const double half = 0.5 * (w.hi - w.lo);
    CompensatedSum inner;
    for (int r = 0; r < options.offsets; ++r) {
      const double phi = rule.nodes[r];
      const double s = mid - half * std::cos(phi);
      inner.add(rule.weights[r] * half * std::sin(phi) * chord_power(chord(nx, ny, s)));
    }
    total.add(inner.value());
  }
  // (1/pi) * (pi / angles) * sum
  return total.value() / angles;
}

double chord_integral_pairs(const ConvexBody& body, double q) {
  if (body.dim() != 2) throw Error(ErrorCode::InvalidConfig, "pair chord integral is planar only");
  if (q < 0.0) throw Error(ErrorCode::InvalidExponent, "chord integral needs q >= 0");
  const auto nodes = body.grid().nodes();
  const auto pts = body.boundary_points();
  const auto detb = body.radii_product();
  const std::size_t n = nodes.size();
  const SquaredPower lpow(0.5 * (q - 3.0));
  const SingularWeights sw(q + 1.0);
  const double step = body.grid().spacing();
  std::vector<double> buffer(n);
  CompensatedSum outer;
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double px = pts[i][0];
    const double py = pts[i][1];
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = pts[j][0] - px;
      const double dy = pts[j][1] - py;
      buffer[j] = dx * dx + dy * dy;
      weight[j] = std::abs(dx * nodes[i][0] + dy * nodes[i][1]) *
                  std::abs(dx * nodes[j][0] + dy * nodes[j][1]) * detb[j];
    }
    buffer[i] = 1.0;
    lpow.apply(buffer);
    for (std::size_t j = 0; j < n; ++j) buffer[j] *= weight[j];
    buffer[i] = 0.0;
    const double g0 = 0.25 * std::pow(detb[i], q);
    outer.add(detb[i] * singular_periodic_trapezoid(buffer, i, step, sw, g0));
  }
  return step * outer.value() / (2.0 * kPi);
}

MeasureDensity chord_measure_density(const ConvexBody& body, double q) {
  require_positive_q(q, "chord measure");
  body.require_strictly_convex();
  const std::vector<double> vq = boundary_dual_quermass(body, q - 1.0);
  const double factor = 2.0 * q / body.grid().unit_ball_volume();
  MeasureDensity out{body.grid_ptr(), std::vector<double>(body.size()), MeasureDensity::Kind::Chord};
  for (std::size_t i = 0; i < body.size(); ++i) {
    out.samples[i] = factor * vq[i] * body.radii_product(i);
  }
  return out;
}

MeasureDensity lp_chord_density(const ConvexBody& body, double p, double q) {
  MeasureDensity out = chord_measure_density(body, q);
  out.kind = MeasureDensity::Kind::LpChord;
  if (p == 1.0) return out;
  for (std::size_t i = 0; i < body.size(); ++i) out.samples[i] *= std::pow(body.h(i), 1.0 - p);
  return out;
}

double VariationalCheck::relative_gap() const {
  return std::abs(finite_difference - measure_integral) / std::abs(measure_integral);
}

VariationalCheck variational_check(const ConvexBody& body, double q, double ball_radius,
                                   double eps) {
  const ChordIntegralResult base = chord_integral_polar(body, q);
  std::vector<double> h(body.h().begin(), body.h().end());
  for (double& v : h) v += eps * ball_radius;
  ChordIntegralOptions frozen;
  frozen.radial_points = base.radial_points;
  frozen.adaptive = false;
  const ChordIntegralResult moved = chord_integral_polar(body.with_support(std::move(h)), q, frozen);
  VariationalCheck out;
  out.finite_difference = (moved.value - base.value) / eps;
  out.measure_integral = ball_radius * chord_measure_density(body, q).total_mass();
  return out;
}

}  // namespace chordflow

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chordflow/convex_body.hpp"

namespace chordflow {

struct MeasureDensity {
  enum class Kind { Chord, LpChord, OrliczChord };
  GridPtr grid;
  std::vector<double> samples;
  Kind kind = Kind::Chord;

  double total_mass() const { return grid->integrate(samples); }
};

// Distance from z to the boundary of [h] along u:
// min over nodes x with x.u > 0 of (h(x) - z.x) / (x.u), clamped at 0.
// PointOutsideBody if z.x > h(x) + 1e-9 for some node.
double radial_about(const ConvexBody& body, const Vec3& z, const Vec3& u);

// Dual quermassintegral (1/n) integral rho_{z}(u)^q du.
//
// For n = 2 the integral is taken over the boundary curve (u -> X(theta) change of
// variables), which is smooth for interior z; a boundary basepoint that coincides
// with a boundary node X(x_i) is handled by boundary_dual_quermass. Any other
// configuration falls back to dual_quermass_directions on the body grid.
// InvalidExponent for q < 0 at a boundary basepoint.
double dual_quermass(const ConvexBody& body, const Vec3& z, double q);

// Same integral over an explicit direction grid using radial_about, with the
// convention 0^0 = 0 (only directions with rho > 0 contribute).
double dual_quermass_directions(const ConvexBody& body, const Vec3& z, double q,
                                const SphereGrid& directions);

// Dual quermassintegral of order q about the boundary point X(x_i), for every node.
// n = 2: singularity-corrected boundary quadrature; n = 3: direction quadrature on
// the body grid with the supporting half-space excluded.
std::vector<double> boundary_dual_quermass(const ConvexBody& body, double q);

struct ChordIntegralOptions {
  int radial_points = 32;
  bool adaptive = true;           // double radial_points while successive results differ > 0.1 %
  int max_radial_points = 256;
  GridPtr directions;             // outer direction grid; body grid when null
  GridPtr inner_directions;       // n = 3 inner dual quermass grid; body grid when null
};

struct ChordIntegralResult {
  double value = 0.0;
  int radial_points = 0;
};

// I_q = (q / omega_n) integral over the body of V~_{q-1}(z) dz, in polar coordinates.
ChordIntegralResult chord_integral_polar(const ConvexBody& body, double q,
                                         const ChordIntegralOptions& options = {});
double chord_integral(const ConvexBody& body, double q);

struct LineSamplerOptions {
  int angles = 0;        // 0 -> max(64, N / 2)
  int offsets = 64;      // Gauss-Legendre nodes across the width
  bool monte_carlo = false;
  std::uint64_t seed = 0;
  int samples = 200000;  // Monte Carlo line count
};

// I_q as an integral over lines (alpha, s) with measure (1/pi) d(alpha) ds, chords cut
// from the half-plane polygon of the samples (n = 2 only).
double chord_integral_lines(const ConvexBody& body, double q,
                            const LineSamplerOptions& options = {});

// I_q over pairs of boundary points (n = 2 only):
// (1/2pi) sum over (x1, x2) of L^{q-3} |(X2-X1).x1| |(X2-X1).x2| det b(x1) det b(x2).
// Spectrally accurate for smooth bodies; used by the flow monitor.
double chord_integral_pairs(const ConvexBody& body, double q);

// g_q(x) = (2q / omega_n) V~_{q-1}(X(x)) det b(x).
MeasureDensity chord_measure_density(const ConvexBody& body, double q);

// h^{1-p} g_q.
MeasureDensity lp_chord_density(const ConvexBody& body, double p, double q);

struct VariationalCheck {
  double finite_difference = 0.0;
  double measure_integral = 0.0;
  double relative_gap() const;
};

// ([I_q(h + eps s) - I_q(h)] / eps, s integral g_q dx) using the polar pipeline with
// the radial rule frozen between both evaluations.
VariationalCheck variational_check(const ConvexBody& body, double q, double ball_radius,
                                   double eps);

}  // namespace chordflow

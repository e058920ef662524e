#include <cmath>

#include "chordflow/chord_measures.hpp"
#include "chordflow/errors.hpp"
#include "chordflow/verify.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chordflow;
using oracle::kPi;

TEST_SUITE("verify") {
  TEST_CASE("residual on the unit disk") {
    // g = phi(1) V~_1 det b = 2 at every node, so c = 1/2 solves and c = 1 misses by 1
    const GridPtr g = make_grid(2, 128);
    const ConvexBody d = make_disk(g, 1.0);
    const std::vector<double> f(g->size(), 1.0);
    const OrliczPhi phi = OrliczPhi::power(2.0);
    const ResidualReport half = ma_residual(d, f, phi, 2.0, 0.5);
    CHECK(half.sup <= 1e-6);
    CHECK(half.l2 <= 1e-6);
    const ResidualReport one = ma_residual(d, f, phi, 2.0, 1.0);
    CHECK(one.sup == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(one.l2 == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-10));
    CHECK(one.c == 1.0);
    CHECK(optimal_c(d, f, phi, 2.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK_THROWS_AS(ma_residual(d, f, phi, 2.0, 0.0), Error);
    CHECK_THROWS_AS(ma_residual(d, std::vector<double>(3, 1.0), phi, 2.0, 1.0), Error);
  }

  TEST_CASE("residual is affine in c and f") {
    const GridPtr g = make_grid(2, 128);
    const ConvexBody e = make_ellipse(g, 1.5, 1.0);
    std::vector<double> f(g->size()), f2(g->size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = 1.0 + 0.2 * g->node(i)[0];
      f2[i] = 2.0 * f[i];
    }
    const OrliczPhi phi = OrliczPhi::power(1.5);
    const auto r1 = ma_residual(e, f, phi, 2.5, 0.3).samples;
    const auto r2 = ma_residual(e, f, phi, 2.5, 0.6).samples;
    const auto r3 = ma_residual(e, f2, phi, 2.5, 0.6).samples;
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(r2[i] + f[i] == doctest::Approx(2.0 * (r1[i] + f[i])).epsilon(1e-12));
      CHECK(r3[i] == doctest::Approx(2.0 * r1[i]).epsilon(1e-12).scale(1e-12));
    }
  }

  TEST_CASE("optimal c minimizes the L2 residual") {
    const GridPtr g = make_grid(2, 128);
    const ConvexBody e = make_ellipse(g, 1.5, 1.0);
    const std::vector<double> f(g->size(), 1.0);
    const OrliczPhi phi = OrliczPhi::power(2.0);
    const double c = optimal_c(e, f, phi, 2.0);
    const double best = ma_residual(e, f, phi, 2.0, c).l2;
    for (double s : {0.99, 1.01}) CHECK(ma_residual(e, f, phi, 2.0, s * c).l2 > best);
  }

  TEST_CASE("hemisphere integrals") {
    // [DERIVED] n = 2: sqrt(pi) Gamma(q/2) / Gamma((q+1)/2); n = 3: 2 pi / q
    for (double q : {0.5, 1.0, 2.0, 3.5}) {
      CHECK(hemisphere_integral(2, q) ==
            doctest::Approx(std::sqrt(kPi) * std::tgamma(0.5 * q) / std::tgamma(0.5 * q + 0.5)).epsilon(1e-6));
      CHECK(hemisphere_integral(3, q) == doctest::Approx(2.0 * kPi / q).epsilon(1e-6));
    }
    CHECK_THROWS_AS(hemisphere_integral(4, 2.0), Error);
    CHECK_THROWS_AS(hemisphere_integral(2, 0.0), Error);
  }

  TEST_CASE("ball oracle against the discrete pipelines") {
    const GridPtr g = make_grid(2, 128);
    for (double R : {0.8, 1.0}) {
      const ConvexBody d = make_disk(g, R);
      for (double q : {1.5, 2.0, 3.0}) {
        const BallOracle b = ball_oracle(R, q, 2);
        CHECK(b.volume == doctest::Approx(kPi * R * R));
        CHECK(b.surface == doctest::Approx(2.0 * kPi * R));
        CHECK(b.gauss_curvature == doctest::Approx(1.0 / R));
        CHECK(b.chord_integral == doctest::Approx(oracle::disk_chord_integral(R, q)).epsilon(1e-12));
        CHECK(b.boundary_vq == doctest::Approx(boundary_dual_quermass(d, q - 1.0)[7]).epsilon(1e-8));
      }
    }
    const BallOracle b3 = ball_oracle(1.0, 2.0, 3);
    CHECK(std::isnan(b3.chord_integral));
    CHECK(b3.volume == doctest::Approx(4.0 * kPi / 3.0));
    CHECK(b3.surface == doctest::Approx(4.0 * kPi));
    // [DERIVED] V~_1 at the boundary of the unit ball = 2 * (2 pi / 2) / 3
    CHECK(b3.boundary_vq == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-6));
    CHECK_THROWS_AS(ball_oracle(0.0, 2.0, 2), Error);
  }

  TEST_CASE("cross check rows") {
    const GridPtr g = make_grid(2, 256);
    const auto rows = cross_check(make_ellipse(g, 1.5, 1.0), 2.0);
    CHECK(rows.size() == 7);
    for (const auto& r : rows) {
      INFO(r.identity, " ", r.pipeline, " ", r.rel_error);
      CHECK(r.pass);
      CHECK(r.tolerance == 1e-2);
    }
  }
}

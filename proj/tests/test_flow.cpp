#include <cmath>

#include "chordflow/chord_measures.hpp"
#include "chordflow/errors.hpp"
#include "chordflow/flow.hpp"
#include "chordflow/verify.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chordflow;
using oracle::kPi;

namespace {

FlowConfig basic_config(const SphereGrid& grid, double q = 2.0, double p = 2.0) {
  FlowConfig c;
  c.q = q;
  c.phi = OrliczPhi::power(p);
  c.f.assign(grid.size(), 1.0);
  return c;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::Io;
}

}  // namespace

TEST_SUITE("flow") {
  TEST_CASE("theta on centred disks") {
    // [DERIVED] theta = V~_{q-1}(boundary) R^{n-1} phi(R) = 2 R^{3-p} for q = 2
    const GridPtr g = make_grid(2, 128);
    for (double R : {0.5, 1.0, 1.7}) {
      for (double p : {1.5, 2.0, 3.0}) {
        const ConvexBody d = make_disk(g, R);
        const std::vector<double> f(g->size(), 1.0);
        const double th = theta(d, f, OrliczPhi::power(p), 2.0);
        CHECK(th == doctest::Approx(2.0 * std::pow(R, 3.0 - p)).epsilon(1e-10));
        CHECK(th == doctest::Approx(ball_theta(ball_oracle(R, 2.0, 2), OrliczPhi::power(p))).epsilon(1e-10));
        const std::vector<double> f2(g->size(), 2.0);
        CHECK(theta(d, f2, OrliczPhi::power(p), 2.0) == doctest::Approx(0.5 * th).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("theta numerator via the radial change of variables") {
    // rho^n K dxi = h dx: the direction-grid numerator must agree with the grid pullback
    const GridPtr g = make_grid(2, 256);
    const ConvexBody e = make_ellipse(g, 1.4, 1.0);
    const std::vector<double> f(g->size(), 1.0);
    for (double q : {2.0, 3.0}) {
      const double a = theta(e, f, OrliczPhi::power(2.0), q);
      const double b = theta_directions(e, f, OrliczPhi::power(2.0), q, *make_grid(2, 512));
      CHECK(b == doctest::Approx(a).epsilon(1e-2));
    }
  }

  TEST_CASE("disks are stationary") {
    const GridPtr g = make_grid(2, 128);
    for (double R : {0.6, 1.0, 1.3}) {
      const ConvexBody d = make_disk(g, R);
      const FlowConfig cfg = basic_config(*g);
      const FlowState s = make_state(d, cfg);
      for (double v : rhs(s, cfg)) CHECK(std::abs(v) < 1e-11 * R);
      const FlowState next = step(s, cfg);
      for (std::size_t i = 0; i < d.size(); ++i) CHECK(next.body.h(i) == doctest::Approx(R).epsilon(1e-10));
      CHECK(next.step_count == 1);
      CHECK(next.t == next.diagnostics.dt);
      CHECK(next.t <= cfg.dt0);
    }
  }

  TEST_CASE("Phi functional on disks") {
    // [DERIVED] integral of psi(R) = R^p / p over the circle
    const GridPtr g = make_grid(2, 64);
    const std::vector<double> f(g->size(), 1.0);
    CHECK(phi_functional(make_disk(g, 1.0), f, OrliczPhi::power(1.0)) == doctest::Approx(2.0 * kPi));
    for (double p : {1.5, 2.0, 3.0}) {
      CHECK(phi_functional(make_disk(g, 1.3), f, OrliczPhi::power(p)) ==
            doctest::Approx(2.0 * kPi * std::pow(1.3, p) / p).epsilon(1e-12));
    }
  }

  TEST_CASE("one step on an ellipse conserves I_q") {
    const GridPtr g = make_grid(2, 128);
    const ConvexBody e = make_ellipse(g, 1.2, 1.0);
    FlowConfig cfg = basic_config(*g);
    cfg.dt0 = 1e-4;
    const FlowState s0 = make_state(e, cfg);
    const FlowState s1 = step(s0, cfg);
    const double i0 = chord_integral_monitor(s0, 2.0);
    const double i1 = chord_integral_monitor(s1, 2.0);
    CHECK(std::abs(i1 - i0) / i0 < 1e-6);
    CHECK(phi_functional(s1.body, cfg.f, cfg.phi) <= phi_functional(s0.body, cfg.f, cfg.phi));
    CHECK(s1.diagnostics.dt == doctest::Approx(1e-4));
    CHECK(s1.dt == doctest::Approx(1.2e-4));
  }

  TEST_CASE("support evolution matches the radial log rate") {
    // d/dt log rho(xi) = (d/dt h)(x) / h(x) with x the normal at rho(xi) xi
    const GridPtr g = make_grid(2, 256);
    const ConvexBody e = make_ellipse(g, 1.3, 1.0);
    FlowConfig cfg = basic_config(*g);
    cfg.dt0 = 1e-6;
    cfg.dt_min = 1e-8;
    const FlowState s0 = make_state(e, cfg);
    const std::vector<double> r = rhs(s0, cfg);
    const FlowState s1 = step(s0, cfg);
    const double dt = s1.t;
    for (std::size_t i = 0; i < e.size(); i += 16) {
      Vec3 xi = e.boundary_points()[i];
      const double len = std::sqrt(dot(xi, xi));
      for (double& c : xi) c /= len;
      const double rate = std::log(radial_from_support(s1.body, xi) / radial_from_support(e, xi)) / dt;
      CHECK(rate == doctest::Approx(r[i] / e.h(i)).epsilon(2e-2).scale(1e-2));
    }
  }

  TEST_CASE("rejected steps halve dt") {
    const GridPtr g = make_grid(2, 64);
    const ConvexBody e = make_ellipse(g, 3.0, 1.0);
    FlowConfig cfg = basic_config(*g);
    cfg.cfl_safety = 1e6;
    cfg.dt0 = 0.5;
    cfg.dt_max = 0.5;
    const FlowState s1 = step(make_state(e, cfg), cfg);
    const double halvings = std::log2(0.5 / s1.diagnostics.dt);
    CHECK(halvings >= 1.0);
    CHECK(halvings == doctest::Approx(std::round(halvings)).epsilon(1e-12));

    cfg.dt_min = 0.4;
    CHECK(code_of([&] { step(make_state(e, cfg), cfg); }) == ErrorCode::DivergedBounds);
    cfg.dt0 = cfg.dt_max = 0.1;
    cfg.dt_min = 0.09;
    CHECK(code_of([&] { step(make_state(e, cfg), cfg); }) == ErrorCode::StepCollapse);
    cfg.project_on_reject = true;
    CHECK(code_of([&] { step(make_state(e, cfg), cfg); }) == ErrorCode::StepCollapse);
  }

  TEST_CASE("configuration validation") {
    const GridPtr g = make_grid(2, 32);
    const ConvexBody d = make_disk(g, 1.0);
    auto code = [&](auto mutate) {
      FlowConfig cfg = basic_config(*g);
      mutate(cfg);
      return code_of([&] { make_state(d, cfg); });
    };
    CHECK(code([](FlowConfig& c) { c.q = 1.0; }) == ErrorCode::InvalidConfig);
    CHECK(code([](FlowConfig& c) { c.f.pop_back(); }) == ErrorCode::ShapeMismatch);
    CHECK(code([](FlowConfig& c) { c.f[3] = 0.0; }) == ErrorCode::NotPositive);
    CHECK(code([](FlowConfig& c) { c.dt0 = 1.0; }) == ErrorCode::InvalidConfig);
    CHECK(code([](FlowConfig& c) { c.growth = 0.5; }) == ErrorCode::InvalidConfig);
    CHECK(code([](FlowConfig& c) { c.stride = 0; }) == ErrorCode::InvalidConfig);
    CHECK(code([](FlowConfig& c) { c.tol_res = 0.0; }) == ErrorCode::InvalidConfig);
    const GridPtr g3 = make_grid(3, 8);
    FlowConfig c3 = basic_config(*g3);
    CHECK(code_of([&] { make_state(make_ball(g3, 1.0), c3); }) == ErrorCode::InvalidConfig);
  }

  TEST_CASE("step budget exhaustion") {
    const GridPtr g = make_grid(2, 32);
    FlowConfig cfg = basic_config(*g);
    cfg.max_steps = 3;
    cfg.dt0 = 1e-5;
    const RunResult r = run(make_ellipse(g, 1.5, 1.0), cfg);
    CHECK(r.status == RunStatus::MaxStepsExceeded);
    CHECK(r.final_state.step_count == 3);
    CHECK(r.trajectory.size() == 4);
    CHECK(code_of([&] { r.throw_if_failed(); }) == ErrorCode::MaxStepsExceeded);
    CHECK(to_string(r.status) == "MaxStepsExceeded");
    CHECK_FALSE(r.warnings.empty());
  }

  TEST_CASE("a coarse run from an ellipse reaches the ball") {
    const GridPtr g = make_grid(2, 64);
    FlowConfig cfg = basic_config(*g);
    cfg.stride = 50;
    const ConvexBody e = make_ellipse(g, 1.2, 1.0);
    const RunResult r = run(e, cfg);
    REQUIRE(r.converged());
    CHECK(r.all_finite);
    CHECK(r.max_conservation_drift < 1e-6);
    CHECK(r.max_phi_increase <= 1e-12);
    // [DERIVED] I_2 of a disk is 16 R^3 / 3; c = 1 / theta = 1 / (2 R) for p = 2
    const double R = std::cbrt(3.0 * chord_integral_pairs(e, 2.0) / 16.0);
    for (std::size_t i = 0; i < g->size(); ++i) {
      CHECK(r.final_state.body.h(i) == doctest::Approx(R).epsilon(1e-4));
    }
    CHECK(r.c == doctest::Approx(0.5 / R).epsilon(1e-4));
    CHECK(r.trajectory.back().ma_residual_sup <= cfg.tol_res);
    CHECK(r.h.lo > 0.0);
    CHECK(r.kappa.lo > 0.0);
  }
}

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chordflow/convex_body.hpp"
#include "chordflow/orlicz.hpp"

namespace chordflow {

struct DiagnosticsRow {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double theta = 0.0;
  double I_q = 0.0;
  double Phi = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
  double grad_h_max = 0.0;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double rhs_sup = 0.0;
  double ma_residual_sup = 0.0;

  bool finite() const;
};

struct FlowConfig {
  double q = 2.0;
  OrliczPhi phi = OrliczPhi::power(2.0);
  std::vector<double> f;  // samples on the body grid, all > 0

  double dt0 = 1e-3;
  double dt_min = 1e-7;
  double dt_max = 1e-1;
  double growth = 1.2;
  // Fraction of the explicit RK2 stability limit 2 / (a_max * stiffness).
  double cfl_safety = 0.9;

  double tol_rhs = 1e-6;  // sup|rhs| <= tol_rhs * max h
  double tol_res = 1e-4;  // sup |Monge-Ampere residual|
  long max_steps = 200000;
  double h_min_guard = 1e-6;
  double h_max_guard = 1e6;
  double convex_eps = kDefaultConvexEps;

  int stride = 1;              // diagnostics row every `stride` accepted steps
  bool monitor_chord_integral = true;
  bool project_on_reject = false;
  bool allow_3d = false;

  // InvalidConfig / NotPositive on violated invariants.
  void validate(const SphereGrid& grid) const;
};

// One evaluation of the right-hand side at a body.
struct FlowEvaluation {
  std::vector<double> vq;   // V~_{q-1}(X(x_i))
  std::vector<double> rhs;
  double theta = 0.0;
  double a_max = 0.0;       // largest diffusion coefficient theta f h K^2 / (V~ phi)
  double rhs_sup = 0.0;
  double residual_sup = 0.0;
};

struct FlowState {
  double t = 0.0;
  ConvexBody body;
  double theta = 0.0;
  double dt = 0.0;
  long step_count = 0;
  DiagnosticsRow diagnostics;
  std::optional<FlowEvaluation> cache;  // evaluation at `body`
};

// theta = integral V~_{q-1} rho^n dxi / integral h f / phi(h) dx. The numerator is
// evaluated through rho^n K dxi = h dx on the body grid.
double theta(const ConvexBody& body, const std::vector<double>& f, const OrliczPhi& phi, double q);
double theta(const ConvexBody& body, const std::vector<double>& f, const OrliczPhi& phi,
             const std::vector<double>& vq);
// Numerator taken literally over a direction grid (basepoints rho(xi) xi on the boundary).
double theta_directions(const ConvexBody& body, const std::vector<double>& f,
                        const OrliczPhi& phi, double q, const SphereGrid& directions);

FlowEvaluation evaluate(const ConvexBody& body, const FlowConfig& config);
std::vector<double> rhs(const FlowState& state, const FlowConfig& config);

// Phi = integral f psi(h) dx.
double phi_functional(const ConvexBody& body, const std::vector<double>& f, const OrliczPhi& phi);
double chord_integral_monitor(const FlowState& state, double q);

FlowState make_state(const ConvexBody& body, const FlowConfig& config);

// One accepted RK2 step. StepCollapse, DivergedBounds, NumericalFailure.
FlowState step(const FlowState& state, const FlowConfig& config);

enum class RunStatus { Converged, MaxStepsExceeded, StepCollapse, DivergedBounds, NumericalFailure };
std::string_view to_string(RunStatus status);

struct BoundWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct RunResult {
  explicit RunResult(FlowState state) : final_state(std::move(state)) {}

  RunStatus status = RunStatus::Converged;
  std::string message;
  std::vector<DiagnosticsRow> trajectory;
  FlowState final_state;
  double c = 0.0;
  std::vector<std::string> warnings;

  double initial_chord_integral = 0.0;
  double max_conservation_drift = 0.0;  // max |I_q - I_q(0)| / I_q(0) over emitted rows
  double max_phi_increase = 0.0;        // max (Phi_{k+1} - Phi_k) / |Phi_k| over accepted steps
  // Windows over every accepted step.
  BoundWindow h, grad_h, theta, kappa;
  bool all_finite = true;

  bool converged() const { return status == RunStatus::Converged; }
  // Throws Error with the matching code unless converged.
  void throw_if_failed() const;
};

RunResult run(const ConvexBody& initial, const FlowConfig& config);

}  // namespace chordflow

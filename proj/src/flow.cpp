#include "chordflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chordflow/chord_measures.hpp"
#include "chordflow/errors.hpp"
#include "chordflow/quadrature.hpp"

namespace chordflow {

bool DiagnosticsRow::finite() const {
  for (double v : {t, dt, theta, I_q, Phi, h_min, h_max, grad_h_max, kappa_min, kappa_max, rhs_sup,
                   ma_residual_sup}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void FlowConfig::validate(const SphereGrid& grid) const {
  if (!(q > 1.0)) throw Error(ErrorCode::InvalidConfig, "flow needs q > 1");
  if (grid.dim() == 3 && !allow_3d) {
    throw Error(ErrorCode::InvalidConfig, "the n = 3 flow is experimental; enable allow_3d");
  }
  if (f.size() != grid.size()) throw Error(ErrorCode::ShapeMismatch, "f does not match the grid");
  for (double v : f) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NotPositive, "f must be positive at every node");
    }
  }
  if (!(dt_min > 0.0 && dt_min <= dt0 && dt0 <= dt_max)) {
    throw Error(ErrorCode::InvalidConfig, "need 0 < dt_min <= dt0 <= dt_max");
  }
  if (!(growth >= 1.0) || !(cfl_safety > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "growth must be >= 1 and cfl_safety > 0");
  }
  if (!(tol_rhs > 0.0) || !(tol_res > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "tolerances must be positive");
  }
  if (max_steps < 0 || stride < 1) throw Error(ErrorCode::InvalidConfig, "bad max_steps or stride");
  if (!(h_min_guard > 0.0 && h_min_guard < h_max_guard)) {
    throw Error(ErrorCode::InvalidConfig, "need 0 < h_min_guard < h_max_guard");
  }
}

namespace {

double denominator(const ConvexBody& body, const std::vector<double>& f, const OrliczPhi& phi) {
  std::vector<double> d(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) d[i] = body.h(i) * f[i] / phi(body.h(i));
  return body.grid().integrate(d);
}

std::vector<double> boundary_weight(const ConvexBody& body, double q) {
  return boundary_dual_quermass(body, q - 1.0);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NumericalFailure, std::string(what) + " is not finite");
}

DiagnosticsRow describe(const ConvexBody& body, const FlowEvaluation& ev, const FlowConfig& config) {
  DiagnosticsRow row;
  row.theta = ev.theta;
  row.Phi = phi_functional(body, config.f, config.phi);
  const auto h = body.h();
  row.h_min = *std::min_element(h.begin(), h.end());
  row.h_max = *std::max_element(h.begin(), h.end());
  row.grad_h_max = body.max_gradient_norm();
  row.kappa_min = 1.0 / body.max_radius();
  row.kappa_max = 1.0 / body.min_radius();
  row.rhs_sup = ev.rhs_sup;
  row.ma_residual_sup = ev.residual_sup;
  return row;
}

void widen(BoundWindow& w, double lo, double hi, bool first) {
  if (first) {
    w = {lo, hi};
  } else {
    w.lo = std::min(w.lo, lo);
    w.hi = std::max(w.hi, hi);
  }
}

enum class Failure { None, Convexity, Bounds, Nonfinite };

}  // namespace

double theta(const ConvexBody& body, const std::vector<double>& f, const OrliczPhi& phi,
             const std::vector<double>& vq) {
  if (f.size() != body.size() || vq.size() != body.size()) {
    throw Error(ErrorCode::ShapeMismatch, "theta inputs do not match the grid");
  }
  std::vector<double> num(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) num[i] = vq[i] * body.h(i) * body.radii_product(i);
  const double value = body.grid().integrate(num) / denominator(body, f, phi);
  require_finite(value, "theta");
  return value;
}

double theta(const ConvexBody& body, const std::vector<double>& f, const OrliczPhi& phi, double q) {
  return theta(body, f, phi, boundary_weight(body, q));
}

double theta_directions(const ConvexBody& body, const std::vector<double>& f,
                        const OrliczPhi& phi, double q, const SphereGrid& directions) {
  const int n = body.dim();
  std::vector<double> num(directions.size());
  for (std::size_t k = 0; k < directions.size(); ++k) {
    const Vec3& xi = directions.node(k);
    const double rho = radial_from_support(body, xi);
    const Vec3 z = {rho * xi[0], rho * xi[1], rho * xi[2]};
    num[k] = dual_quermass(body, z, q - 1.0) * std::pow(rho, n);
  }
  const double value = directions.integrate(num) / denominator(body, f, phi);
  require_finite(value, "theta");
  return value;
}

FlowEvaluation evaluate(const ConvexBody& body, const FlowConfig& config) {
  body.require_strictly_convex();
  FlowEvaluation ev;
  ev.vq = boundary_weight(body, config.q);
  ev.theta = theta(body, config.f, config.phi, ev.vq);
  const std::size_t n = body.size();
  ev.rhs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = body.h(i);
    const double det = body.radii_product(i);
    const double phi = config.phi(h);
    const double speed = ev.theta * config.f[i] * h / (det * ev.vq[i] * phi);
    ev.rhs[i] = h - speed;
    ev.a_max = std::max(ev.a_max, speed / det);
    ev.rhs_sup = std::max(ev.rhs_sup, std::abs(ev.rhs[i]));
    const double residual = phi * ev.vq[i] * det / ev.theta - config.f[i];
    ev.residual_sup = std::max(ev.residual_sup, std::abs(residual));
    require_finite(ev.rhs[i], "rhs");
  }
  return ev;
}

std::vector<double> rhs(const FlowState& state, const FlowConfig& config) {
  if (state.cache) return state.cache->rhs;
  return evaluate(state.body, config).rhs;
}

double phi_functional(const ConvexBody& body, const std::vector<double>& f, const OrliczPhi& phi) {
  if (f.size() != body.size()) throw Error(ErrorCode::ShapeMismatch, "f does not match the grid");
  std::vector<double> v(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) v[i] = f[i] * psi_eval(phi, body.h(i));
  return body.grid().integrate(v);
}

double chord_integral_monitor(const FlowState& state, double q) {
  if (state.body.dim() == 2) return chord_integral_pairs(state.body, q);
  return chord_integral(state.body, q);
}

FlowState make_state(const ConvexBody& body, const FlowConfig& config) {
  config.validate(body.grid());
  std::vector<double> h(body.h().begin(), body.h().end());
  ConvexBody start(body.grid_ptr(), std::move(h), config.convex_eps);
  FlowEvaluation ev = evaluate(start, config);
  DiagnosticsRow row = describe(start, ev, config);
  row.dt = config.dt0;
  return FlowState{0.0, std::move(start), ev.theta, config.dt0, 0, row, std::move(ev)};
}

FlowState step(const FlowState& state, const FlowConfig& config) {
  ConvexBody current = state.body;
  FlowEvaluation k1 = state.cache ? *state.cache : evaluate(current, config);
  const double stiffness = current.grid().stiffness();
  double dt_try = state.dt;
  bool projected = false;
  Failure last = Failure::None;

  auto advance = [&](const ConvexBody& base, const std::vector<double>& slope, double tau,
                     Failure& why) -> std::optional<std::pair<ConvexBody, FlowEvaluation>> {
    std::vector<double> h(base.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
      h[i] = base.h(i) + tau * slope[i];
      if (!std::isfinite(h[i])) {
        why = Failure::Nonfinite;
        return std::nullopt;
      }
      if (h[i] < config.h_min_guard || h[i] > config.h_max_guard) {
        why = Failure::Bounds;
        return std::nullopt;
      }
    }
    ConvexBody trial = base.with_support(std::move(h));
    if (!trial.strictly_convex()) {
      why = Failure::Convexity;
      return std::nullopt;
    }
    try {
      FlowEvaluation ev = evaluate(trial, config);
      return std::make_pair(std::move(trial), std::move(ev));
    } catch (const Error& e) {
      why = e.code() == ErrorCode::ConvexityLoss ? Failure::Convexity : Failure::Nonfinite;
      return std::nullopt;
    }
  };

  for (;;) {
    const double cap = config.cfl_safety * 2.0 / (k1.a_max * stiffness);
    const double dt = std::min(dt_try, cap);
    if (dt >= config.dt_min) {
      auto mid = advance(current, k1.rhs, 0.5 * dt, last);
      if (mid) {
        auto end = advance(current, mid->second.rhs, dt, last);
        if (end) {
          FlowState next{state.t + dt, std::move(end->first), end->second.theta,
                         std::min(dt * config.growth, config.dt_max), state.step_count + 1,
                         DiagnosticsRow{}, std::nullopt};
          next.diagnostics = describe(next.body, end->second, config);
          next.diagnostics.step = next.step_count;
          next.diagnostics.t = next.t;
          next.diagnostics.dt = dt;
          next.cache = std::move(end->second);
          return next;
        }
      }
      dt_try = 0.5 * dt;
      if (dt_try >= config.dt_min) continue;
    }
    if (config.project_on_reject && !projected) {
      current = wulff_project(current);
      k1 = evaluate(current, config);
      projected = true;
      dt_try = state.dt;
      continue;
    }
    switch (last) {
      case Failure::Bounds:
        throw Error(ErrorCode::DivergedBounds, "support function left the guard window");
      case Failure::Nonfinite:
        throw Error(ErrorCode::NumericalFailure, "non-finite values in the trial step");
      default:
        throw Error(ErrorCode::StepCollapse, "time step fell below dt_min");
    }
  }
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::MaxStepsExceeded: return "MaxStepsExceeded";
    case RunStatus::StepCollapse: return "StepCollapse";
    case RunStatus::DivergedBounds: return "DivergedBounds";
    case RunStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

void RunResult::throw_if_failed() const {
  switch (status) {
    case RunStatus::Converged: return;
    case RunStatus::MaxStepsExceeded: throw Error(ErrorCode::MaxStepsExceeded, message);
    case RunStatus::StepCollapse: throw Error(ErrorCode::StepCollapse, message);
    case RunStatus::DivergedBounds: throw Error(ErrorCode::DivergedBounds, message);
    case RunStatus::NumericalFailure: throw Error(ErrorCode::NumericalFailure, message);
  }
}

RunResult run(const ConvexBody& initial, const FlowConfig& config) {
  FlowState state = make_state(initial, config);
  RunResult result(state);
  if (config.q <= 2.0) {
    result.warnings.push_back("q <= 2: the a priori curvature estimate assumes q > 2");
  }

  auto track = [&](const DiagnosticsRow& row, bool first) {
    widen(result.h, row.h_min, row.h_max, first);
    widen(result.grad_h, row.grad_h_max, row.grad_h_max, first);
    widen(result.theta, row.theta, row.theta, first);
    widen(result.kappa, row.kappa_min, row.kappa_max, first);
  };
  auto emit = [&](FlowState& s) {
    if (config.monitor_chord_integral) {
      s.diagnostics.I_q = chord_integral_monitor(s, config.q);
      if (result.trajectory.empty()) {
        result.initial_chord_integral = s.diagnostics.I_q;
      } else {
        const double drift = std::abs(s.diagnostics.I_q - result.initial_chord_integral) /
                             std::abs(result.initial_chord_integral);
        result.max_conservation_drift = std::max(result.max_conservation_drift, drift);
      }
    }
    if (!s.diagnostics.finite()) result.all_finite = false;
    result.trajectory.push_back(s.diagnostics);
  };

  emit(state);
  track(state.diagnostics, true);
  bool emitted_last = true;
  for (;;) {
    const DiagnosticsRow& row = state.diagnostics;
    if (row.rhs_sup <= config.tol_rhs * row.h_max && row.ma_residual_sup <= config.tol_res) {
      result.status = RunStatus::Converged;
      break;
    }
    if (state.step_count >= config.max_steps) {
      result.status = RunStatus::MaxStepsExceeded;
      result.message = "no convergence after " + std::to_string(state.step_count) + " steps";
      break;
    }
    FlowState next = state;
    try {
      next = step(state, config);
    } catch (const Error& e) {
      result.message = e.what();
      switch (e.code()) {
        case ErrorCode::DivergedBounds: result.status = RunStatus::DivergedBounds; break;
        case ErrorCode::StepCollapse: result.status = RunStatus::StepCollapse; break;
        default: result.status = RunStatus::NumericalFailure; break;
      }
      break;
    }
    const double rise = (next.diagnostics.Phi - row.Phi) / std::abs(row.Phi);
    result.max_phi_increase = std::max(result.max_phi_increase, rise);
    track(next.diagnostics, false);
    state = std::move(next);
    emitted_last = state.step_count % config.stride == 0;
    if (emitted_last) emit(state);
    if (!state.diagnostics.finite()) {
      result.all_finite = false;
      result.status = RunStatus::NumericalFailure;
      result.message = "non-finite diagnostics";
      break;
    }
  }
  if (!emitted_last) emit(state);
  result.c = 1.0 / state.theta;
  result.final_state = std::move(state);
  return result;
}

}  // namespace chordflow

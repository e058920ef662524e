#include "chordflow/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>

#include "chordflow/chord_measures.hpp"
#include "chordflow/errors.hpp"
#include "chordflow/flow.hpp"
#include "chordflow/io.hpp"
#include "chordflow/orlicz.hpp"
#include "chordflow/verify.hpp"

namespace chordflow {

namespace fs = std::filesystem;

namespace {

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidConfig, "bad value for " + key + ": '" + value + "'");
}

long to_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidConfig, "bad integer for " + key + ": '" + value + "'");
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw Error(ErrorCode::InvalidConfig, "bad boolean for " + key + ": '" + value + "'");
}

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidResolution:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::ConvexityLoss:
    case ErrorCode::NotPositive:
    case ErrorCode::PsiDivergentAtZero:
    case ErrorCode::InvalidExponent:
    case ErrorCode::InvalidConfig:
    case ErrorCode::PointOutsideBody:
    case ErrorCode::Io:
      return true;
    default:
      return false;
  }
}

int exit_code(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return kExitOk;
    case RunStatus::MaxStepsExceeded: return kExitMaxSteps;
    case RunStatus::StepCollapse: return kExitStepCollapse;
    case RunStatus::DivergedBounds: return kExitDiverged;
    case RunStatus::NumericalFailure: return kExitNumerical;
  }
  return kExitCheckFailed;
}

struct Problem {
  GridPtr grid;
  OrliczPhi phi;
  std::optional<ConvexBody> initial;
  FlowConfig flow;
};

Problem build(const RunConfig& config) {
  Problem p{make_grid(config.dim, config.grid), make_phi(config.phi), std::nullopt, {}};
  const PhiReport report = validate(p.phi);
  if (!report.ok()) {
    std::string msg = "phi rejected:";
    for (const auto& v : report.violations) msg += " " + v + ";";
    throw Error(ErrorCode::InvalidConfig, msg);
  }
  p.initial.emplace(make_initial(config.init, p.grid));
  p.flow.q = config.q;
  p.flow.phi = p.phi;
  p.flow.f = make_f(config.f, *p.grid);
  p.flow.dt0 = config.dt0;
  p.flow.dt_max = std::max(p.flow.dt_max, config.dt0);
  p.flow.tol_rhs = config.tol_rhs;
  p.flow.tol_res = config.tol_res;
  p.flow.max_steps = config.max_steps;
  p.flow.stride = config.stride;
  p.flow.project_on_reject = config.project_on_reject;
  p.flow.allow_3d = config.allow_3d;
  p.flow.validate(*p.grid);
  return p;
}

struct SolveOutcome {
  int code = kExitCheckFailed;
  double c = 0.0;
  long steps = 0;
  double residual = 0.0;
};

SolveOutcome solve(const RunConfig& config, std::ostream& log) {
  SolveOutcome outcome;
  std::optional<Problem> problem;
  try {
    problem.emplace(build(config));
  } catch (const Error& e) {
    log << "config error: " << e.what() << '\n';
    outcome.code = kExitConfig;
    return outcome;
  }
  const Problem& p = *problem;
  const fs::path out(config.out);
  try {
    fs::create_directories(out);
    write_key_values(out / "config.txt", config.entries());
    const RunResult result = run(*p.initial, p.flow);
    for (const auto& w : result.warnings) log << "warning: " << w << '\n';
    const ConvexBody& body = result.final_state.body;
    const DiagnosticsRow& last = result.trajectory.back();
    write_diagnostics_csv(out / "diagnostics.csv", result.trajectory);
    write_solution_csv(out / "solution.csv", body);
    if (config.dim == 2) write_outline_svg(out / "outline.svg", *p.initial, body);

    std::vector<std::pair<std::string, std::string>> summary = {
        {"status", std::string(to_string(result.status))},
        {"message", result.message},
        {"steps", std::to_string(result.final_state.step_count)},
        {"t", format_double(result.final_state.t)},
        {"theta", format_double(result.final_state.theta)},
        {"c", format_double(result.c)},
        {"I_q_initial", format_double(result.initial_chord_integral)},
        {"I_q_final", format_double(last.I_q)},
        {"max_conservation_drift", format_double(result.max_conservation_drift)},
        {"max_phi_increase", format_double(result.max_phi_increase)},
        {"rhs_sup", format_double(last.rhs_sup)},
        {"ma_residual_sup", format_double(last.ma_residual_sup)},
        {"eccentricity", format_double((last.h_max - last.h_min) / last.h_max)},
        {"h_window", format_double(result.h.lo) + "," + format_double(result.h.hi)},
        {"grad_h_window", format_double(result.grad_h.lo) + "," + format_double(result.grad_h.hi)},
        {"theta_window", format_double(result.theta.lo) + "," + format_double(result.theta.hi)},
        {"kappa_window", format_double(result.kappa.lo) + "," + format_double(result.kappa.hi)},
        {"all_finite", result.all_finite ? "1" : "0"},
    };
    if (body.strictly_convex()) {
      const ResidualReport r = ma_residual(body, p.flow.f, p.phi, p.flow.q, result.c);
      summary.emplace_back("ma_residual_l2", format_double(r.l2));
      summary.emplace_back("c_l2_optimal", format_double(optimal_c(body, p.flow.f, p.phi, p.flow.q)));
    }
    for (std::size_t k = 0; k < result.warnings.size(); ++k) {
      summary.emplace_back("warning_" + std::to_string(k), result.warnings[k]);
    }
    write_key_values(out / "summary.txt", summary);

    log << "status=" << to_string(result.status) << " steps=" << result.final_state.step_count
        << " c=" << format_double(result.c) << " residual=" << format_double(last.ma_residual_sup)
        << '\n';
    if (!result.converged()) log << result.message << '\n';
    outcome.code = exit_code(result.status);
    outcome.c = result.c;
    outcome.steps = result.final_state.step_count;
    outcome.residual = last.ma_residual_sup;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    outcome.code = is_config_error(e.code()) ? kExitConfig : kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    outcome.code = kExitConfig;
  }
  return outcome;
}

// CSV report lines: suite,quantity,computed,expected,rel_error,tolerance,pass
class Report {
 public:
  Report(std::ostream& out, std::string suite) : out_(out), suite_(std::move(suite)) {}

  void relative(const std::string& check, double value, double reference, double tol) {
    emit(check, value, reference, std::abs(value - reference) / std::abs(reference), tol);
  }
  void absolute(const std::string& check, double value, double reference, double tol) {
    emit(check, value, reference, std::abs(value - reference), tol);
  }
  // value <= bound
  void at_most(const std::string& check, double value, double bound) {
    emit(check, value, bound, value, bound);
  }
  void flag(const std::string& check, bool ok) { emit(check, ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : 1.0, 0.0); }
  void rows(const std::vector<CheckRow>& rows, const std::string& prefix) {
    for (const auto& r : rows) {
      emit(prefix + " " + r.identity + " " + r.pipeline, r.value, r.reference, r.rel_error, r.tolerance);
    }
  }
  bool ok() const { return ok_; }

 private:
  void emit(const std::string& check, double value, double reference, double error, double tol) {
    const bool pass = error <= tol && std::isfinite(value);
    ok_ = ok_ && pass;
    out_ << suite_ << ',' << check << ',' << format_double(value) << ',' << format_double(reference)
         << ',' << format_double(error) << ',' << format_double(tol) << ',' << (pass ? "pass" : "FAIL")
         << '\n';
  }
  std::ostream& out_;
  std::string suite_;
  bool ok_ = true;
};

void suite_identities(const RunConfig& config, Report& report) {
  const GridPtr grid = make_grid(2, config.grid);
  const ConvexBody disk = make_disk(grid, 1.0);
  const ConvexBody ellipse = make_ellipse(grid, 2.0, 1.0);
  const ConvexBody shifted = make_disk(grid, 1.0, {0.3, 0.0, 0.0});
  report.rows(cross_check(disk, 2.0), "disk");
  report.rows(cross_check(ellipse, 2.0), "ellipse");
  report.rows(cross_check(shifted, 2.0), "shifted-disk");
  for (double q : {1.0, 2.0, 3.0}) {
    const std::string tag = "q=" + format_double(q);
    report.relative("shift invariance polar " + tag, chord_integral(shifted, q), chord_integral(disk, q), 1e-2);
    report.relative("shift invariance lines " + tag, chord_integral_lines(shifted, q),
                    chord_integral_lines(disk, q), 1e-2);
  }
  LineSamplerOptions mc;
  mc.monte_carlo = true;
  mc.seed = config.seed;
  report.relative("disk I_1 lines monte-carlo", chord_integral_lines(disk, 1.0, mc), volume(disk), 1e-2);
}

void suite_ball(const RunConfig& config, Report& report) {
  const GridPtr grid = make_grid(2, config.grid);
  for (double q : {2.0, 3.0}) {
    for (double R : {0.5, 1.0, 2.0}) {
      const ConvexBody disk = make_disk(grid, R);
      const BallOracle oracle = ball_oracle(R, q, 2);
      const std::string tag = "q=" + format_double(q) + " R=" + format_double(R);
      report.relative("boundary V~_{q-1} " + tag, dual_quermass(disk, disk.boundary_points()[0], q - 1.0),
                      oracle.boundary_vq, 1e-4);
      double worst = 0.0;
      for (double v : boundary_dual_quermass(disk, q - 1.0)) {
        worst = std::max(worst, std::abs(v - oracle.boundary_vq) / oracle.boundary_vq);
      }
      report.at_most("boundary V~_{q-1} all nodes " + tag, worst, 1e-4);
    }
  }
  std::vector<double> ones(grid->size(), 1.0);
  for (double p : {1.5, 2.0, 3.0}) {
    for (double R : {0.5, 1.0, 2.0}) {
      const OrliczPhi phi = OrliczPhi::power(p);
      const ConvexBody disk = make_disk(grid, R);
      report.relative("theta p=" + format_double(p) + " R=" + format_double(R),
                      theta(disk, ones, phi, 2.0), 2.0 * std::pow(R, 3.0 - p), 1e-3);
    }
  }
  const GridPtr sphere_grid = make_grid(3, 12);
  const ConvexBody sphere = make_ball(sphere_grid, 1.0);
  report.relative("sphere volume", volume(sphere), 4.0 * std::numbers::pi / 3.0, 1e-2);
  report.relative("sphere I_1", chord_integral(sphere, 1.0), volume(sphere), 2e-2);
  double worst_k = 0.0;
  for (std::size_t i = 0; i < sphere.size(); ++i) {
    worst_k = std::max(worst_k, std::abs(gauss_curvature(sphere, i) - 1.0));
  }
  report.at_most("sphere K", worst_k, 1e-2);
}

void suite_ellipse(const RunConfig& config, Report& report) {
  const GridPtr grid = make_grid(2, config.grid);
  const ConvexBody ellipse = make_ellipse(grid, 2.0, 1.0);
  report.relative("volume", volume(ellipse), 2.0 * std::numbers::pi, 1e-2);
  report.relative("I_1 polar", chord_integral(ellipse, 1.0), 2.0 * std::numbers::pi, 1e-2);
  for (double q : {1.0, 2.0, 3.0}) {
    report.relative("polar vs lines q=" + format_double(q), chord_integral(ellipse, q),
                    chord_integral_lines(ellipse, q), 1e-2);
  }
  const MeasureDensity g1 = chord_measure_density(ellipse, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < ellipse.size(); ++i) {
    worst = std::max(worst, std::abs(g1.samples[i] - ellipse.radii_product(i)) / ellipse.radii_product(i));
  }
  report.at_most("F_1 = det b", worst, 1e-3);
}

void suite_variational(const RunConfig& config, Report& report) {
  const GridPtr grid = make_grid(2, config.grid);
  const ConvexBody disk = make_disk(grid, 1.0);
  const ConvexBody ellipse = make_ellipse(grid, 2.0, 1.0);
  for (const auto& [name, body] : {std::pair<std::string, const ConvexBody*>{"disk", &disk},
                                   std::pair<std::string, const ConvexBody*>{"ellipse", &ellipse}}) {
    for (double q : {1.0, 2.0}) {
      const VariationalCheck v = variational_check(*body, q, 1.0, 1e-4);
      report.relative(name + " q=" + format_double(q), v.finite_difference, v.measure_integral, 2e-2);
    }
  }
}

void suite_flow_invariants(const RunConfig& config, Report& report) {
  const GridPtr grid = make_grid(2, config.grid);
  FlowConfig flow;
  flow.f.assign(grid->size(), 1.0);
  flow.stride = 50;
  const RunResult r = run(make_ellipse(grid, 1.2, 1.0), flow);
  report.flag("converged", r.converged());
  report.flag("all finite", r.all_finite);
  report.at_most("I_2 drift", r.max_conservation_drift, 1e-3);
  report.at_most("Phi increase", r.max_phi_increase, 1e-8);
  const DiagnosticsRow& last = r.trajectory.back();
  report.at_most("eccentricity", (last.h_max - last.h_min) / last.h_max, 1e-3);
  const double R = std::cbrt(3.0 * r.initial_chord_integral / 16.0);
  report.relative("c vs disk closed form", r.c, 1.0 / (2.0 * R), 1e-3);
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "dim",  "grid",    "q",         "phi",  "f",      "init",   "dt0",          "tol-rhs",
      "tol-res", "max-steps", "out", "seed", "stride", "project-on-reject", "allow-3d"};
  return k;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "dim") {
    dim = static_cast<int>(to_long(key, value));
  } else if (key == "grid") {
    grid = static_cast<int>(to_long(key, value));
  } else if (key == "q") {
    q = to_double(key, value);
  } else if (key == "phi") {
    phi = value;
  } else if (key == "f") {
    f = value;
  } else if (key == "init") {
    init = value;
  } else if (key == "dt0") {
    dt0 = to_double(key, value);
  } else if (key == "tol-rhs") {
    tol_rhs = to_double(key, value);
  } else if (key == "tol-res") {
    tol_res = to_double(key, value);
  } else if (key == "max-steps") {
    max_steps = to_long(key, value);
  } else if (key == "out") {
    out = value;
  } else if (key == "seed") {
    const long s = to_long(key, value);
    if (s < 0) throw Error(ErrorCode::InvalidConfig, "seed must be non-negative");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "stride") {
    stride = static_cast<int>(to_long(key, value));
  } else if (key == "project-on-reject") {
    project_on_reject = to_bool(key, value);
  } else if (key == "allow-3d") {
    allow_3d = to_bool(key, value);
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  return {{"dim", std::to_string(dim)},
          {"grid", std::to_string(grid)},
          {"q", format_double(q)},
          {"phi", phi},
          {"f", f},
          {"init", init},
          {"dt0", format_double(dt0)},
          {"tol-rhs", format_double(tol_rhs)},
          {"tol-res", format_double(tol_res)},
          {"max-steps", std::to_string(max_steps)},
          {"out", out},
          {"seed", std::to_string(seed)},
          {"stride", std::to_string(stride)},
          {"project-on-reject", project_on_reject ? "1" : "0"},
          {"allow-3d", allow_3d ? "1" : "0"}};
}

void load_config(const std::string& path, RunConfig& config) {
  for (const auto& [k, v] : read_key_values(path)) config.set(k, v);
}

int cmd_solve(const RunConfig& config, std::ostream& log) { return solve(config, log).code; }

int cmd_verify(const std::string& suite, const RunConfig& config, std::ostream& out) {
  Report report(out, suite);
  try {
    out << "suite,quantity,computed,expected,rel_error,tolerance,pass\n";
    if (suite == "identities") {
      suite_identities(config, report);
    } else if (suite == "ball") {
      suite_ball(config, report);
    } else if (suite == "ellipse") {
      suite_ellipse(config, report);
    } else if (suite == "variational") {
      suite_variational(config, report);
    } else if (suite == "flow-invariants") {
      suite_flow_invariants(config, report);
    } else {
      std::cerr << "unknown suite '" << suite
                << "' (identities | ball | ellipse | variational | flow-invariants)\n";
      return kExitConfig;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_config_error(e.code()) ? kExitConfig : kExitCheckFailed;
  }
  return report.ok() ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const RunConfig& config, const std::string& param,
              const std::vector<std::string>& values, std::ostream& log) {
  if (values.empty()) {
    log << "usage error: sweep needs at least one value\n";
    return kExitConfig;
  }
  const fs::path base(config.out);
  std::vector<std::pair<std::string, SolveOutcome>> results;
  try {
    fs::create_directories(base);
    for (const auto& value : values) {
      RunConfig run_config = config;
      if (param == "p") {
        run_config.phi = "power:p=" + value;
      } else {
        run_config.set(param, value);
      }
      run_config.out = (base / (param + "=" + value)).string();
      log << param << '=' << value << ": ";
      results.emplace_back(value, solve(run_config, log));
    }
  } catch (const Error& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::ofstream agg(base / "aggregate.csv");
  if (!agg) {
    log << "error: cannot write aggregate.csv\n";
    return kExitConfig;
  }
  agg << "value,converged,c,steps,residual,exit_code\n";
  int code = kExitOk;
  for (const auto& [value, o] : results) {
    agg << value << ',' << (o.code == kExitOk ? 1 : 0) << ',' << format_double(o.c) << ',' << o.steps
        << ',' << format_double(o.residual) << ',' << o.code << '\n';
    if (code == kExitOk && o.code != kExitOk) code = o.code;
  }
  return code;
}

}  // namespace chordflow

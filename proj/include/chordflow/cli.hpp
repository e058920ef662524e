#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace chordflow {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,   // verify suite out of tolerance, or any other failure
  kExitConfig = 2,        // usage, parse or validation error
  kExitMaxSteps = 3,
  kExitStepCollapse = 4,
  kExitDiverged = 5,
  kExitNumerical = 6,
};

struct RunConfig {
  int dim = 2;
  int grid = 256;
  double q = 2.0;
  std::string phi = "power:p=2";
  std::string f = "const:1";
  std::string init = "disk:1";
  double dt0 = 1e-3;
  double tol_rhs = 1e-6;
  double tol_res = 1e-4;
  long max_steps = 200000;
  std::string out = "out";
  std::uint64_t seed = 0;
  int stride = 1;
  bool project_on_reject = false;
  bool allow_3d = false;

  // Keys are the long flag names without dashes ("tol-rhs"). InvalidConfig on
  // unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  std::vector<std::pair<std::string, std::string>> entries() const;
  static const std::vector<std::string>& keys();
};

// Reads a key=value file into `config`.
void load_config(const std::string& path, RunConfig& config);

int cmd_solve(const RunConfig& config, std::ostream& log);
// Suites: identities, ball, ellipse, variational, flow-invariants. CSV on `out`.
int cmd_verify(const std::string& suite, const RunConfig& config, std::ostream& out);
// `param` is a config key or `p` (power family exponent).
int cmd_sweep(const RunConfig& config, const std::string& param,
              const std::vector<std::string>& values, std::ostream& log);

}  // namespace chordflow

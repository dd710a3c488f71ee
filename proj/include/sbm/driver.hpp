#pragma once

#include "sbm/analysis.hpp"
#include "sbm/assembly.hpp"
#include "sbm/exact_solution.hpp"
#include "sbm/geometry.hpp"
#include "sbm/linsolve.hpp"
#include "sbm/mesh.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sbm {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitConfig = 2 };

struct RunConfig {
  std::string domain = "corner";
  std::string solution = "corner23";
  double gamma = 10.0;
  int n0 = 20;
  int levels = 5;
  double zeta = 0.0;
  double c_d = 1.0;
  bool shift_enabled = false;
  int nq_edge = 3;
  double solver_tol = 1e-10;
  std::string out = ".";
  std::string matrix_market;  // optional dump of the level-0 matrix
};

/// Throws ConfigError on any violated invariant (including unknown catalog
/// names).
void validate(const RunConfig& cfg);

/// Reads a JSON object; keys match the RunConfig field names. Unknown keys
/// are rejected.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

/// Everything produced by one solve on one mesh.
struct LevelResult {
  int n = 0;
  TriMesh mesh;
  SparseSystem system;
  SolveReport solve;
  ErrorReport report;
};

/// Background n x n mesh of the domain box, restricted, optionally shifted,
/// assembled and solved.
LevelResult solve_level(const DomainSpec& domain, const ExactSolution& sol, int n,
                        const RunConfig& cfg);

/// Surrogate mesh only (restricted and optionally shifted).
TriMesh surrogate_mesh(const DomainSpec& domain, int n, const RunConfig& cfg);

/// Errors below this are printed as exact rates.
inline constexpr double kExactErrorFloor = 1e-11;

struct StudyResult {
  std::vector<ErrorReport> reports;
  RateTable l2, h1, energy, remainder;
};

/// Solves at n0 * 2^k, k = 0..levels-1, streaming CSV rows to `csv` as each
/// level finishes.
StudyResult run_study(const RunConfig& cfg, std::ostream& csv, std::ostream& log);

struct CheckResult {
  std::string check;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

std::vector<CheckResult> run_verification(const RunConfig& cfg, std::ostream& log);
std::string verification_json(const std::vector<CheckResult>& checks);

/// Command entry points: return an ExitCode and report on `out` / `err`.
int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_study(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace sbm

#include "sbm/driver.hpp"
#include "sbm/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Overrides {
  std::string config_path;
  std::optional<double> gamma;
  std::optional<int> levels;
  std::optional<int> n0;
  std::optional<std::string> domain;
  std::optional<std::string> solution;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON run configuration");
  cmd->add_option("--gamma", o.gamma, "Nitsche penalty");
  cmd->add_option("--levels", o.levels, "number of refinement levels");
  cmd->add_option("--n0", o.n0, "coarsest subdivisions per axis");
  cmd->add_option("--domain", o.domain, "square | disk | disk:<r> | corner");
  cmd->add_option("--solution", o.solution, "affine:a,b,c | sinsin | corner23");
  cmd->add_option("--out", o.out, "output directory");
}

sbm::RunConfig resolve(const Overrides& o) {
  sbm::RunConfig cfg = o.config_path.empty() ? sbm::RunConfig{} : sbm::load_config(o.config_path);
  if (o.gamma) cfg.gamma = *o.gamma;
  if (o.levels) cfg.levels = *o.levels;
  if (o.n0) cfg.n0 = *o.n0;
  if (o.domain) cfg.domain = *o.domain;
  if (o.solution) cfg.solution = *o.solution;
  if (o.out) cfg.out = *o.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shifted boundary method for the Dirichlet Poisson problem"};
  app.require_subcommand(1);
  Overrides run_o, study_o, verify_o;
  auto* run = app.add_subcommand("run", "single solve at n0; writes VTK");
  auto* study = app.add_subcommand("study", "refinement study; writes study.csv");
  auto* verify = app.add_subcommand("verify", "algebraic identity checks; writes verify.json");
  add_common(run, run_o);
  add_common(study, study_o);
  add_common(verify, verify_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? sbm::kExitOk : sbm::kExitConfig;
  }

  try {
    if (run->parsed()) return sbm::cmd_run(resolve(run_o), std::cout, std::cerr);
    if (study->parsed()) return sbm::cmd_study(resolve(study_o), std::cout, std::cerr);
    return sbm::cmd_verify(resolve(verify_o), std::cout, std::cerr);
  } catch (const sbm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return sbm::kExitConfig;
  }
}

#include "sbm/driver.hpp"

#include "sbm/errors.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace sbm {

namespace {

using nlohmann::json;

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

void print_report(std::ostream& os, int n, const ErrorReport& r, const SolveReport& s) {
  os << std::scientific << std::setprecision(6);
  os << "n=" << n << " dofs=" << r.dofs << " h_omega=" << r.h_omega << " h_gamma=" << r.h_gamma
     << " l2=" << r.err_l2 << " h1=" << r.err_h1 << " energy=" << r.err_energy
     << " remainder=" << r.remainder << " solver=" << to_string(s.method)
     << " iters=" << s.iterations << " residual=" << s.final_residual << "\n";
  os << std::defaultfloat;
}

std::string format_slope(const RateTable& t) {
  if (t.fitted_exact) return "exact";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << t.fitted_slope;
  return os.str();
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (cfg.levels < 1) throw ConfigError("levels must be >= 1");
  if (cfg.n0 < 4) throw ConfigError("n0 must be >= 4");
  if (cfg.nq_edge < 1) throw ConfigError("nq_edge must be >= 1");
  if (!(cfg.solver_tol > 0.0)) throw ConfigError("solver_tol must be positive");
  if (cfg.shift_enabled) {
    if (cfg.zeta < 0.0 || cfg.zeta > 1.0) throw ConfigError("zeta must lie in [0, 1]");
    if (!(cfg.c_d > 0.0)) throw ConfigError("c_d must be positive");
  }
  try {
    (void)make_domain(cfg.domain);
  } catch (const GeometryError& e) {
    throw ConfigError(e.what());
  }
  (void)make_solution(cfg.solution);
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "domain") cfg.domain = value.get<std::string>();
      else if (key == "solution") cfg.solution = value.get<std::string>();
      else if (key == "gamma") cfg.gamma = value.get<double>();
      else if (key == "n0") cfg.n0 = value.get<int>();
      else if (key == "levels") cfg.levels = value.get<int>();
      else if (key == "zeta") cfg.zeta = value.get<double>();
      else if (key == "c_d") cfg.c_d = value.get<double>();
      else if (key == "shift_enabled") cfg.shift_enabled = value.get<bool>();
      else if (key == "nq_edge") cfg.nq_edge = value.get<int>();
      else if (key == "solver_tol") cfg.solver_tol = value.get<double>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "matrix_market") cfg.matrix_market = value.get<std::string>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::type_error& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

TriMesh surrogate_mesh(const DomainSpec& domain, int n, const RunConfig& cfg) {
  TriMesh mesh = restrict_to_domain(build_background(domain.mesh_box, n), domain);
  if (cfg.shift_enabled) {
    mesh = shift_boundary_nodes(mesh, domain, {cfg.zeta, cfg.c_d, true}, cfg.nq_edge);
  }
  return mesh;
}

LevelResult solve_level(const DomainSpec& domain, const ExactSolution& sol, int n,
                        const RunConfig& cfg) {
  LevelResult res;
  res.n = n;
  res.mesh = surrogate_mesh(domain, n, cfg);
  const DomainSpec traced = with_dirichlet_trace(domain, sol);
  res.system = assemble(res.mesh, traced, sol, cfg.gamma, cfg.nq_edge);
  SolveOptions opts;
  opts.tol = cfg.solver_tol;
  res.solve = solve(res.system, opts);
  res.report = error_report(res.mesh, res.system.boundary, res.solve.solution, sol);
  return res;
}

StudyResult run_study(const RunConfig& cfg, std::ostream& csv, std::ostream& log) {
  const DomainSpec domain = make_domain(cfg.domain);
  const ExactSolution sol = make_solution(cfg.solution);
  StudyResult out;
  write_rate_csv_header(csv);
  for (int k = 0; k < cfg.levels; ++k) {
    const int n = cfg.n0 << k;
    const LevelResult level = solve_level(domain, sol, n, cfg);
    print_report(log, n, level.report, level.solve);
    write_rate_csv_row(csv, out.reports.empty() ? nullptr : &out.reports.back(), level.report,
                       kExactErrorFloor);
    csv.flush();
    out.reports.push_back(level.report);
  }
  if (out.reports.size() >= 2) {
    auto series = [&](double ErrorReport::*field) {
      std::vector<std::pair<double, double>> s;
      for (const auto& r : out.reports) s.emplace_back(r.h_omega, r.*field);
      return fit_rates(s, kExactErrorFloor);
    };
    out.l2 = series(&ErrorReport::err_l2);
    out.h1 = series(&ErrorReport::err_h1);
    out.energy = series(&ErrorReport::err_energy);
    out.remainder = series(&ErrorReport::remainder);
  }
  return out;
}

std::vector<CheckResult> run_verification(const RunConfig& cfg, std::ostream& log) {
  const DomainSpec domain = make_domain(cfg.domain);
  const ExactSolution sol = make_solution(cfg.solution);
  std::vector<CheckResult> checks;
  auto record = [&](std::string name, double measured, double bound, bool pass) {
    log << (pass ? "PASS " : "FAIL ") << name << ": measured " << measured << " bound " << bound
        << "\n";
    checks.push_back({std::move(name), measured, bound, pass});
  };

  const TriMesh mesh = surrogate_mesh(domain, cfg.n0, cfg);
  const SparseSystem sys =
      assemble(mesh, with_dirichlet_trace(domain, sol), sol, cfg.gamma, cfg.nq_edge);

  {
    std::mt19937_64 rng(7);
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
    double worst = 0.0;
    for (int pair = 0; pair < 50; ++pair) {
      const Eigen::VectorXd w = random_vector(rng, n);
      const Eigen::VectorXd v = random_vector(rng, n);
      worst = std::max(worst, nonsymmetry_residual(sys, mesh, w, v));
    }
    record("nonsymmetry_identity", worst, 1e-10, worst <= 1e-10);
  }

  {
    const CoercivityEstimate est = coercivity_estimate(sys, mesh);
    record("coercivity_positive", est.alpha_min, 0.0, est.alpha_min > 0.0);
  }

  {
    const ExactSolution affine = make_affine_solution(0.3, 1.7, -0.9);
    RunConfig tight = cfg;
    tight.solver_tol = 1e-13;
    const LevelResult level = solve_level(domain, affine, cfg.n0, tight);
    const double patch = std::max(level.report.err_l2, level.report.err_h1);
    record("affine_patch_test", patch, 1e-10, patch <= 1e-10);
    const Eigen::VectorXd ui = interpolate(level.mesh, affine);
    const double consistency =
        (level.system.rhs - level.system.matrix * ui).lpNorm<Eigen::Infinity>();
    record("affine_consistency", consistency, 1e-10, consistency <= 1e-10);
    record("remainder_vanishing", level.report.remainder, 1e-12, level.report.remainder <= 1e-12);
  }

  {
    const DomainSpec square = make_square_domain();
    RunConfig fitted = cfg;
    fitted.shift_enabled = false;
    const TriMesh sq_mesh = surrogate_mesh(square, cfg.n0, fitted);
    const SparseSystem sq =
        assemble(sq_mesh, with_dirichlet_trace(square, sol), sol, cfg.gamma, cfg.nq_edge);
    const CsrMatrix diff = sq.matrix - CsrMatrix(sq.matrix.transpose());
    const double asym = diff.nonZeros() == 0 ? 0.0 : diff.coeffs().cwiseAbs().maxCoeff();
    record("fitted_nitsche_symmetry", asym, 1e-12, asym <= 1e-12);

    std::mt19937_64 rng(11);
    const auto n = static_cast<Eigen::Index>(sq_mesh.num_vertices());
    double bracket = 0.0;
    for (int pair = 0; pair < 10; ++pair) {
      const Eigen::VectorXd w = random_vector(rng, n);
      const Eigen::VectorXd v = random_vector(rng, n);
      bracket = std::max(bracket, std::abs(nonsymmetry_bracket(sq_mesh, sq.boundary, w, v)));
    }
    record("fitted_nonsymmetry_bracket", bracket, 1e-12, bracket <= 1e-12);
  }

  if (cfg.shift_enabled) {
    const double ratio = max_shift_ratio(mesh, domain, cfg.zeta, cfg.nq_edge);
    record("d_smallness", ratio, cfg.c_d + 1e-9, ratio <= cfg.c_d + 1e-9);
  }
  return checks;
}

std::string verification_json(const std::vector<CheckResult>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"check", c.check}, {"measured", c.measured}, {"bound", c.bound}, {"pass", c.pass}});
  }
  return arr.dump(2);
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    ensure_dir(cfg.out);
    const DomainSpec domain = make_domain(cfg.domain);
    const ExactSolution sol = make_solution(cfg.solution);
    const LevelResult level = solve_level(domain, sol, cfg.n0, cfg);
    print_report(out, cfg.n0, level.report, level.solve);

    const Eigen::VectorXd exact = interpolate(level.mesh, sol);
    const Eigen::VectorXd& uh = level.solve.solution;
    std::vector<double> uh_v(uh.data(), uh.data() + uh.size());
    std::vector<double> err_v(uh.size());
    for (Eigen::Index i = 0; i < uh.size(); ++i) err_v[i] = std::abs(exact(i) - uh(i));
    const std::string vtk = join_path(cfg.out, "solution.vtk");
    write_vtk(vtk, level.mesh, {{"u_h", uh_v}, {"abs_error", err_v}});
    out << "wrote " << vtk << "\n";

    if (!cfg.matrix_market.empty()) {
      std::ofstream mm(join_path(cfg.out, cfg.matrix_market));
      write_matrix_market(mm, level.system.matrix);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int cmd_study(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    if (cfg.levels < 2) throw ConfigError("study needs levels >= 2");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    ensure_dir(cfg.out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const std::string path = join_path(cfg.out, "study.csv");
  std::ofstream csv(path);
  if (!csv) {
    err << "config error: cannot write '" << path << "'\n";
    return kExitConfig;
  }
  try {
    const StudyResult res = run_study(cfg, csv, out);
    out << "fitted slopes (last " << std::min<std::size_t>(4, res.reports.size())
        << " levels): l2=" << format_slope(res.l2) << " h1=" << format_slope(res.h1)
        << " energy=" << format_slope(res.energy) << " remainder=" << format_slope(res.remainder)
        << "\n";
    out << "wrote " << path << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    csv.flush();
    err << "error: " << e.what() << " (partial CSV in " << path << ")\n";
    return kExitNumerical;
  }
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    ensure_dir(cfg.out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    const auto checks = run_verification(cfg, out);
    const std::string path = join_path(cfg.out, "verify.json");
    std::ofstream js(path);
    js << verification_json(checks) << "\n";
    out << "wrote " << path << "\n";
    const bool ok = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
    if (!ok) err << "verification failed\n";
    return ok ? kExitOk : kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace sbm

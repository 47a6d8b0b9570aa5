#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "tdg/analysis.hpp"
#include "tdg/oracles.hpp"
#include "tdg/run_config.hpp"
#include "tdg/spectral.hpp"

namespace fs = std::filesystem;
using namespace tdg;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::vector<std::string> overrides;
  int threads = 1;
};

RunConfig load(const Options& opt) {
  nlohmann::json doc = load_json_file(opt.config);
  for (const auto& s : opt.overrides) apply_override(doc, s);
  const std::string base = fs::path(opt.config).parent_path().string();
  return parse_run_config(doc, base.empty() ? "." : base);
}

fs::path out_dir(const Options& opt) {
  fs::path dir(opt.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw ConfigError("--out: cannot create directory '" + opt.out + "'");
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ConfigError("--out: cannot write '" + p.string() + "'");
  return f;
}

void print_warnings(const DiscreteSolution& sol) {
  for (const auto& w : sol.warnings) std::cerr << "warning: " << w << "\n";
}

void write_errors(std::ostream& out, const ErrorReport& e) {
  nlohmann::json j;
  j["reference"] = e.reference;
  j["quad_order"] = e.quad_order;
  j["l2_abs"] = e.l2_abs;
  j["l2_rel"] = e.l2_rel;
  j["h1_abs"] = e.h1_abs;
  j["h1_rel"] = e.h1_rel;
  out << j.dump(2) << "\n";
}

void write_efficiencies(std::ostream& out, const Efficiencies& eff) {
  out << "kind,n,value\n" << std::setprecision(15);
  for (const auto& o : eff.reflected) out << "reflected," << o.n << "," << o.value << "\n";
  for (const auto& o : eff.transmitted) out << "transmitted," << o.n << "," << o.value << "\n";
  out << "total_reflected,," << eff.total_reflected << "\n";
  out << "total_transmitted,," << eff.total_transmitted << "\n";
  out << "total,," << eff.total << "\n";
}

std::string reference_path(const RunConfig& rc, const fs::path& dir) {
  if (rc.reference.file.empty()) return "";
  fs::path p(rc.reference.file);
  return (p.is_relative() ? dir / p : p).string();
}

// Reference field for a discretization; refined solutions are cached per key.
class ReferenceSource {
 public:
  ReferenceSource(const RunConfig& rc, const fs::path& dir, const std::string& sweep, double max_value)
      : rc_(rc), file_(reference_path(rc, dir)), sweep_(sweep), max_value_(max_value) {}

  FieldEvaluator operator()(const Discretization& disc) {
    if (rc_.reference.type != "refined") {
      FieldEvaluator f = oracle_for(rc_, disc.config);
      if (!f) throw ConfigError("reference.type: a sweep needs an oracle or a refined reference");
      return f;
    }
    // p and M sweeps share one reference; h and theta need one per case
    const bool shared = sweep_ == "p" || sweep_ == "M" || sweep_.empty();
    if (shared && cached_) return shared_solution_evaluator(cached_);
    Discretization ref = disc;
    int p_ref = rc_.reference.p_ref;
    if (p_ref <= 0) p_ref = sweep_ == "p" ? static_cast<int>(max_value_) + 1 : disc.p + 1;
    if (sweep_ == "M") ref.M = std::max(disc.M, static_cast<int>(max_value_));
    auto sol = refined_solution(ref, p_ref, shared ? file_ : "");
    if (shared) cached_ = sol;
    return shared_solution_evaluator(sol);
  }

 private:
  const RunConfig& rc_;
  std::string file_;
  std::string sweep_;
  double max_value_;
  std::shared_ptr<const DiscreteSolution> cached_;
};

int cmd_solve(const Options& opt, bool efficiencies_only) {
  const RunConfig rc = load(opt);
  const fs::path dir = out_dir(opt);
  const Discretization disc = make_discretization(rc);
  std::cout << "mesh: " << disc.mesh->num_elements() << " elements, p = " << disc.p << ", M = " << disc.M
            << "\n";
  std::shared_ptr<const GlobalBasis> basis;
  SpectralLadder ladder;
  const TdgSystem sys = assemble(disc, &basis, &ladder);
  if (rc.output.matrix && !efficiencies_only) {
    auto f = open_out(dir / "matrix.txt");
    write_matrix(f, sys.matrix());
  }
  const DiscreteSolution sol = solve(sys, disc.mesh, basis, disc.config, disc.solve_options);
  print_warnings(sol);
  std::cout << "N = " << sys.N << ", " << (sol.dense ? "dense" : "sparse") << " solve"
            << ", cond ~ " << std::scientific << std::setprecision(3) << sol.condition_estimate
            << ", backward error " << sol.backward_error << std::defaultfloat << "\n";

  if (!efficiencies_only) {
    if (rc.output.coefficients) {
      auto f = open_out(dir / "coefficients.txt");
      write_coefficients(f, sol);
    }
    if (rc.output.grid_nx > 0 && rc.output.grid_ny > 0) {
      auto f = open_out(dir / "field.txt");
      write_field_grid(f, sol, rc.output.grid_nx, rc.output.grid_ny);
    }
    FieldEvaluator ref = oracle_for(rc, disc.config);
    std::shared_ptr<const DiscreteSolution> refined;
    if (!ref && rc.reference.type == "refined") {
      const int p_ref = rc.reference.p_ref > 0 ? rc.reference.p_ref : disc.p + 1;
      refined = refined_solution(disc, p_ref, reference_path(rc, dir));
      ref = shared_solution_evaluator(refined);
    }
    if (ref) {
      const std::string tag = refined ? "refined p=" + std::to_string(refined->basis().space(0).p()) : "oracle";
      const ErrorReport err = error_norms(sol, ref, rc.output.quad_order, tag);
      auto f = open_out(dir / "errors.json");
      write_errors(f, err);
      std::cout << std::scientific << std::setprecision(4) << "error vs " << tag << ": L2 rel " << err.l2_rel
                << ", H1 rel " << err.h1_rel << std::defaultfloat << "\n";
    }
  }

  try {
    const Efficiencies eff = diffraction_efficiencies(sol, ladder);
    auto f = open_out(dir / "efficiencies.csv");
    write_efficiencies(f, eff);
    std::cout << std::setprecision(12) << "efficiencies: reflected " << eff.total_reflected << ", transmitted "
              << eff.total_transmitted << ", total " << eff.total << "\n";
  } catch (const DegenerateIncidence& e) {
    if (efficiencies_only) throw;
    std::cerr << "warning: efficiencies skipped: " << e.what() << "\n";
  }
  return 0;
}

int cmd_sweep(const Options& opt) {
  const RunConfig rc = load(opt);
  if (rc.study.sweep.empty() || rc.study.values.empty())
    throw ConfigError("study: a sweep needs 'sweep' and 'values' or 'range'");
  const fs::path dir = out_dir(opt);
  const std::string var = rc.study.sweep;
  const double vmax = *std::max_element(rc.study.values.begin(), rc.study.values.end());

  const Discretization base = make_discretization(rc);
  CaseBuilder build = [&](double v) {
    Discretization d = base;
    if (var == "p") {
      d.p = static_cast<int>(std::lround(v));
    } else if (var == "M") {
      d.M = static_cast<int>(std::lround(v));
    } else if (var == "h") {
      RunConfig r = rc;
      r.mesh.h = v;
      d.mesh = build_mesh(r);
    } else if (var == "theta") {
      RunConfig r = rc;
      r.problem.theta = v;
      r.problem.validate();
      d.config = r.problem;
      d.M = resolve_truncation(r);
    }
    return d;
  };
  ReferenceSource refs(rc, dir, var, vmax);
  ReferenceProvider provider = [&](const Discretization& d) { return refs(d); };

  auto csv = open_out(dir / "convergence.csv");
  csv << "sweep,l2_rel,h1_rel,cond,seconds\n" << std::flush;
  std::cout << std::setw(14) << var << std::setw(14) << "l2_rel" << std::setw(14) << "h1_rel" << std::setw(12)
            << "cond" << std::setw(8) << "N" << std::setw(10) << "seconds" << "\n";
  auto on_row = [&](const ConvergenceRow& row) {
    write_convergence_row(csv, row);
    csv.flush();
    std::cout << std::setw(14) << std::setprecision(8) << row.value << std::scientific << std::setprecision(4)
              << std::setw(14) << row.l2_rel << std::setw(14) << row.h1_rel << std::setprecision(2)
              << std::setw(12) << row.cond << std::defaultfloat << std::setw(8) << row.N << std::fixed
              << std::setprecision(3) << std::setw(10) << row.seconds << std::defaultfloat << "\n";
  };
  const ConvergenceTable table =
      run_convergence(var, rc.study.values, build, provider, rc.output.quad_order, on_row);

  std::vector<double> vals, l2;
  for (const auto& r : table.rows) {
    vals.push_back(r.value);
    l2.push_back(r.l2_rel);
  }
  if (var == "p" || var == "M") {
    std::cout << "log10 slope of l2_rel: " << log_linear_slope(vals, l2) << "\n";
    const int plateau = plateau_index(l2);
    if (plateau >= 0) std::cout << "first stall at " << var << " = " << vals[plateau] << "\n";
    const int settled = settle_index(l2);
    if (settled >= 0 && settled + 1 < static_cast<int>(vals.size()))
      std::cout << "settled (within 5%) from " << var << " = " << vals[settled] << "\n";
  } else {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < l2.size(); ++i)
      if (l2[i] > l2[worst]) worst = i;
    std::cout << "largest error at " << var << " = " << std::setprecision(16) << vals[worst] << std::defaultfloat
              << "\n";
  }
  return 0;
}

int cmd_modes(const Options& opt) {
  const RunConfig rc = load(opt);
  const fs::path dir = out_dir(opt);
  if (rc.reference.eps_in.imag() != 0.0) throw ConfigError("reference.eps_in: guided modes need a real value");
  if (!(rc.reference.d > 0.0)) throw ConfigError("reference.d: guided modes need the slab half-thickness");
  const auto modes =
      find_guided_modes(rc.problem.k, rc.reference.eps_in.real(), rc.problem.eps_plus, rc.reference.d, rc.problem.L);
  auto f = open_out(dir / "modes.csv");
  f << "branch,k2,k3,k1,C,n,theta\n" << std::setprecision(16);
  std::cout << std::setprecision(16);
  for (const auto& m : modes) {
    std::cout << "branch " << m.branch << ": k2 = " << m.k2 << ", k3 = " << m.k3 << ", k1 = " << m.k1 << "\n";
    if (m.critical_angles.empty()) f << m.branch << "," << m.k2 << "," << m.k3 << "," << m.k1 << "," << m.C << ",,\n";
    for (const auto& a : m.critical_angles) {
      f << m.branch << "," << m.k2 << "," << m.k3 << "," << m.k1 << "," << m.C << "," << a.n << "," << a.theta
        << "\n";
      std::cout << "  n = " << a.n << ": theta = " << a.theta << "\n";
    }
  }
  if (modes.empty()) std::cout << "no guided modes\n";
  return 0;
}

int cmd_check(const Options& opt) {
  const RunConfig rc = load(opt);
  const ProblemConfig& pc = rc.problem;
  std::cout << std::setprecision(12);
  try {
    const double ms = m_star(pc);
    std::cout << "M* = " << ms << "\nrecommended M = " << static_cast<int>(std::ceil(ms - 1e-12))
              << " (minimum), auto M = " << auto_truncation(pc) << "\n";
  } catch (const NotApplicable& e) {
    std::cout << "M* = not applicable (" << e.what() << ")\n";
  }
  if (rc.M) std::cout << "configured M = " << *rc.M << "\n";
  const auto rw = rayleigh_wood_distance(pc);
  std::cout << "delta+ = " << rw.delta_plus << " (n = " << rw.n_plus << ")\n"
            << "delta- = " << rw.delta_minus << " (n = " << rw.n_minus << ")\n"
            << "delta = " << rw.delta << (rw.near_anomaly ? "  near a Rayleigh-Wood anomaly" : "") << "\n";
  const auto nt = check_non_trapping(pc);
  std::cout << "non-trapping: " << (nt.satisfied ? "satisfied" : "violated")
            << (nt.monotonicity_applicable ? "" : " (monotonicity not applicable)") << "\n";
  for (const auto& v : nt.violations) std::cout << "  violation: " << v << "\n";
  for (const auto& w : nt.warnings) std::cout << "  warning: " << w << "\n";
  const auto mesh = build_mesh(rc);
  std::cout << "mesh: " << mesh->num_elements() << " elements, max diameter " << mesh->max_diameter() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plane-wave Trefftz DG solver for periodic gratings"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--set", opt.overrides, "override, e.g. --set p=12 --set physics.theta=-pi/4");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* solve_cmd = app.add_subcommand("solve", "assemble and solve one case");
  auto* sweep_cmd = app.add_subcommand("sweep", "run the configured convergence study");
  auto* modes_cmd = app.add_subcommand("modes", "guided modes of the reference slab");
  auto* check_cmd = app.add_subcommand("check", "truncation, anomaly and non-trapping diagnostics");
  auto* eff_cmd = app.add_subcommand("efficiencies", "solve and report diffraction efficiencies");
  for (auto* s : {solve_cmd, sweep_cmd, modes_cmd, check_cmd, eff_cmd}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  Eigen::setNbThreads(opt.threads);

  try {
    if (*solve_cmd) return cmd_solve(opt, false);
    if (*sweep_cmd) return cmd_sweep(opt);
    if (*modes_cmd) return cmd_modes(opt);
    if (*check_cmd) return cmd_check(opt);
    if (*eff_cmd) return cmd_solve(opt, true);
  } catch (const ConfigError& e) {
    std::cerr << "error [" << e.kind() << "]: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error [" << e.kind() << "]: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error [ConfigError]: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error [" << e.kind() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

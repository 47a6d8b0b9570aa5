#include "tdg/analysis.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>

#include <boost/math/special_functions/legendre.hpp>

namespace tdg {

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw DomainError("quadrature order must be >= 1");
  static std::mutex cache_mutex;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) {
      nodes = it->second.first;
      weights = it->second.second;
      return;
    }
  }
  // boost returns the non-negative zeros of P_n in increasing order
  const std::vector<double> z = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> x, w;
  for (auto it = z.rbegin(); it != z.rend(); ++it) {
    if (*it == 0.0) continue;
    x.push_back(-*it);
  }
  if (n % 2 == 1) x.push_back(0.0);
  for (double r : z)
    if (r != 0.0) x.push_back(r);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double dp = boost::math::legendre_p_prime(n, x[i]);
    const double wi = 2.0 / ((1.0 - x[i] * x[i]) * dp * dp);
    nodes[i] = 0.5 * (x[i] + 1.0);
    weights[i] = 0.5 * wi;
  }
  std::lock_guard<std::mutex> lock(cache_mutex);
  cache[n] = {nodes, weights};
}

QuadRule duffy_quadrature(const Vec2& a, const Vec2& b, const Vec2& c, int order) {
  std::vector<double> x, w;
  gauss_legendre_01(order, x, w);
  const Vec2 e1 = b - a;
  const Vec2 e2 = c - b;
  const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  QuadRule q;
  q.points.reserve(order * order);
  q.weights.reserve(order * order);
  for (int i = 0; i < order; ++i) {
    for (int j = 0; j < order; ++j) {
      const double u = x[i], v = x[j];
      q.points.push_back(a + u * e1 + u * v * e2);
      q.weights.push_back(w[i] * w[j] * u * jac);
    }
  }
  return q;
}

QuadRule element_quadrature(const Mesh& mesh, int e, int order) {
  const auto pts = mesh.element_points(e);
  if (pts.size() == 3) return duffy_quadrature(pts[0], pts[1], pts[2], order);
  const Vec2 c = mesh.centroid(e);
  QuadRule q;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const QuadRule t = duffy_quadrature(c, pts[i], pts[(i + 1) % pts.size()], order);
    q.points.insert(q.points.end(), t.points.begin(), t.points.end());
    q.weights.insert(q.weights.end(), t.weights.begin(), t.weights.end());
  }
  return q;
}

ErrorReport error_norms(const Mesh& mesh, const FieldEvaluator& u, const FieldEvaluator& ref,
                        int quad_order, std::string reference) {
  double e0 = 0.0, e1 = 0.0, r0 = 0.0, r1 = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const QuadRule q = element_quadrature(mesh, e, quad_order);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const FieldSample a = u(q.points[i], e);
      const FieldSample b = ref(q.points[i], e);
      const double w = q.weights[i];
      e0 += w * std::norm(a.value - b.value);
      e1 += w * (a.grad - b.grad).squaredNorm();
      r0 += w * std::norm(b.value);
      r1 += w * b.grad.squaredNorm();
    }
  }
  ErrorReport r;
  r.quad_order = quad_order;
  r.reference = std::move(reference);
  r.l2_abs = std::sqrt(e0);
  r.h1_abs = std::sqrt(e0 + e1);
  r.ref_l2 = std::sqrt(r0);
  r.ref_h1 = std::sqrt(r0 + r1);
  r.l2_rel = r.ref_l2 > 0.0 ? r.l2_abs / r.ref_l2 : r.l2_abs;
  r.h1_rel = r.ref_h1 > 0.0 ? r.h1_abs / r.ref_h1 : r.h1_abs;
  return r;
}

FieldEvaluator solution_evaluator(const DiscreteSolution& sol) {
  return [&sol](const Vec2& x, int e) -> FieldSample {
    FieldValue v;
    if (e >= 0 && e < sol.mesh().num_elements() && sol.mesh().element_contains(e, x, 1e-10))
      v = sol.eval_in(e, x);
    else
      v = sol.eval(x);
    return {v.value, v.grad};
  };
}

ErrorReport error_norms(const DiscreteSolution& sol, const FieldEvaluator& ref, int quad_order,
                        std::string reference) {
  auto u = [&sol](const Vec2& x, int e) -> FieldSample {
    const FieldValue v = sol.eval_in(e, x);
    return {v.value, v.grad};
  };
  return error_norms(sol.mesh(), u, ref, quad_order, std::move(reference));
}

std::vector<Complex> solution_trace_coeffs(const DiscreteSolution& sol, const SpectralLadder& ladder,
                                           Boundary side) {
  const Mesh& mesh = sol.mesh();
  const FaceKind kind = side == Boundary::Top ? FaceKind::Top : FaceKind::Bottom;
  CVector u = CVector::Zero(ladder.size());
  for (int f : mesh.faces_of_kind(kind)) {
    const int e = mesh.face(f).elements[0];
    const FaceGeometry g = mesh.face_geometry(f);
    const PlaneWaveSpace& s = sol.basis().space(e);
    const CMatrix C = trace_fourier_coeffs(s, g.a, g.b, ladder);
    u += C * sol.coeffs().segment(sol.basis().offset(e), s.p());
  }
  return std::vector<Complex>(u.data(), u.data() + u.size());
}

Efficiencies diffraction_efficiencies(const DiscreteSolution& sol, const SpectralLadder& ladder) {
  const ProblemConfig& cfg = sol.config();
  const double b0 = cfg.beta0();
  if (!(b0 > 1e-14 * cfg.kappa_plus()))
    throw DegenerateIncidence("beta_0^+ = 0: grazing incidence carries no energy flux");
  std::vector<Complex> top = solution_trace_coeffs(sol, ladder, Boundary::Top);
  const std::vector<Complex> bot = solution_trace_coeffs(sol, ladder, Boundary::Bottom);
  top[ladder.M] -= std::exp(-kI * b0 * sol.mesh().H());
  Efficiencies eff;
  for (int n = -ladder.M; n <= ladder.M; ++n) {
    const double bp = ladder.beta_plus(n).real();
    const double bm = ladder.beta_minus(n).real();
    if (bp > 0.0) {
      const double v = bp / b0 * std::norm(top[n + ladder.M]);
      eff.reflected.push_back({n, v});
      eff.total_reflected += v;
    }
    if (bm > 0.0) {
      const double v = bm / b0 * std::norm(bot[n + ladder.M]);
      eff.transmitted.push_back({n, v});
      eff.total_transmitted += v;
    }
  }
  eff.total = eff.total_reflected + eff.total_transmitted;
  return eff;
}

TdgSystem assemble(const Discretization& disc, std::shared_ptr<const GlobalBasis>* basis_out,
                   SpectralLadder* ladder_out) {
  auto basis = std::make_shared<const GlobalBasis>(*disc.mesh, disc.p, disc.rotation);
  SpectralLadder ladder = build_ladder(disc.config, disc.M);
  TdgSystem sys = assemble_system(*disc.mesh, *basis, ladder, disc.config, disc.convention);
  if (basis_out) *basis_out = basis;
  if (ladder_out) *ladder_out = std::move(ladder);
  return sys;
}

SolveOutcome solve_discretization(const Discretization& disc) {
  const auto t0 = std::chrono::steady_clock::now();
  std::shared_ptr<const GlobalBasis> basis;
  SpectralLadder ladder;
  const TdgSystem sys = assemble(disc, &basis, &ladder);
  DiscreteSolution sol = solve(sys, disc.mesh, basis, disc.config, disc.solve_options);
  const auto t1 = std::chrono::steady_clock::now();
  return {std::move(sol), std::move(ladder), std::chrono::duration<double>(t1 - t0).count()};
}

std::shared_ptr<const DiscreteSolution> refined_solution(const Discretization& disc, int p_ref,
                                                         const std::string& cache_file) {
  Discretization ref = disc;
  ref.p = p_ref;
  if (!cache_file.empty() && std::filesystem::exists(cache_file)) {
    auto basis = std::make_shared<const GlobalBasis>(*ref.mesh, ref.p, ref.rotation);
    std::ifstream in(cache_file);
    CVector c = read_coefficients(in, basis->size());
    return std::make_shared<const DiscreteSolution>(ref.mesh, basis, ref.config, std::move(c));
  }
  SolveOutcome out = solve_discretization(ref);
  auto sol = std::make_shared<const DiscreteSolution>(std::move(out.solution));
  if (!cache_file.empty()) {
    std::ofstream f(cache_file);
    if (!f) throw InvalidInput("cannot write reference file '" + cache_file + "'");
    write_coefficients(f, *sol);
  }
  return sol;
}

FieldEvaluator shared_solution_evaluator(std::shared_ptr<const DiscreteSolution> sol) {
  FieldEvaluator inner = solution_evaluator(*sol);
  return [sol, inner](const Vec2& x, int e) { return inner(x, e); };
}

ConvergenceTable run_convergence(const std::string& variable, const std::vector<double>& values,
                                 const CaseBuilder& build, const ReferenceProvider& reference,
                                 int quad_order, const std::function<void(const ConvergenceRow&)>& on_row) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    const bool inc = values[1] > values[0];
    if (inc ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1]))
      throw DomainError("sweep values must be strictly monotone");
  }
  ConvergenceTable table;
  table.variable = variable;
  for (double v : values) {
    const Discretization disc = build(v);
    SolveOutcome out = solve_discretization(disc);
    const FieldEvaluator ref = reference(disc);
    const ErrorReport err = error_norms(out.solution, ref, quad_order);
    ConvergenceRow row;
    row.value = v;
    row.l2_rel = err.l2_rel;
    row.h1_rel = err.h1_rel;
    row.l2_abs = err.l2_abs;
    row.h1_abs = err.h1_abs;
    row.cond = out.solution.condition_estimate;
    row.seconds = out.seconds;
    row.N = out.solution.basis().size();
    table.rows.push_back(row);
    if (on_row) on_row(row);
  }
  return table;
}

void write_convergence_row(std::ostream& out, const ConvergenceRow& row, bool with_timing) {
  out << std::setprecision(10) << row.value << "," << std::setprecision(6) << std::scientific << row.l2_rel
      << "," << row.h1_rel << "," << row.cond << ",";
  if (with_timing) out << std::fixed << std::setprecision(3) << row.seconds;
  out << std::defaultfloat << "\n";
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table, bool with_timing) {
  out << "sweep,l2_rel,h1_rel,cond,seconds\n";
  for (const auto& r : table.rows) write_convergence_row(out, r, with_timing);
}

double log_linear_slope(const std::vector<double>& values, const std::vector<double>& errors) {
  const std::size_t n = std::min(values.size(), errors.size());
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = values[i], y = std::log10(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  return den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

int plateau_index(const std::vector<double>& errors, double tol) {
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i - 1] <= 0.0) return static_cast<int>(i);
    if ((errors[i - 1] - errors[i]) / errors[i - 1] < tol) return static_cast<int>(i);
  }
  return -1;
}

int settle_index(const std::vector<double>& errors, double factor) {
  if (errors.empty()) return -1;
  int idx = static_cast<int>(errors.size()) - 1;
  double tail_min = errors.back();
  double tail_max = errors.back();
  for (int i = idx - 1; i >= 0; --i) {
    const double lo = std::min(tail_min, errors[i]);
    const double hi = std::max(tail_max, errors[i]);
    if (hi > factor * lo) break;
    tail_min = lo;
    tail_max = hi;
    idx = i;
  }
  return idx;
}

ExtendedDomainReport extended_domain_check(const Discretization& base, int factor, int quad_order) {
  if (factor < 2) throw DomainError("extended_domain_check: factor must be >= 2");
  ExtendedDomainReport rep;
  rep.factor = factor;
  const SolveOutcome b = solve_discretization(base);
  rep.base_seconds = b.seconds;

  Discretization ext = base;
  ext.config.L = factor * base.config.L;
  ext.mesh = std::make_shared<const Mesh>(replicate_periodic(*base.mesh, factor));
  ext.M = factor * base.M;
  const SolveOutcome x = solve_discretization(ext);
  rep.extended_seconds = x.seconds;

  const int ne = base.mesh->num_elements();
  const double L = base.config.L;
  const double a0 = base.config.alpha0();
  const DiscreteSolution& bs = b.solution;
  auto continued = [&](const Vec2& pt, int e) -> FieldSample {
    const int copy = e / ne;
    const int local = e % ne;
    const Complex ph = std::exp(kI * a0 * (copy * L));
    const FieldValue v = bs.eval_in(local, pt - Vec2(copy * L, 0.0));
    return {ph * v.value, ph * v.grad};
  };
  const ErrorReport err = error_norms(x.solution, continued, quad_order, "quasi-periodic continuation");
  rep.l2_abs = err.l2_abs;
  rep.l2_rel = err.l2_rel;
  rep.h1_abs = err.h1_abs;
  rep.h1_rel = err.h1_rel;
  return rep;
}

}  // namespace tdg

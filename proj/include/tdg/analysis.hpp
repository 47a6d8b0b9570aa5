#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "tdg/assembly.hpp"
#include "tdg/geometry.hpp"
#include "tdg/oracles.hpp"
#include "tdg/solver.hpp"
#include "tdg/spectral.hpp"

namespace tdg {

struct QuadRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed tensor rule on the triangle (a, b, c): (u, v) -> a + u (b - a) + u v (c - b).
QuadRule duffy_quadrature(const Vec2& a, const Vec2& b, const Vec2& c, int order);

/// Duffy rule on each triangle; polygons are fan-triangulated from the centroid.
QuadRule element_quadrature(const Mesh& mesh, int e, int order);

struct ErrorReport {
  double l2_abs = 0.0, l2_rel = 0.0, h1_abs = 0.0, h1_rel = 0.0;
  double ref_l2 = 0.0, ref_h1 = 0.0;
  int quad_order = 0;
  std::string reference;  // "oracle" or the refined-solution descriptor
};

/// L2 and H1 norms of (u - ref) over the mesh; norms of ref give the relative values.
ErrorReport error_norms(const Mesh& mesh, const FieldEvaluator& u, const FieldEvaluator& ref,
                        int quad_order = 15, std::string reference = "oracle");
ErrorReport error_norms(const DiscreteSolution& sol, const FieldEvaluator& ref, int quad_order = 15,
                        std::string reference = "oracle");

/// Evaluator of a discrete solution; uses the element hint when it contains x.
FieldEvaluator solution_evaluator(const DiscreteSolution& sol);

struct Efficiencies {
  struct Order {
    int n;
    double value;
  };
  std::vector<Order> reflected;
  std::vector<Order> transmitted;
  double total_reflected = 0.0;
  double total_transmitted = 0.0;
  double total = 0.0;
};

/// Fourier coefficients (|n| <= M) of the discrete solution trace on x2 = +-H.
std::vector<Complex> solution_trace_coeffs(const DiscreteSolution& sol, const SpectralLadder& ladder,
                                           Boundary side);

/// Energy fractions Re(beta_n) |u_n|^2 / beta0 of the scattered field on top
/// and of the transmitted field at the bottom. DegenerateIncidence at beta0 = 0.
Efficiencies diffraction_efficiencies(const DiscreteSolution& sol, const SpectralLadder& ladder);

/// Everything needed to assemble and solve one case.
struct Discretization {
  ProblemConfig config;
  std::shared_ptr<const Mesh> mesh;
  int p = 10;
  int M = 0;
  double rotation = 0.0;
  PhaseConvention convention = PhaseConvention::LeftTrial;
  SolveOptions solve_options;
};

struct SolveOutcome {
  DiscreteSolution solution;
  SpectralLadder ladder;
  double seconds = 0.0;
};

TdgSystem assemble(const Discretization& disc, std::shared_ptr<const GlobalBasis>* basis_out = nullptr,
                   SpectralLadder* ladder_out = nullptr);
SolveOutcome solve_discretization(const Discretization& disc);

/// Reference solution of `disc` at p_ref. Loaded from `cache_file` when it
/// exists (ParseError on a size mismatch), otherwise solved and written there.
std::shared_ptr<const DiscreteSolution> refined_solution(const Discretization& disc, int p_ref,
                                                         const std::string& cache_file = "");
/// Like solution_evaluator, but owns the solution.
FieldEvaluator shared_solution_evaluator(std::shared_ptr<const DiscreteSolution> sol);

struct ConvergenceRow {
  double value = 0.0;
  double l2_rel = 0.0, h1_rel = 0.0;
  double l2_abs = 0.0, h1_abs = 0.0;
  double cond = 0.0;
  double seconds = 0.0;
  int N = 0;
};

struct ConvergenceTable {
  std::string variable;  // p | M | h | theta
  std::vector<ConvergenceRow> rows;
};

using CaseBuilder = std::function<Discretization(double value)>;
using ReferenceProvider = std::function<FieldEvaluator(const Discretization& disc)>;

/// Assemble, solve and measure for every sweep value (strictly monotone).
/// `on_row` is called after each row, e.g. to flush partial results.
ConvergenceTable run_convergence(const std::string& variable, const std::vector<double>& values,
                                 const CaseBuilder& build, const ReferenceProvider& reference,
                                 int quad_order = 15,
                                 const std::function<void(const ConvergenceRow&)>& on_row = {});

/// Header "sweep,l2_rel,h1_rel,cond,seconds".
void write_convergence_csv(std::ostream& out, const ConvergenceTable& table, bool with_timing = true);
void write_convergence_row(std::ostream& out, const ConvergenceRow& row, bool with_timing = true);

/// Least-squares slope of log10(error) against the sweep value.
double log_linear_slope(const std::vector<double>& values, const std::vector<double>& errors);

/// First index i >= 1 where the error improves by less than `tol` relative to
/// entry i-1; -1 if there is none.
int plateau_index(const std::vector<double>& errors, double tol = 0.05);

/// First index from which every later error stays within `factor` times the
/// smallest error of that tail; -1 for an empty list.
int settle_index(const std::vector<double>& errors, double factor = 1.05);

struct ExtendedDomainReport {
  int factor = 0;
  double l2_abs = 0.0, l2_rel = 0.0, h1_abs = 0.0, h1_rel = 0.0;
  double base_seconds = 0.0, extended_seconds = 0.0;
};

/// Solves on (0, factor L) x (-H, H) with M' = factor M and compares with the
/// base solution continued by u(x1 + L, x2) = e^{i alpha0 L} u(x1, x2).
ExtendedDomainReport extended_domain_check(const Discretization& base, int factor, int quad_order = 15);

}  // namespace tdg

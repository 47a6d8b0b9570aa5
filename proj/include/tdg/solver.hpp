#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "tdg/assembly.hpp"
#include "tdg/basis.hpp"
#include "tdg/geometry.hpp"
#include "tdg/problem.hpp"

namespace tdg {

/// Systems with N <= dense_threshold are factored densely, larger ones with
/// a sparse LU on the matrix with the DtN blocks folded in.
inline constexpr int kDefaultDenseThreshold = 128;

struct SolveOptions {
  int dense_threshold = kDefaultDenseThreshold;
  bool estimate_condition = true;
};

struct LinearSolveResult {
  CVector x;
  double condition_estimate = 0.0;  // 1-norm estimate, 0 if not requested
  double backward_error = 0.0;      // ||Ax - b|| / (||A|| ||x|| + ||b||), 1-norms
  double matrix_norm1 = 0.0;
  bool dense = true;
  std::vector<std::string> warnings;
};

/// Throws InvalidInput for non-finite entries and SingularSystem for an
/// exactly singular factorization.
LinearSolveResult solve_linear(const TdgSystem& system, const SolveOptions& options = {});
LinearSolveResult solve_dense(const CMatrix& A, const CVector& b, bool estimate_condition = true);
LinearSolveResult solve_sparse(const SparseMatrix& A, const CVector& b, bool estimate_condition = true);

enum class PointStatus { Inside, InObstacle, OutsideDomain };

struct FieldValue {
  Complex value{0.0, 0.0};
  CVec2 grad = CVec2::Zero();
  int element = -1;
  PointStatus status = PointStatus::OutsideDomain;
};

/// Coefficients over a plane-wave basis, with what is needed to evaluate them.
class DiscreteSolution {
 public:
  DiscreteSolution(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const GlobalBasis> basis,
                   ProblemConfig config, CVector coeffs);

  const Mesh& mesh() const { return *mesh_; }
  const GlobalBasis& basis() const { return *basis_; }
  const ProblemConfig& config() const { return config_; }
  const CVector& coeffs() const { return coeffs_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  std::shared_ptr<const GlobalBasis> basis_ptr() const { return basis_; }

  /// Value and gradient of the element-e expansion at x (no location check).
  FieldValue eval_in(int e, const Vec2& x) const;
  /// Locates x (lowest element id wins on faces) and evaluates there.
  FieldValue eval(const Vec2& x) const;
  std::vector<FieldValue> eval_field(const std::vector<Vec2>& points) const;

  double condition_estimate = 0.0;
  double backward_error = 0.0;
  bool dense = true;
  std::vector<std::string> warnings;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const GlobalBasis> basis_;
  ProblemConfig config_;
  CVector coeffs_;
};

DiscreteSolution solve(const TdgSystem& system, std::shared_ptr<const Mesh> mesh,
                       std::shared_ptr<const GlobalBasis> basis, const ProblemConfig& config,
                       const SolveOptions& options = {});

/// Grid export: a "# grid nx ny x0 x1 y0 y1" line, the header "x1 x2 re im abs",
/// then one row per point (nan outside the domain).
void write_field_grid(std::ostream& out, const DiscreteSolution& sol, int nx, int ny);

/// Coefficient file: "tdgcoeffs 1", "N p", then N lines "re im".
void write_coefficients(std::ostream& out, const DiscreteSolution& sol);
CVector read_coefficients(std::istream& in, int expected_size);

}  // namespace tdg

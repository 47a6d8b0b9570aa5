#include "tdg/solver.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SparseLU>

namespace tdg {

namespace {

double norm1(const CVector& v) { return v.cwiseAbs().sum(); }

double matrix_norm1(const CMatrix& A) { return A.cwiseAbs().colwise().sum().maxCoeff(); }

double matrix_norm1(const SparseMatrix& A) {
  double m = 0.0;
  for (int c = 0; c < A.outerSize(); ++c) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) s += std::abs(it.value());
    m = std::max(m, s);
  }
  return m;
}

bool all_finite(const CVector& v) {
  for (int i = 0; i < v.size(); ++i)
    if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
  return true;
}

// Hager / Higham estimate of ||A^{-1}||_1 from solves with A and A^H.
template <class Solve, class SolveAdj>
double inverse_norm1_estimate(int n, Solve solve, SolveAdj solve_adj) {
  if (n == 0) return 0.0;
  CVector x = CVector::Constant(n, Complex(1.0 / n, 0.0));
  double est = 0.0;
  int last_j = -1;
  for (int iter = 0; iter < 5; ++iter) {
    const CVector y = solve(x);
    const double ny = norm1(y);
    if (iter > 0 && ny <= est) {
      est = std::max(est, ny);
      break;
    }
    est = ny;
    CVector xi(n);
    for (int i = 0; i < n; ++i) xi(i) = std::abs(y(i)) > 0.0 ? y(i) / std::abs(y(i)) : Complex(1.0, 0.0);
    const CVector z = solve_adj(xi);
    int j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= std::real(z.dot(x)) || j == last_j) break;
    last_j = j;
    x.setZero();
    x(j) = 1.0;
  }
  CVector b(n);
  for (int i = 0; i < n; ++i)
    b(i) = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + (n > 1 ? double(i) / (n - 1) : 0.0));
  const double alt = 2.0 * norm1(solve(b)) / (3.0 * n);
  return std::max(est, alt);
}

void finish(LinearSolveResult& r, double anorm, const CVector& residual, const CVector& b) {
  r.matrix_norm1 = anorm;
  const double denom = anorm * norm1(r.x) + norm1(b);
  r.backward_error = denom > 0.0 ? norm1(residual) / denom : 0.0;
  if (!all_finite(r.x)) throw SingularSystem("solution contains non-finite values");
  if (r.condition_estimate > 1e14) {
    std::ostringstream os;
    os << "condition estimate " << std::scientific << std::setprecision(3) << r.condition_estimate
       << " exceeds 1e14";
    r.warnings.push_back(os.str());
  }
  if (r.backward_error >= 1e-10) {
    std::ostringstream os;
    os << "backward error " << std::scientific << std::setprecision(3) << r.backward_error
       << " above 1e-10";
    r.warnings.push_back(os.str());
  }
}

}  // namespace

LinearSolveResult solve_dense(const CMatrix& A, const CVector& b, bool estimate_condition) {
  if (A.rows() != A.cols() || A.rows() != b.size()) throw InvalidInput("dimension mismatch");
  if (!A.allFinite() || !all_finite(b)) throw InvalidInput("matrix or right-hand side has NaN/Inf");
  LinearSolveResult r;
  r.dense = true;
  const int n = static_cast<int>(A.rows());
  Eigen::PartialPivLU<CMatrix> lu(A);
  const auto diag = lu.matrixLU().diagonal();
  for (int i = 0; i < n; ++i)
    if (diag(i) == Complex(0.0, 0.0)) throw SingularSystem("zero pivot in dense LU");
  r.x = lu.solve(b);
  const double anorm = matrix_norm1(A);
  if (estimate_condition) {
    const double inv = inverse_norm1_estimate(
        n, [&](const CVector& v) { return CVector(lu.solve(v)); },
        [&](const CVector& v) { return CVector(lu.adjoint().solve(v)); });
    r.condition_estimate = anorm * inv;
  }
  finish(r, anorm, A * r.x - b, b);
  return r;
}

LinearSolveResult solve_sparse(const SparseMatrix& A, const CVector& b, bool estimate_condition) {
  if (A.rows() != A.cols() || A.rows() != b.size()) throw InvalidInput("dimension mismatch");
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it)
      if (!std::isfinite(it.value().real()) || !std::isfinite(it.value().imag()))
        throw InvalidInput("matrix has NaN/Inf");
  if (!all_finite(b)) throw InvalidInput("right-hand side has NaN/Inf");
  LinearSolveResult r;
  r.dense = false;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw SingularSystem("sparse LU failed: " + lu.lastErrorMessage());
  r.x = lu.solve(b);
  const double anorm = matrix_norm1(A);
  if (estimate_condition) {
    const int n = static_cast<int>(A.rows());
    const double inv = inverse_norm1_estimate(
        n, [&](const CVector& v) { return CVector(lu.solve(v)); },
        [&](const CVector& v) { return CVector(lu.adjoint().solve(v)); });
    r.condition_estimate = anorm * inv;
  }
  finish(r, anorm, A * r.x - b, b);
  return r;
}

LinearSolveResult solve_linear(const TdgSystem& system, const SolveOptions& options) {
  if (system.N <= options.dense_threshold)
    return solve_dense(system.dense(), system.rhs, options.estimate_condition);
  return solve_sparse(system.matrix(), system.rhs, options.estimate_condition);
}

DiscreteSolution::DiscreteSolution(std::shared_ptr<const Mesh> mesh,
                                   std::shared_ptr<const GlobalBasis> basis, ProblemConfig config,
                                   CVector coeffs)
    : mesh_(std::move(mesh)), basis_(std::move(basis)), config_(std::move(config)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != basis_->size())
    throw InvalidInput("coefficient vector length does not match the basis");
}

FieldValue DiscreteSolution::eval_in(int e, const Vec2& x) const {
  FieldValue v;
  v.element = e;
  v.status = PointStatus::Inside;
  const PlaneWaveSpace& s = basis_->space(e);
  const int off = basis_->offset(e);
  for (int j = 0; j < s.p(); ++j) {
    const Complex c = coeffs_(off + j);
    if (c == Complex(0.0, 0.0)) continue;
    const Complex phi = s.eval(j, x);
    v.value += c * phi;
    const Complex g = c * kI * s.kappa * phi;
    v.grad(0) += g * s.directions[j].x();
    v.grad(1) += g * s.directions[j].y();
  }
  return v;
}

FieldValue DiscreteSolution::eval(const Vec2& x) const {
  const int e = mesh_->locate(x, 1e-12);
  if (e < 0) {
    FieldValue v;
    v.status = config_.in_obstacle(x, 0.0) ? PointStatus::InObstacle : PointStatus::OutsideDomain;
    return v;
  }
  return eval_in(e, x);
}

std::vector<FieldValue> DiscreteSolution::eval_field(const std::vector<Vec2>& points) const {
  std::vector<FieldValue> out;
  out.reserve(points.size());
  for (const Vec2& x : points) out.push_back(eval(x));
  return out;
}

DiscreteSolution solve(const TdgSystem& system, std::shared_ptr<const Mesh> mesh,
                       std::shared_ptr<const GlobalBasis> basis, const ProblemConfig& config,
                       const SolveOptions& options) {
  LinearSolveResult r = solve_linear(system, options);
  DiscreteSolution sol(std::move(mesh), std::move(basis), config, std::move(r.x));
  sol.condition_estimate = r.condition_estimate;
  sol.backward_error = r.backward_error;
  sol.dense = r.dense;
  sol.warnings = std::move(r.warnings);
  return sol;
}

void write_field_grid(std::ostream& out, const DiscreteSolution& sol, int nx, int ny) {
  if (nx < 2 || ny < 2) throw DomainError("field grid needs at least 2 x 2 points");
  const double L = sol.mesh().L();
  const double H = sol.mesh().H();
  out << "# grid " << nx << " " << ny << " 0 " << std::setprecision(17) << L << " " << -H << " " << H << "\n";
  out << "x1 x2 re im abs\n";
  for (int j = 0; j < ny; ++j) {
    const double y = -H + 2.0 * H * j / (ny - 1);
    for (int i = 0; i < nx; ++i) {
      const double x = L * i / (nx - 1);
      const FieldValue v = sol.eval(Vec2(x, y));
      out << x << " " << y << " ";
      if (v.status == PointStatus::Inside)
        out << v.value.real() << " " << v.value.imag() << " " << std::abs(v.value) << "\n";
      else
        out << "nan nan nan\n";
    }
  }
}

void write_coefficients(std::ostream& out, const DiscreteSolution& sol) {
  const int p = sol.basis().num_elements() > 0 ? sol.basis().space(0).p() : 0;
  out << "tdgcoeffs 1\n" << sol.coeffs().size() << " " << p << "\n" << std::setprecision(17);
  for (int i = 0; i < sol.coeffs().size(); ++i)
    out << sol.coeffs()(i).real() << " " << sol.coeffs()(i).imag() << "\n";
}

CVector read_coefficients(std::istream& in, int expected_size) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "tdgcoeffs" || version != 1)
    throw ParseError("coefficient file must start with 'tdgcoeffs 1'");
  long n = 0, p = 0;
  if (!(in >> n >> p)) throw ParseError("coefficient file: missing size line");
  if (expected_size >= 0 && n != expected_size)
    throw ParseError("coefficient file has " + std::to_string(n) + " entries, expected " +
                     std::to_string(expected_size));
  CVector c(n);
  for (long i = 0; i < n; ++i) {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im)) throw ParseError("coefficient file truncated at entry " + std::to_string(i));
    c(i) = Complex(re, im);
  }
  return c;
}

}  // namespace tdg

#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Sparse>

#include "tdg/basis.hpp"
#include "tdg/common.hpp"
#include "tdg/geometry.hpp"
#include "tdg/problem.hpp"
#include "tdg/spectral.hpp"

namespace tdg {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

/// Where the quasi-periodicity phase is applied on periodic faces.
/// LeftTrial: functions of the element at x1 = 0 are continued to x1 = L,
/// carrying e^{i alpha0 L}. RightTrial: functions of the element at x1 = L are
/// continued to x1 = 0 with e^{-i alpha0 L}. Both give the same matrix.
enum class PhaseConvention { LeftTrial, RightTrial };

// Matrix convention: block(j, l) = A(phi_l, phi_j), rows index test functions.
// The test function of phi_j = exp(i kappa d_j.x) is psi_j = exp(-i kappa d_j.x),
// which is conj(phi_j) whenever kappa is real.

/// Same-element contribution of an interior or periodic face; n points out of
/// the element.
CMatrix same_element_block(const PlaneWaveSpace& s, const Vec2& a, const Vec2& b, const Vec2& n,
                           double xi, const FluxParameters& flux);

/// Trial functions on `trial`, test functions on `test`, across [a, b]; n points
/// out of the trial element. A function shifted by t is the quasi-periodic
/// continuation x -> e^{i alpha0 t1} phi(x - t).
CMatrix cross_block(const PlaneWaveSpace& trial, const PlaneWaveSpace& test, const Vec2& a,
                    const Vec2& b, const Vec2& n, double xi, const FluxParameters& flux,
                    const Vec2& trial_shift = Vec2::Zero(), const Vec2& test_shift = Vec2::Zero(),
                    double alpha0 = 0.0);

/// The four p x p blocks of an Interior or PeriodicPair face. bRC holds test
/// functions of element R and trial functions of element C, where 1 and 2 are
/// face.elements[0] and face.elements[1].
struct FaceBlocks {
  CMatrix b11, b12, b21, b22;
};

FaceBlocks assemble_interior_face(const Mesh& mesh, const GlobalBasis& basis, int face,
                                  const FluxParameters& flux, double alpha0,
                                  PhaseConvention convention = PhaseConvention::LeftTrial);

CMatrix assemble_dirichlet_face(const Mesh& mesh, const GlobalBasis& basis, int face,
                                const FluxParameters& flux);

/// Local part of a face on x2 = +-H: -i kappa (d_j.n)(1 + d d_l.n) S(kappa(d_l - d_j)).
CMatrix dtn_local_block(const PlaneWaveSpace& s, const Vec2& a, const Vec2& b, Boundary side,
                        const FluxParameters& flux);

/// (2M+1) x p matrix of trace Fourier coefficients phi_l^n on a horizontal face
/// [a, b] lying on x2 = +-H.
CMatrix trace_fourier_coeffs(const PlaneWaveSpace& s, const Vec2& a, const Vec2& b,
                             const SpectralLadder& ladder);

/// (2M+1) x p matrix of (1/L) int e^{i alpha_n x1} psi_j dx1 over [a, b].
CMatrix test_fourier_coeffs(const PlaneWaveSpace& s, const Vec2& a, const Vec2& b,
                            const SpectralLadder& ladder);

/// Factored global DtN coupling on one artificial boundary:
/// G(j,l) = L sum_n Psi(n,j) Phi(n,l) [-i(1 - d c_j) beta_n + i d c_l conj(beta_n)
///                                     - i (d / kappa) |beta_n|^2],  c = d.n.
struct DtnCoupling {
  Boundary side = Boundary::Top;
  int M = 0;
  double L = 0.0;
  double d = 0.5;
  Complex kappa;
  std::vector<int> dofs;
  Eigen::VectorXd normal_dot;
  CMatrix trial;  // Phi, (2M+1) x dofs
  CMatrix test;   // Psi, (2M+1) x dofs
  CVector beta;

  int size() const { return static_cast<int>(dofs.size()); }
  CMatrix block() const;
  void add_triplets(std::vector<Triplet>& out) const;
  void add_to(CMatrix& A) const;
  /// y += G x on the full index space.
  void apply_add(const CVector& x, CVector& y) const;
};

struct TdgSystem {
  int N = 0;
  int M = 0;
  SparseMatrix sparse_part;
  DtnCoupling top;
  DtnCoupling bottom;
  CVector rhs;

  SparseMatrix matrix() const;
  CMatrix dense() const;
  CVector apply(const CVector& x) const;
};

DtnCoupling assemble_dtn_boundary(const Mesh& mesh, const GlobalBasis& basis,
                                  const SpectralLadder& ladder, Boundary side,
                                  const FluxParameters& flux);

CVector assemble_rhs(const Mesh& mesh, const GlobalBasis& basis, const SpectralLadder& ladder,
                     const ProblemConfig& config);

TdgSystem assemble_system(const Mesh& mesh, const GlobalBasis& basis, const SpectralLadder& ladder,
                          const ProblemConfig& config,
                          PhaseConvention convention = PhaseConvention::LeftTrial);

/// Coordinate dump: header "N nnz", then one "row col re im" line per entry.
void write_matrix(std::ostream& out, const SparseMatrix& A);

}  // namespace tdg

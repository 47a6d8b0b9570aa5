#include "tdg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace tdg {

namespace {

CVec2 to_c(const Vec2& v) { return CVec2(v.x(), v.y()); }

double face_xi(const PlaneWaveSpace& s1, const PlaneWaveSpace& s2) {
  return 0.5 * (s1.kappa.real() + s2.kappa.real());
}

}  // namespace

CMatrix same_element_block(const PlaneWaveSpace& s, const Vec2& a, const Vec2& b, const Vec2& n,
                           double xi, const FluxParameters& flux) {
  const int p = s.p();
  const Complex kap = s.kappa;
  CMatrix B(p, p);
  for (int l = 0; l < p; ++l) {
    const double dln = s.directions[l].dot(n);
    for (int j = 0; j < p; ++j) {
      const double djn = s.directions[j].dot(n);
      const Complex coef = -0.5 * kI * kap * (djn + dln) - kI * flux.b / xi * kap * kap * dln * djn -
                           kI * flux.a * xi;
      const CVec2 w = kap * to_c(s.directions[l] - s.directions[j]);
      B(j, l) = coef * segment_exp_integral(w, a, b);
    }
  }
  return B;
}

CMatrix cross_block(const PlaneWaveSpace& trial, const PlaneWaveSpace& test, const Vec2& a,
                    const Vec2& b, const Vec2& n, double xi, const FluxParameters& flux,
                    const Vec2& trial_shift, const Vec2& test_shift, double alpha0) {
  const int pl = trial.p();
  const int pj = test.p();
  const Complex k1 = trial.kappa;
  const Complex k2 = test.kappa;
  CMatrix B(pj, pl);
  for (int l = 0; l < pl; ++l) {
    const Vec2& dl = trial.directions[l];
    const double dln = dl.dot(n);
    const Complex trial_phase =
        std::exp(kI * (alpha0 * trial_shift.x() - k1 * dl.dot(trial_shift)));
    for (int j = 0; j < pj; ++j) {
      const Vec2& dj = test.directions[j];
      const double djn = dj.dot(n);
      const Complex test_phase = std::exp(kI * (k2 * dj.dot(test_shift) - alpha0 * test_shift.x()));
      const Complex coef = 0.5 * kI * (k2 * djn + k1 * dln) + kI * flux.b / xi * k1 * k2 * dln * djn +
                           kI * flux.a * xi;
      const CVec2 w = k1 * to_c(dl) - k2 * to_c(dj);
      B(j, l) = coef * trial_phase * test_phase * segment_exp_integral(w, a, b);
    }
  }
  return B;
}

FaceBlocks assemble_interior_face(const Mesh& mesh, const GlobalBasis& basis, int face,
                                  const FluxParameters& flux, double alpha0,
                                  PhaseConvention convention) {
  const Face& f = mesh.face(face);
  if (f.kind != FaceKind::Interior && f.kind != FaceKind::PeriodicPair)
    throw DomainError("assemble_interior_face: face is not interior or periodic");
  const PlaneWaveSpace& s1 = basis.space(f.elements[0]);
  const PlaneWaveSpace& s2 = basis.space(f.elements[1]);
  const double xi = face_xi(s1, s2);
  FaceBlocks out;

  if (f.kind == FaceKind::Interior) {
    const FaceGeometry g = mesh.face_geometry(face);
    out.b11 = same_element_block(s1, g.a, g.b, g.normal, xi, flux);
    out.b22 = same_element_block(s2, g.a, g.b, -g.normal, xi, flux);
    out.b21 = cross_block(s1, s2, g.a, g.b, g.normal, xi, flux);
    out.b12 = cross_block(s2, s1, g.a, g.b, -g.normal, xi, flux);
    return out;
  }

  // element 1 sits at x1 = 0, element 2 at x1 = L
  const FaceGeometry gl = mesh.face_geometry(face);
  const FaceGeometry gr = mesh.right_face_geometry(face);
  const Vec2 nl(-1.0, 0.0);
  const Vec2 nr(1.0, 0.0);
  out.b11 = same_element_block(s1, gl.a, gl.b, nl, xi, flux);
  out.b22 = same_element_block(s2, gr.a, gr.b, nr, xi, flux);
  if (convention == PhaseConvention::LeftTrial) {
    const Vec2 t(mesh.L(), 0.0);
    out.b21 = cross_block(s1, s2, gr.a, gr.b, nl, xi, flux, t, Vec2::Zero(), alpha0);
    out.b12 = cross_block(s2, s1, gr.a, gr.b, nr, xi, flux, Vec2::Zero(), t, alpha0);
  } else {
    const Vec2 t(-mesh.L(), 0.0);
    out.b21 = cross_block(s1, s2, gl.a, gl.b, nl, xi, flux, Vec2::Zero(), t, alpha0);
    out.b12 = cross_block(s2, s1, gl.a, gl.b, nr, xi, flux, t, Vec2::Zero(), alpha0);
  }
  return out;
}

CMatrix assemble_dirichlet_face(const Mesh& mesh, const GlobalBasis& basis, int face,
                                const FluxParameters& flux) {
  const Face& f = mesh.face(face);
  if (f.kind != FaceKind::Dirichlet) throw DomainError("assemble_dirichlet_face: not a Dirichlet face");
  const PlaneWaveSpace& s = basis.space(f.elements[0]);
  const FaceGeometry g = mesh.face_geometry(face);
  const int p = s.p();
  CMatrix B(p, p);
  for (int l = 0; l < p; ++l) {
    const Complex coef = kI * s.kappa * (-flux.a - s.directions[l].dot(g.normal));
    for (int j = 0; j < p; ++j) {
      const CVec2 w = s.kappa * to_c(s.directions[l] - s.directions[j]);
      B(j, l) = coef * segment_exp_integral(w, g.a, g.b);
    }
  }
  return B;
}

CMatrix dtn_local_block(const PlaneWaveSpace& s, const Vec2& a, const Vec2& b, Boundary side,
                        const FluxParameters& flux) {
  const Vec2 n(0.0, side == Boundary::Top ? 1.0 : -1.0);
  const int p = s.p();
  CMatrix B(p, p);
  for (int l = 0; l < p; ++l) {
    const double dln = s.directions[l].dot(n);
    for (int j = 0; j < p; ++j) {
      const double djn = s.directions[j].dot(n);
      const CVec2 w = s.kappa * to_c(s.directions[l] - s.directions[j]);
      B(j, l) = -kI * s.kappa * djn * (1.0 + flux.d * dln) * segment_exp_integral(w, a, b);
    }
  }
  return B;
}

namespace {

// (1/L) int_{a1}^{b1} e^{i (w1 - alpha) x1} dx1 * e^{i w2 y}
Complex horizontal_coeff(Complex w1, Complex w2, double alpha, const Vec2& a, const Vec2& b, double L) {
  const CVec2 w(w1 - alpha, 0.0);
  return segment_exp_integral(w, Vec2(a.x(), 0.0), Vec2(b.x(), 0.0)) * std::exp(kI * w2 * a.y()) / L;
}

}  // namespace

CMatrix trace_fourier_coeffs(const PlaneWaveSpace& s, const Vec2& a, const Vec2& b,
                             const SpectralLadder& ladder) {
  const int p = s.p();
  CMatrix C(ladder.size(), p);
  for (int l = 0; l < p; ++l) {
    const Complex w1 = s.kappa * s.directions[l].x();
    const Complex w2 = s.kappa * s.directions[l].y();
    for (int n = -ladder.M; n <= ladder.M; ++n)
      C(n + ladder.M, l) = horizontal_coeff(w1, w2, ladder.alpha(n), a, b, ladder.L);
  }
  return C;
}

CMatrix test_fourier_coeffs(const PlaneWaveSpace& s, const Vec2& a, const Vec2& b,
                            const SpectralLadder& ladder) {
  const int p = s.p();
  CMatrix C(ladder.size(), p);
  for (int j = 0; j < p; ++j) {
    const Complex w1 = -s.kappa * s.directions[j].x();
    const Complex w2 = -s.kappa * s.directions[j].y();
    for (int n = -ladder.M; n <= ladder.M; ++n)
      C(n + ladder.M, j) = horizontal_coeff(w1, w2, -ladder.alpha(n), a, b, ladder.L);
  }
  return C;
}

CMatrix DtnCoupling::block() const {
  const int m = size();
  const int nm = static_cast<int>(beta.size());
  // G = L [ diag(1 - d c) Psi^T diag(-i beta) Phi + Psi^T diag(i d conj beta) Phi diag(c)
  //         + Psi^T diag(-i d |beta|^2 / kappa) Phi ]
  CMatrix w1(nm, m), w2(nm, m), w3(nm, m);
  for (int n = 0; n < nm; ++n) {
    w1.row(n) = (-kI * beta(n)) * trial.row(n);
    w2.row(n) = (kI * d * std::conj(beta(n))) * trial.row(n);
    w3.row(n) = (-kI * d * std::norm(beta(n)) / kappa) * trial.row(n);
  }
  CMatrix G1 = test.transpose() * w1;
  CMatrix G2 = test.transpose() * w2;
  CMatrix G3 = test.transpose() * w3;
  CMatrix G(m, m);
  for (int l = 0; l < m; ++l)
    for (int j = 0; j < m; ++j)
      G(j, l) = L * ((1.0 - d * normal_dot(j)) * G1(j, l) + G2(j, l) * normal_dot(l) + G3(j, l));
  return G;
}

void DtnCoupling::add_triplets(std::vector<Triplet>& out) const {
  if (dofs.empty()) return;
  const CMatrix G = block();
  for (int l = 0; l < size(); ++l)
    for (int j = 0; j < size(); ++j) out.emplace_back(dofs[j], dofs[l], G(j, l));
}

void DtnCoupling::add_to(CMatrix& A) const {
  if (dofs.empty()) return;
  const CMatrix G = block();
  for (int l = 0; l < size(); ++l)
    for (int j = 0; j < size(); ++j) A(dofs[j], dofs[l]) += G(j, l);
}

void DtnCoupling::apply_add(const CVector& x, CVector& y) const {
  if (dofs.empty()) return;
  CVector xs(size()), xc(size());
  for (int i = 0; i < size(); ++i) {
    xs(i) = x(dofs[i]);
    xc(i) = normal_dot(i) * x(dofs[i]);
  }
  const CVector u = trial * xs;   // trace coefficients of the trial combination
  const CVector uc = trial * xc;
  CVector b1(u.size()), a2(u.size()), b3(u.size());
  for (int n = 0; n < u.size(); ++n) {
    b1(n) = -kI * beta(n) * u(n);
    a2(n) = kI * d * std::conj(beta(n)) * uc(n);
    b3(n) = -kI * d * std::norm(beta(n)) / kappa * u(n);
  }
  const CVector r1 = test.transpose() * b1;
  const CVector r2 = test.transpose() * a2;
  const CVector r3 = test.transpose() * b3;
  for (int j = 0; j < size(); ++j)
    y(dofs[j]) += L * ((1.0 - d * normal_dot(j)) * r1(j) + r2(j) + r3(j));
}

DtnCoupling assemble_dtn_boundary(const Mesh& mesh, const GlobalBasis& basis,
                                  const SpectralLadder& ladder, Boundary side,
                                  const FluxParameters& flux) {
  DtnCoupling c;
  c.side = side;
  c.M = ladder.M;
  c.L = ladder.L;
  c.d = flux.d;
  c.kappa = ladder.kappa(side);
  c.beta.resize(ladder.size());
  for (int n = -ladder.M; n <= ladder.M; ++n) c.beta(n + ladder.M) = ladder.beta(side, n);

  const FaceKind kind = side == Boundary::Top ? FaceKind::Top : FaceKind::Bottom;
  const double ny = side == Boundary::Top ? 1.0 : -1.0;
  std::vector<int> elems;
  for (int f : mesh.faces_of_kind(kind)) {
    const int e = mesh.face(f).elements[0];
    if (elems.empty() || elems.back() != e) elems.push_back(e);
  }
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());

  int total = 0;
  for (int e : elems) total += basis.space(e).p();
  c.dofs.resize(total);
  c.normal_dot.resize(total);
  c.trial = CMatrix::Zero(ladder.size(), total);
  c.test = CMatrix::Zero(ladder.size(), total);

  int col = 0;
  for (int e : elems) {
    const PlaneWaveSpace& s = basis.space(e);
    if (std::abs(s.kappa - c.kappa) > 1e-12 * std::abs(c.kappa))
      throw GeometryError("element " + std::to_string(e) + " on the artificial boundary has kappa != kappa" +
                          (side == Boundary::Top ? "+" : "-"));
    for (int f : mesh.element(e).faces) {
      if (mesh.face(f).kind != kind) continue;
      const FaceGeometry g = mesh.face_geometry(f);
      c.trial.middleCols(col, s.p()) += trace_fourier_coeffs(s, g.a, g.b, ladder);
      c.test.middleCols(col, s.p()) += test_fourier_coeffs(s, g.a, g.b, ladder);
    }
    for (int j = 0; j < s.p(); ++j) {
      c.dofs[col + j] = basis.index(e, j);
      c.normal_dot(col + j) = ny * s.directions[j].y();
    }
    col += s.p();
  }
  return c;
}

CVector assemble_rhs(const Mesh& mesh, const GlobalBasis& basis, const SpectralLadder& ladder,
                     const ProblemConfig& config) {
  CVector rhs = CVector::Zero(basis.size());
  const double b0 = config.beta0();
  const Complex kap = ladder.kappa_plus;
  const Complex phase = std::exp(-kI * b0 * mesh.H());
  const double d = config.flux.d;
  // a one-mode ladder is enough: only n = 0 enters
  SpectralLadder l0 = ladder;
  l0.M = 0;
  l0.alphas = {ladder.alpha0};
  l0.betas_plus = {ladder.beta_plus(0)};
  l0.betas_minus = {ladder.beta_minus(0)};
  for (int f : mesh.faces_of_kind(FaceKind::Top)) {
    const int e = mesh.face(f).elements[0];
    const PlaneWaveSpace& s = basis.space(e);
    const FaceGeometry g = mesh.face_geometry(f);
    const CMatrix psi = test_fourier_coeffs(s, g.a, g.b, l0);
    for (int j = 0; j < s.p(); ++j) {
      const double cj = s.directions[j].y();
      rhs(basis.index(e, j)) += -2.0 * kI * b0 * phase * ladder.L * psi(0, j) *
                                ((1.0 - d * cj) + d * b0 / kap);
    }
  }
  return rhs;
}

TdgSystem assemble_system(const Mesh& mesh, const GlobalBasis& basis, const SpectralLadder& ladder,
                          const ProblemConfig& config, PhaseConvention convention) {
  TdgSystem sys;
  sys.N = basis.size();
  sys.M = ladder.M;
  const FluxParameters& flux = config.flux;
  std::vector<Triplet> trip;

  auto add_block = [&](int row_e, int col_e, const CMatrix& B) {
    const int r0 = basis.offset(row_e);
    const int c0 = basis.offset(col_e);
    for (int l = 0; l < B.cols(); ++l)
      for (int j = 0; j < B.rows(); ++j) trip.emplace_back(r0 + j, c0 + l, B(j, l));
  };

  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    switch (face.kind) {
      case FaceKind::Interior:
      case FaceKind::PeriodicPair: {
        const FaceBlocks fb = assemble_interior_face(mesh, basis, f, flux, ladder.alpha0, convention);
        const int e1 = face.elements[0], e2 = face.elements[1];
        add_block(e1, e1, fb.b11);
        add_block(e1, e2, fb.b12);
        add_block(e2, e1, fb.b21);
        add_block(e2, e2, fb.b22);
        break;
      }
      case FaceKind::Dirichlet:
        add_block(face.elements[0], face.elements[0], assemble_dirichlet_face(mesh, basis, f, flux));
        break;
      case FaceKind::Top:
      case FaceKind::Bottom: {
        const FaceGeometry g = mesh.face_geometry(f);
        const Boundary side = face.kind == FaceKind::Top ? Boundary::Top : Boundary::Bottom;
        add_block(face.elements[0], face.elements[0],
                  dtn_local_block(basis.space(face.elements[0]), g.a, g.b, side, flux));
        break;
      }
    }
  }
  sys.sparse_part.resize(sys.N, sys.N);
  sys.sparse_part.setFromTriplets(trip.begin(), trip.end());
  sys.sparse_part.makeCompressed();

  sys.top = assemble_dtn_boundary(mesh, basis, ladder, Boundary::Top, flux);
  sys.bottom = assemble_dtn_boundary(mesh, basis, ladder, Boundary::Bottom, flux);
  sys.rhs = assemble_rhs(mesh, basis, ladder, config);
  return sys;
}

SparseMatrix TdgSystem::matrix() const {
  std::vector<Triplet> trip;
  trip.reserve(sparse_part.nonZeros() + top.size() * top.size() + bottom.size() * bottom.size());
  for (int c = 0; c < sparse_part.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(sparse_part, c); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  top.add_triplets(trip);
  bottom.add_triplets(trip);
  SparseMatrix A(N, N);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

CMatrix TdgSystem::dense() const {
  CMatrix A = CMatrix(sparse_part);
  top.add_to(A);
  bottom.add_to(A);
  return A;
}

CVector TdgSystem::apply(const CVector& x) const {
  CVector y = sparse_part * x;
  top.apply_add(x, y);
  bottom.apply_add(x, y);
  return y;
}

void write_matrix(std::ostream& out, const SparseMatrix& A) {
  out << A.rows() << " " << A.nonZeros() << "\n";
  out << std::setprecision(17);
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it)
      out << it.row() << " " << it.col() << " " << it.value().real() << " " << it.value().imag() << "\n";
}

}  // namespace tdg

#pragma once

#include <vector>

#include "tdg/common.hpp"
#include "tdg/problem.hpp"

namespace tdg {

enum class Boundary { Top, Bottom };

/// alpha_n and beta_n^{+/-} for |n| <= M. Vectors are indexed by n + M.
struct SpectralLadder {
  double alpha0 = 0.0;
  double L = 2.0 * kPi;
  double k = 1.0;
  Complex eps_plus{1.0, 0.0};
  Complex eps_minus{1.0, 0.0};
  Complex kappa_plus;
  Complex kappa_minus;
  int M = 0;
  std::vector<double> alphas;
  std::vector<Complex> betas_plus;
  std::vector<Complex> betas_minus;

  int size() const { return 2 * M + 1; }
  double alpha(int n) const { return alphas[n + M]; }
  Complex beta_plus(int n) const { return betas_plus[n + M]; }
  Complex beta_minus(int n) const { return betas_minus[n + M]; }
  Complex beta(Boundary side, int n) const {
    return side == Boundary::Top ? beta_plus(n) : beta_minus(n);
  }
  Complex kappa(Boundary side) const { return side == Boundary::Top ? kappa_plus : kappa_minus; }
};

/// sqrt(k^2 eps - alpha^2) on the outgoing branch. For real eps the
/// evanescent value is built as i*sqrt(alpha^2 - k^2 eps).
Complex vertical_wavenumber(double alpha, double k, Complex eps);

SpectralLadder build_ladder(const ProblemConfig& config, int M);

/// (L / 2 pi) (max(kappa+, kappa-) + |alpha0|). NotApplicable for complex eps-.
double m_star(const ProblemConfig& config);

/// ceil(M*) + 1, the "auto" truncation order.
int auto_truncation(const ProblemConfig& config);

struct RayleighWoodDistance {
  double delta_plus = 0.0;
  double delta_minus = 0.0;
  double delta = 0.0;
  int n_plus = 0;   // index attaining delta_plus
  int n_minus = 0;  // index attaining delta_minus
  bool near_anomaly = false;  // delta < 1e-8 k
};

/// Minimum of |beta_n^{+/-}| over |n| <= scan. scan < 0 selects 4 ceil(M*)
/// (with |kappa-| in place of kappa- when eps- is complex).
RayleighWoodDistance rayleigh_wood_distance(const ProblemConfig& config, int scan = -1);

struct TraceCoefficients {
  Boundary boundary = Boundary::Top;
  int M = 0;
  std::vector<Complex> coeffs;  // indexed by n + M
  Complex at(int n) const { return coeffs[n + M]; }
};

/// Fourier coefficients of the incident wave on x2 = H.
TraceCoefficients incident_trace_coeffs(const ProblemConfig& config, int M);

/// (2 pi M / L - |alpha0|)^(-t). DomainError if M < M* or t <= 0.
double truncation_error_bound(int M, double s, double t, const ProblemConfig& config);

/// L * sum_n beta_n |w_n|^2 on the chosen boundary; w indexed by n + M.
Complex dtn_pairing(const SpectralLadder& ladder, Boundary side, const std::vector<Complex>& w);

/// Discrete H^s_{alpha0} norm: sqrt(L * sum_n (1 + alpha_n^2)^s |w_n|^2).
double discrete_hs_norm(const SpectralLadder& ladder, const std::vector<Complex>& w, double s);

}  // namespace tdg

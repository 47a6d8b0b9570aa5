#include "tdg/spectral.hpp"

#include <cmath>
#include <limits>

namespace tdg {

Complex vertical_wavenumber(double alpha, double k, Complex eps) {
  if (eps.imag() == 0.0) {
    const double a2 = alpha * alpha;
    const double k2e = k * k * eps.real();
    if (a2 <= k2e) return {std::sqrt(k2e - a2), 0.0};
    return {0.0, std::sqrt(a2 - k2e)};
  }
  return std::sqrt(k * k * eps - alpha * alpha);
}

SpectralLadder build_ladder(const ProblemConfig& config, int M) {
  if (M < 0) throw DomainError("truncation order M must be non-negative");
  SpectralLadder s;
  s.alpha0 = config.alpha0();
  s.L = config.L;
  s.k = config.k;
  s.eps_plus = Complex(config.eps_plus, 0.0);
  s.eps_minus = config.eps_minus;
  s.kappa_plus = config.kappa_plus();
  s.kappa_minus = config.kappa_minus();
  s.M = M;
  const int n_modes = 2 * M + 1;
  s.alphas.resize(n_modes);
  s.betas_plus.resize(n_modes);
  s.betas_minus.resize(n_modes);
  for (int n = -M; n <= M; ++n) {
    const double a = s.alpha0 + 2.0 * kPi * n / config.L;
    s.alphas[n + M] = a;
    s.betas_plus[n + M] = vertical_wavenumber(a, config.k, s.eps_plus);
    s.betas_minus[n + M] = vertical_wavenumber(a, config.k, s.eps_minus);
  }
  // the incident order uses the exact expression so that beta_0^+ = -kappa+ sin(theta)
  s.betas_plus[M] = Complex(config.beta0(), 0.0);
  return s;
}

namespace {

double m_star_value(const ProblemConfig& config, double kappa_minus) {
  return config.L / (2.0 * kPi) * (std::max(config.kappa_plus(), kappa_minus) + std::abs(config.alpha0()));
}

}  // namespace

double m_star(const ProblemConfig& config) {
  if (config.eps_minus.imag() != 0.0)
    throw NotApplicable("M* requires a real eps_minus");
  return m_star_value(config, config.kappa_minus().real());
}

int auto_truncation(const ProblemConfig& config) {
  return static_cast<int>(std::ceil(m_star(config))) + 1;
}

RayleighWoodDistance rayleigh_wood_distance(const ProblemConfig& config, int scan) {
  if (scan < 0) {
    const double ms = m_star_value(config, std::abs(config.kappa_minus()));
    scan = 4 * std::max(1, static_cast<int>(std::ceil(ms)));
  }
  RayleighWoodDistance r;
  r.delta_plus = std::numeric_limits<double>::infinity();
  r.delta_minus = std::numeric_limits<double>::infinity();
  const Complex ep(config.eps_plus, 0.0);
  for (int n = -scan; n <= scan; ++n) {
    const double a = config.alpha0() + 2.0 * kPi * n / config.L;
    const double bp = std::abs(vertical_wavenumber(a, config.k, ep));
    const double bm = std::abs(vertical_wavenumber(a, config.k, config.eps_minus));
    if (bp < r.delta_plus) {
      r.delta_plus = bp;
      r.n_plus = n;
    }
    if (bm < r.delta_minus) {
      r.delta_minus = bm;
      r.n_minus = n;
    }
  }
  r.delta = std::min(r.delta_plus, r.delta_minus);
  r.near_anomaly = r.delta < 1e-8 * config.k;
  return r;
}

TraceCoefficients incident_trace_coeffs(const ProblemConfig& config, int M) {
  if (M < 0) throw DomainError("truncation order M must be non-negative");
  TraceCoefficients t;
  t.boundary = Boundary::Top;
  t.M = M;
  t.coeffs.assign(2 * M + 1, Complex(0.0, 0.0));
  t.coeffs[M] = std::exp(-kI * config.beta0() * config.H);
  return t;
}

double truncation_error_bound(int M, double /*s*/, double t, const ProblemConfig& config) {
  if (!(t > 0.0)) throw DomainError("truncation_error_bound: t must be positive");
  if (M < m_star(config)) throw DomainError("truncation_error_bound: M below M*");
  const double base = 2.0 * kPi * M / config.L - std::abs(config.alpha0());
  return std::pow(base, -t);
}

Complex dtn_pairing(const SpectralLadder& ladder, Boundary side, const std::vector<Complex>& w) {
  Complex s = 0.0;
  for (int n = -ladder.M; n <= ladder.M; ++n) s += ladder.beta(side, n) * std::norm(w[n + ladder.M]);
  return ladder.L * s;
}

double discrete_hs_norm(const SpectralLadder& ladder, const std::vector<Complex>& w, double s) {
  double acc = 0.0;
  for (int n = -ladder.M; n <= ladder.M; ++n)
    acc += std::pow(1.0 + ladder.alpha(n) * ladder.alpha(n), s) * std::norm(w[n + ladder.M]);
  return std::sqrt(ladder.L * acc);
}

}  // namespace tdg

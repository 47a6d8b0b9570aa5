#include "tdg/oracles.hpp"

#include <cmath>

#include <Eigen/LU>

#include "tdg/spectral.hpp"

namespace tdg {

FieldSample incident_wave(const ProblemConfig& config, const Vec2& x) {
  const double kp = config.kappa_plus();
  const Vec2 dir(std::cos(config.theta), std::sin(config.theta));
  const Complex v = std::exp(kI * kp * dir.dot(x));
  return {v, CVec2(kI * kp * dir.x() * v, kI * kp * dir.y() * v)};
}

FieldEvaluator incident_wave_evaluator(const ProblemConfig& config) {
  return [config](const Vec2& x, int) { return incident_wave(config, x); };
}

namespace {

// a e^{i alpha x1} e^{i b x2} with gradient
FieldSample plane(Complex a, double alpha, Complex b, const Vec2& x) {
  const Complex v = a * std::exp(kI * (alpha * x.x() + b * x.y()));
  return {v, CVec2(kI * alpha * v, kI * b * v)};
}

FieldSample add(FieldSample u, const FieldSample& w) {
  u.value += w.value;
  u.grad += w.grad;
  return u;
}

}  // namespace

TwoLayerSolution two_layer(const ProblemConfig& config) {
  TwoLayerSolution s;
  s.alpha0 = config.alpha0();
  s.beta0 = config.beta0();
  s.beta_minus = std::sqrt(config.k * config.k * config.eps_minus - s.alpha0 * s.alpha0);
  s.R = (s.beta0 - s.beta_minus) / (s.beta0 + s.beta_minus);
  s.T = 2.0 * s.beta0 / (s.beta0 + s.beta_minus);
  return s;
}

FieldSample TwoLayerSolution::eval(const Vec2& x) const {
  if (x.y() >= 0.0)
    return add(plane(1.0, alpha0, -beta0, x), plane(R, alpha0, beta0, x));
  return plane(T, alpha0, -beta_minus, x);
}

FieldEvaluator two_layer_evaluator(const ProblemConfig& config) {
  const TwoLayerSolution s = two_layer(config);
  return [s](const Vec2& x, int) { return s.eval(x); };
}

ThreeLayerSolution three_layer(const ProblemConfig& config, Complex eps_in, double d) {
  if (!(d > 0.0)) throw DomainError("three_layer: half-thickness must be positive");
  ThreeLayerSolution s;
  s.d = d;
  s.alpha0 = config.alpha0();
  s.beta0 = config.beta0();
  const double k = config.k;
  s.gamma = std::sqrt(k * k * eps_in - s.alpha0 * s.alpha0);
  s.beta_minus = std::sqrt(k * k * config.eps_minus - s.alpha0 * s.alpha0);
  const Complex g = s.gamma, bm = s.beta_minus;
  const double b0 = s.beta0;
  auto e = [](Complex z) { return std::exp(kI * z); };

  Eigen::Matrix4cd A;
  Eigen::Vector4cd rhs;
  A << e(b0 * d), -e(-g * d), -e(g * d), 0.0,
       b0 * e(b0 * d), g * e(-g * d), -g * e(g * d), 0.0,
       0.0, e(g * d), e(-g * d), -e(bm * d),
       0.0, -g * e(g * d), g * e(-g * d), bm * e(bm * d);
  rhs << -e(-b0 * d), b0 * e(-b0 * d), 0.0, 0.0;
  Eigen::FullPivLU<Eigen::Matrix4cd> lu(A);
  if (!lu.isInvertible() || lu.rcond() < 1e-14)
    throw ResonanceDetected("three-layer interface system is singular");
  const Eigen::Vector4cd c = lu.solve(rhs);
  s.R = c(0);
  s.T1 = c(1);
  s.T2 = c(2);
  s.T3 = c(3);
  return s;
}

FieldSample ThreeLayerSolution::eval(const Vec2& x) const {
  if (x.y() >= d) return add(plane(1.0, alpha0, -beta0, x), plane(R, alpha0, beta0, x));
  if (x.y() >= -d) return add(plane(T1, alpha0, -gamma, x), plane(T2, alpha0, gamma, x));
  return plane(T3, alpha0, -beta_minus, x);
}

double ThreeLayerSolution::interface_residual(double x1) const {
  auto top = [&](double y) { return add(plane(1.0, alpha0, -beta0, {x1, y}), plane(R, alpha0, beta0, {x1, y})); };
  auto mid = [&](double y) { return add(plane(T1, alpha0, -gamma, {x1, y}), plane(T2, alpha0, gamma, {x1, y})); };
  auto bot = [&](double y) { return plane(T3, alpha0, -beta_minus, {x1, y}); };
  const FieldSample a = top(d), b = mid(d), c = mid(-d), f = bot(-d);
  double r = 0.0;
  r = std::max(r, std::abs(a.value - b.value));
  r = std::max(r, std::abs(a.grad(1) - b.grad(1)));
  r = std::max(r, std::abs(c.value - f.value));
  r = std::max(r, std::abs(c.grad(1) - f.grad(1)));
  return r;
}

FieldEvaluator three_layer_evaluator(const ProblemConfig& config, Complex eps_in, double d) {
  const ThreeLayerSolution s = three_layer(config, eps_in, d);
  return [s](const Vec2& x, int) { return s.eval(x); };
}

FieldSample GuidedMode::eval(const Vec2& x, double d) const {
  const Complex ph = std::exp(kI * k1 * x.x());
  const double y = x.y();
  if (std::abs(y) <= d) {
    const Complex v = ph * std::cos(k2 * y);
    return {v, CVec2(kI * k1 * v, -k2 * std::sin(k2 * y) * ph)};
  }
  const double s = y > 0.0 ? 1.0 : -1.0;
  const Complex v = C * ph * std::exp(-k3 * std::abs(y));
  return {v, CVec2(kI * k1 * v, -s * k3 * v)};
}

std::vector<GuidedMode> find_guided_modes(double k, double eps_in, double eps_plus, double d, double L) {
  std::vector<GuidedMode> modes;
  const double rhs = k * k * (eps_in - eps_plus);
  if (!(rhs > 0.0) || !(d > 0.0)) return modes;
  const double kmax = std::sqrt(rhs);
  auto F = [&](double k2) {
    const double t = std::tan(k2 * d);
    return k2 * k2 * (1.0 + t * t) - rhs;
  };
  constexpr double pole_margin = 1e-9;
  for (int m = 0; m * kPi / d < kmax; ++m) {
    // k3 > 0 requires tan(k2 d) > 0: k2 d in (m pi, (m + 1/2) pi), where F increases
    double lo = m * kPi / d;
    double hi = std::min((m + 0.5) * kPi / d * (1.0 - pole_margin), kmax);
    if (m == 0) lo = 0.0;
    double flo = F(lo), fhi = F(hi);
    if (!(flo < 0.0 && fhi > 0.0)) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = F(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      (fm < 0.0 ? lo : hi) = mid;
      if (hi - lo <= 1e-16 * hi) break;
    }
    const double k2 = 0.5 * (lo + hi);
    GuidedMode g;
    g.branch = m;
    g.k2 = k2;
    g.k3 = k2 * std::tan(k2 * d);
    if (!(g.k3 > 0.0)) continue;
    g.k1 = std::sqrt(k * k * eps_in - k2 * k2);
    g.C = std::cos(k2 * d) * std::exp(g.k3 * d);
    const double kp = k * std::sqrt(eps_plus);
    const int nmax = static_cast<int>(std::ceil((g.k1 + kp) * L / (2.0 * kPi))) + 1;
    for (int n = -nmax; n <= nmax; ++n) {
      const double c = (g.k1 - 2.0 * kPi * n / L) / kp;
      if (c < -1.0 || c > 1.0) continue;
      g.critical_angles.push_back({n, -std::acos(c)});
    }
    modes.push_back(std::move(g));
  }
  return modes;
}

}  // namespace tdg

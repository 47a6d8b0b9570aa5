#pragma once

#include <functional>
#include <vector>

#include "tdg/common.hpp"
#include "tdg/problem.hpp"

namespace tdg {

struct FieldSample {
  Complex value;
  CVec2 grad;
};

/// Evaluates a reference field; `element` may be used to pick a branch on
/// interfaces (-1 when unknown).
using FieldEvaluator = std::function<FieldSample(const Vec2& x, int element)>;

/// exp(i kappa+ (x1 cos(theta) + x2 sin(theta))).
FieldSample incident_wave(const ProblemConfig& config, const Vec2& x);
FieldEvaluator incident_wave_evaluator(const ProblemConfig& config);

/// Flat interface at x2 = 0 between eps+ (above) and eps- (below).
struct TwoLayerSolution {
  Complex R;
  Complex T;
  double alpha0 = 0.0;
  double beta0 = 0.0;     // incident vertical wavenumber, -kappa+ sin(theta)
  Complex beta_minus;     // k sqrt(eps- - eps+ cos^2 theta), principal branch

  FieldSample eval(const Vec2& x) const;
};

TwoLayerSolution two_layer(const ProblemConfig& config);
FieldEvaluator two_layer_evaluator(const ProblemConfig& config);

/// Slab |x2| < d of eps_in between eps+ (above) and eps- (below).
struct ThreeLayerSolution {
  Complex R, T1, T2, T3;
  double d = 0.0;
  double alpha0 = 0.0;
  double beta0 = 0.0;
  Complex gamma;        // vertical wavenumber in the slab
  Complex beta_minus;   // vertical wavenumber below

  FieldSample eval(const Vec2& x) const;
  /// Residuals of value and x2-derivative continuity at x2 = +d and -d.
  double interface_residual(double x1) const;
};

/// ResonanceDetected if the 4x4 interface system is singular.
ThreeLayerSolution three_layer(const ProblemConfig& config, Complex eps_in, double d);
FieldEvaluator three_layer_evaluator(const ProblemConfig& config, Complex eps_in, double d);

struct GuidedMode {
  double k1 = 0.0, k2 = 0.0, k3 = 0.0, C = 0.0;
  int branch = 0;  // tan branch index m: k2 d in (m pi, (m + 1/2) pi)
  struct Angle {
    int n;
    double theta;
  };
  std::vector<Angle> critical_angles;  // theta in [-pi, 0] with k1 = kappa+ cos(theta) + 2 pi n / L

  /// Even trapped mode e^{i k1 x1} times cos(k2 x2) inside the slab and
  /// C e^{-k3 |x2|} outside.
  FieldSample eval(const Vec2& x, double d) const;
};

/// Roots of k2^2 (1 + tan^2(k2 d)) = k^2 (eps_in - eps+) with k3 = k2 tan(k2 d) > 0.
std::vector<GuidedMode> find_guided_modes(double k, double eps_in, double eps_plus, double d, double L);

}  // namespace tdg

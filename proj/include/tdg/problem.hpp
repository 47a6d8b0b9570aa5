#pragma once

#include <optional>
#include <vector>

#include "tdg/common.hpp"

namespace tdg {

/// Closed polygon given by its vertices in order (either orientation).
struct Polygon {
  std::vector<Vec2> vertices;

  static Polygon box(double x0, double x1, double y0, double y1);

  /// Point-in-polygon test; points within `tol` of the boundary count as inside.
  bool contains(const Vec2& x, double tol = 1e-12) const;
  double signed_area() const;
  double area() const { return std::abs(signed_area()); }
};

struct Region {
  Polygon polygon;
  Complex eps;
};

/// Numerical flux coefficients; the defaults reproduce the ultra weak
/// variational formulation.
struct FluxParameters {
  double a = 0.5;
  double b = 0.5;
  double d = 0.5;
};

/// Physical setup of one periodic cell (0,L) x (-H,H).
///
/// Permittivity lookup: the LAST region containing a point wins, so layers can
/// be listed first and inclusions after them. Points covered by no region get
/// eps_plus when x2 >= 0 and eps_minus otherwise.
struct ProblemConfig {
  double L = 2.0 * kPi;
  double H = 1.0;
  double k = 1.0;
  double theta = -kPi / 2.0;
  double eps_plus = 1.0;
  Complex eps_minus{1.0, 0.0};
  std::vector<Region> regions;
  std::vector<Polygon> obstacles;
  FluxParameters flux;

  double kappa_plus() const { return k * std::sqrt(eps_plus); }
  Complex kappa_minus() const { return k * std::sqrt(eps_minus); }
  /// Quasi-periodicity parameter kappa+ cos(theta).
  double alpha0() const { return kappa_plus() * std::cos(theta); }
  /// Vertical wavenumber of the incident wave, -kappa+ sin(theta) >= 0.
  double beta0() const { return -kappa_plus() * std::sin(theta); }

  Complex eps_at(const Vec2& x) const;
  bool in_obstacle(const Vec2& x, double tol = 0.0) const;

  /// True when every permittivity (regions, eps+, eps-) is real.
  bool lossless() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

}  // namespace tdg

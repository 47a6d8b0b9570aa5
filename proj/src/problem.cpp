#include "tdg/problem.hpp"

#include <algorithm>
#include <cmath>

namespace tdg {

Polygon Polygon::box(double x0, double x1, double y0, double y1) {
  return Polygon{{Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)}};
}

double Polygon::signed_area() const {
  double s = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = vertices[i];
    const Vec2& q = vertices[(i + 1) % n];
    s += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * s;
}

namespace {

double segment_distance(const Vec2& x, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (x - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - x).norm();
}

}  // namespace

bool Polygon::contains(const Vec2& x, double tol) const {
  const std::size_t n = vertices.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (segment_distance(x, vertices[i], vertices[(i + 1) % n]) <= tol) return true;
  }
  // crossing number
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[j];
    if ((a.y() > x.y()) != (b.y() > x.y())) {
      const double xc = a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x.x() < xc) inside = !inside;
    }
  }
  return inside;
}

Complex ProblemConfig::eps_at(const Vec2& x) const {
  for (auto it = regions.rbegin(); it != regions.rend(); ++it) {
    if (it->polygon.contains(x)) return it->eps;
  }
  return x.y() >= 0.0 ? Complex(eps_plus, 0.0) : eps_minus;
}

bool ProblemConfig::in_obstacle(const Vec2& x, double tol) const {
  for (const auto& ob : obstacles) {
    if (ob.contains(x, tol)) return true;
  }
  return false;
}

bool ProblemConfig::lossless() const {
  if (eps_minus.imag() != 0.0) return false;
  for (const auto& r : regions) {
    if (r.eps.imag() != 0.0) return false;
  }
  return true;
}

void ProblemConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& msg) {
    throw ConfigError(field + ": " + msg);
  };
  if (!(L > 0.0) || !std::isfinite(L)) fail("L", "period must be positive");
  if (!(H > 0.0) || !std::isfinite(H)) fail("H", "half-height must be positive");
  if (!(k > 0.0) || !std::isfinite(k)) fail("k", "wavenumber must be positive");
  if (!(theta >= -kPi - 1e-15 && theta <= 1e-15)) fail("theta", "incidence angle must lie in [-pi, 0]");
  if (!(eps_plus > 0.0)) fail("eps_plus", "must be real and positive");
  if (!(eps_minus.real() > 0.0) || eps_minus.imag() < 0.0)
    fail("eps_minus", "needs Re > 0 and Im >= 0");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const Complex e = regions[i].eps;
    if (!(e.real() > 0.0) || e.imag() < 0.0)
      fail("regions[" + std::to_string(i) + "].eps", "needs Re > 0 and Im >= 0");
    if (regions[i].polygon.vertices.size() < 3)
      fail("regions[" + std::to_string(i) + "]", "polygon needs at least 3 vertices");
  }
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    for (const Vec2& v : obstacles[i].vertices) {
      if (!(std::abs(v.y()) < H))
        fail("obstacles[" + std::to_string(i) + "]", "obstacle must lie strictly inside |x2| < H");
    }
  }
  if (!(flux.a > 0.0)) fail("flux.a", "must be positive");
  if (!(flux.b > 0.0)) fail("flux.b", "must be positive");
  if (!(flux.d > 0.0)) fail("flux.d", "must be positive");
}

}  // namespace tdg

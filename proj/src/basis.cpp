#include "tdg/basis.hpp"

#include <algorithm>
#include <cmath>

namespace tdg {

std::vector<Vec2> plane_wave_directions(int p, double rotation) {
  if (p < 1) throw DomainError("number of plane wave directions must be >= 1");
  std::vector<Vec2> d(p);
  for (int j = 1; j <= p; ++j) {
    const double t = 2.0 * kPi * j / p + rotation;
    d[j - 1] = Vec2(std::cos(t), std::sin(t));
  }
  return d;
}

Complex PlaneWaveSpace::eval(int j, const Vec2& x) const {
  return std::exp(kI * kappa * directions[j].dot(x));
}

CVec2 PlaneWaveSpace::grad(int j, const Vec2& x) const {
  const Complex v = kI * kappa * eval(j, x);
  return CVec2(v * directions[j].x(), v * directions[j].y());
}

GlobalBasis::GlobalBasis(const Mesh& mesh, int p, double rotation) {
  const auto dirs = plane_wave_directions(p, rotation);
  spaces_.resize(mesh.num_elements());
  offsets_.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    spaces_[e].element_id = e;
    spaces_[e].kappa = mesh.element(e).kappa;
    spaces_[e].directions = dirs;
    offsets_[e] = n_;
    n_ += p;
  }
}

std::pair<int, int> GlobalBasis::local(int i) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
  const int e = static_cast<int>(it - offsets_.begin()) - 1;
  return {e, i - offsets_[e]};
}

Complex sinc(Complex z) {
  if (std::abs(z) < 1e-4) {
    const Complex z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

Complex segment_exp_integral(const CVec2& w, const Vec2& a, const Vec2& b) {
  const Vec2 t = b - a;
  const Vec2 m = 0.5 * (a + b);
  const Complex wm = w.x() * m.x() + w.y() * m.y();
  const Complex z = 0.5 * (w.x() * t.x() + w.y() * t.y());
  return t.norm() * std::exp(kI * wm) * sinc(z);
}

}  // namespace tdg

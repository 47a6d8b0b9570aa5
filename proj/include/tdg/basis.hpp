#pragma once

#include <utility>
#include <vector>

#include "tdg/common.hpp"
#include "tdg/geometry.hpp"

namespace tdg {

/// d_j = (cos(2 pi j / p + rotation), sin(2 pi j / p + rotation)), j = 1..p.
std::vector<Vec2> plane_wave_directions(int p, double rotation = 0.0);

struct PlaneWaveSpace {
  int element_id = -1;
  Complex kappa;
  std::vector<Vec2> directions;

  int p() const { return static_cast<int>(directions.size()); }
  Complex eval(int j, const Vec2& x) const;
  CVec2 grad(int j, const Vec2& x) const;
};

class GlobalBasis {
 public:
  GlobalBasis(const Mesh& mesh, int p, double rotation = 0.0);

  int size() const { return n_; }
  int num_elements() const { return static_cast<int>(spaces_.size()); }
  const PlaneWaveSpace& space(int e) const { return spaces_[e]; }
  int offset(int e) const { return offsets_[e]; }
  int index(int e, int j) const { return offsets_[e] + j; }
  /// (element, local direction) of a global index.
  std::pair<int, int> local(int i) const;

 private:
  std::vector<PlaneWaveSpace> spaces_;
  std::vector<int> offsets_;
  int n_ = 0;
};

/// Integral of exp(i w.x) over the segment [a, b] (arc length measure).
/// w.x is the bilinear product, no conjugation.
Complex segment_exp_integral(const CVec2& w, const Vec2& a, const Vec2& b);

/// sin(z)/z with a Taylor branch for |z| < 1e-4.
Complex sinc(Complex z);

}  // namespace tdg

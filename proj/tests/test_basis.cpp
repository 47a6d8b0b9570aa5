#include <doctest.h>

#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tdg/basis.hpp"

using namespace tdg;

namespace {

Complex kronrod_segment(const CVec2& w, const Vec2& a, const Vec2& b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto f = [&](double t) {
    const Vec2 x = a + t * (b - a);
    return std::exp(kI * (w(0) * x(0) + w(1) * x(1)));
  };
  const double re = GK::integrate([&](double t) { return f(t).real(); }, 0.0, 1.0, 15, 1e-15);
  const double im = GK::integrate([&](double t) { return f(t).imag(); }, 0.0, 1.0, 15, 1e-15);
  return (b - a).norm() * Complex(re, im);
}

}  // namespace

TEST_CASE("direction sets") {
  for (int p : {1, 3, 7, 30}) {
    const auto d = plane_wave_directions(p);
    REQUIRE(d.size() == static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
      CHECK(d[j].norm() == doctest::Approx(1.0).epsilon(1e-15));
      const double ang = 2 * kPi * (j + 1) / p;
      CHECK(d[j].x() == doctest::Approx(std::cos(ang)).epsilon(1e-15));
      CHECK(d[j].y() == doctest::Approx(std::sin(ang)).epsilon(1e-15));
    }
  }
  const auto r = plane_wave_directions(4, 0.3);
  CHECK(r[0].x() == doctest::Approx(std::cos(kPi / 2 + 0.3)));
}

TEST_CASE("plane waves solve the Helmholtz equation") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> U(-1, 1);
  PlaneWaveSpace s{0, Complex(3.0, 0.4), plane_wave_directions(6, 0.1)};
  const double h = 1e-4;
  for (int t = 0; t < 20; ++t) {
    const Vec2 x(U(rng), U(rng));
    for (int j = 0; j < s.p(); ++j) {
      const Complex u = s.eval(j, x);
      CHECK(std::abs(u - std::exp(kI * s.kappa * s.directions[j].dot(x))) < 1e-14);
      const CVec2 g = s.grad(j, x);
      const Complex fx = (s.eval(j, x + Vec2(h, 0)) - s.eval(j, x - Vec2(h, 0))) / (2 * h);
      const Complex fy = (s.eval(j, x + Vec2(0, h)) - s.eval(j, x - Vec2(0, h))) / (2 * h);
      CHECK(std::abs(g(0) - fx) < 1e-6 * std::abs(u) * 10);
      CHECK(std::abs(g(1) - fy) < 1e-6 * std::abs(u) * 10);
      const Complex lap = (s.eval(j, x + Vec2(h, 0)) + s.eval(j, x - Vec2(h, 0)) + s.eval(j, x + Vec2(0, h)) +
                           s.eval(j, x - Vec2(0, h)) - 4.0 * u) /
                          (h * h);
      CHECK(std::abs(lap + s.kappa * s.kappa * u) < 1e-4 * std::abs(u) * 10);
    }
  }
}

TEST_CASE("global indexing") {
  ProblemConfig c;
  c.L = 2;
  c.H = 1;
  c.k = 2;
  c.theta = -1;
  StructuredMeshSpec ms;
  ms.cells_x = {2};
  ms.cells_y = {2};
  const Mesh m = generate_structured_mesh(c, ms);
  const GlobalBasis b(m, 5);
  CHECK(b.size() == 5 * m.num_elements());
  for (int i = 0; i < b.size(); ++i) {
    const auto [e, j] = b.local(i);
    CHECK(b.index(e, j) == i);
    CHECK(b.space(e).kappa == m.element(e).kappa);
  }
}

TEST_CASE("segment integral of an exponential matches adaptive quadrature") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int t = 0; t < 100; ++t) {
    const Vec2 a(3 * U(rng), 3 * U(rng)), b(3 * U(rng), 3 * U(rng));
    CVec2 w(Complex(8 * U(rng), t % 3 == 0 ? U(rng) : 0.0), Complex(8 * U(rng), t % 3 == 0 ? U(rng) : 0.0));
    const Complex ref = kronrod_segment(w, a, b);
    CHECK(std::abs(segment_exp_integral(w, a, b) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
  // degenerate and nearly degenerate phases
  const Vec2 a(0.2, -0.4), b(1.3, 0.9);
  CHECK(std::abs(segment_exp_integral(CVec2::Zero(), a, b) - (b - a).norm()) < 1e-15);
  const CVec2 tiny(Complex(1e-9, 0), Complex(-2e-9, 0));
  CHECK(std::abs(segment_exp_integral(tiny, a, b) - kronrod_segment(tiny, a, b)) < 1e-14);
}

TEST_CASE("sinc is smooth across its series branch") {
  CHECK(sinc(Complex(0)) == Complex(1));
  for (double z : {0.9e-4, 1.1e-4, 1e-3, 0.5, 3.0}) {
    const Complex exact = std::sin(Complex(z)) / Complex(z);
    CHECK(std::abs(sinc(Complex(z)) - exact) < 1e-15);
  }
  const Complex zc(9e-5, 3e-5);
  CHECK(std::abs(sinc(zc) - std::sin(zc) / zc) < 1e-15);
}

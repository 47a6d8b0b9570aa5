#include <doctest.h>

#include <random>

#include "tdg/spectral.hpp"

using namespace tdg;

namespace {

ProblemConfig base() {
  ProblemConfig c;
  c.L = 2 * kPi;
  c.H = 3;
  c.k = 5;
  c.theta = -kPi / 3;
  c.eps_plus = 1;
  c.eps_minus = 1.5;
  return c;
}

ProblemConfig random_config(std::mt19937& rng, bool lossy) {
  std::uniform_real_distribution<double> U(0, 1);
  ProblemConfig c;
  c.L = 0.5 + 6 * U(rng);
  c.H = 1;
  c.k = 0.5 + 10 * U(rng);
  c.theta = -0.05 - (kPi - 0.1) * U(rng);
  c.eps_plus = 1 + 2 * U(rng);
  c.eps_minus = Complex(1 + 3 * U(rng), lossy ? U(rng) : 0.0);
  return c;
}

}  // namespace

TEST_CASE("ladder values") {
  const SpectralLadder l = build_ladder(base(), 9);
  CHECK(l.size() == 19);
  CHECK(l.alpha(0) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(l.alpha(1) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(l.alpha(-1) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(l.beta_plus(0).real() == doctest::Approx(4.330127018922193).epsilon(1e-15));
  CHECK(l.beta_plus(0).imag() == 0.0);
  CHECK(l.beta_plus(3).real() == 0.0);
  CHECK(l.beta_plus(3).imag() == doctest::Approx(2.291287847477920).epsilon(1e-15));
  CHECK(l.beta_plus(0).real() == base().beta0());
}

TEST_CASE("branch rules hold on random ladders") {
  std::mt19937 rng(11);
  for (int t = 0; t < 50; ++t) {
    const bool lossy = t % 2 == 1;
    const ProblemConfig c = random_config(rng, lossy);
    const SpectralLadder l = build_ladder(c, 12);
    for (int n = -12; n <= 12; ++n) {
      CHECK(l.alpha(n) == doctest::Approx(c.alpha0() + 2 * kPi * n / c.L).epsilon(1e-14));
      for (auto side : {Boundary::Top, Boundary::Bottom}) {
        const Complex b = l.beta(side, n);
        const Complex eps = side == Boundary::Top ? Complex(c.eps_plus) : c.eps_minus;
        const Complex want = c.k * c.k * eps - l.alpha(n) * l.alpha(n);
        CHECK(std::abs(b * b - want) <= 1e-12 * std::max(1.0, std::abs(want)));
        CHECK(b.imag() >= 0.0);
        CHECK(b.real() >= 0.0);
        if (eps.imag() == 0.0) CHECK((b.real() == 0.0 || b.imag() == 0.0));
      }
    }
  }
}

TEST_CASE("M star and auto truncation") {
  CHECK(m_star(base()) == doctest::Approx(8.623724356957945).epsilon(1e-15));
  CHECK(auto_truncation(base()) == 10);
  ProblemConfig c = base();
  c.eps_minus = 1;
  c.theta = -kPi / 2;
  CHECK(m_star(c) == doctest::Approx(5.0).epsilon(1e-15));
  c.L = 4 * kPi;
  CHECK(m_star(c) == doctest::Approx(10.0).epsilon(1e-15));
  c.eps_minus = Complex(1.6, 0.25);
  CHECK_THROWS_AS(m_star(c), NotApplicable);
  CHECK_THROWS_AS(auto_truncation(c), NotApplicable);
}

TEST_CASE("beta magnitudes grow past M star") {
  std::mt19937 rng(5);
  for (int t = 0; t < 40; ++t) {
    const ProblemConfig c = random_config(rng, false);
    const int m0 = static_cast<int>(std::ceil(m_star(c)));
    const SpectralLadder l = build_ladder(c, 4 * m0 + 4);
    for (auto side : {Boundary::Top, Boundary::Bottom}) {
      for (int n = m0; n < 4 * m0 + 4; ++n) {
        CHECK(std::abs(l.beta(side, n + 1)) >= std::abs(l.beta(side, n)));
        CHECK(std::abs(l.beta(side, -n - 1)) >= std::abs(l.beta(side, -n)));
      }
    }
  }
}

TEST_CASE("Rayleigh-Wood distance") {
  const auto d = rayleigh_wood_distance(base());
  CHECK(d.delta_plus == doctest::Approx(2.179449471770337).epsilon(1e-14));
  CHECK(d.delta == doctest::Approx(std::min(d.delta_plus, d.delta_minus)));
  CHECK_FALSE(d.near_anomaly);

  ProblemConfig same = base();
  same.eps_minus = 1;
  const auto s = rayleigh_wood_distance(same);
  CHECK(s.delta_minus == doctest::Approx(s.delta_plus).epsilon(1e-15));

  // normal incidence: alpha_5 = 5 = kappa+
  ProblemConfig anomaly = same;
  anomaly.theta = -kPi / 2;
  const auto a = rayleigh_wood_distance(anomaly);
  CHECK(a.delta_plus == 0.0);
  CHECK(a.near_anomaly);
  CHECK(std::abs(a.n_plus) == 5);

  // brute force over a wide window
  std::mt19937 rng(9);
  for (int t = 0; t < 30; ++t) {
    const ProblemConfig c = random_config(rng, false);
    const auto r = rayleigh_wood_distance(c);
    const SpectralLadder l = build_ladder(c, 200);
    double best = 1e300;
    for (int n = -200; n <= 200; ++n) best = std::min(best, std::abs(l.beta_plus(n)));
    CHECK(r.delta_plus == doctest::Approx(best).epsilon(1e-14));
  }
}

TEST_CASE("incident trace coefficients") {
  ProblemConfig c = base();
  c.theta = -kPi / 2;
  const auto t = incident_trace_coeffs(c, 4);
  CHECK(std::abs(t.at(0) - std::exp(Complex(0, -15))) < 1e-14);
  for (int n = -4; n <= 4; ++n)
    if (n != 0) CHECK(t.at(n) == Complex(0));
  c.theta = -kPi;
  CHECK(std::abs(incident_trace_coeffs(c, 2).at(0) - 1.0) < 1e-14);
}

TEST_CASE("truncation error bound") {
  ProblemConfig c = base();
  c.theta = -kPi / 2;
  c.eps_minus = 1;
  CHECK(truncation_error_bound(10, 0.5, 1, c) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(truncation_error_bound(10, 0.5, 2, c) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(truncation_error_bound(9, 0.5, 1, base()) == doctest::Approx(1 / 6.5).epsilon(1e-12));
  CHECK_THROWS_AS(truncation_error_bound(8, 0.5, 1, base()), DomainError);
  CHECK_THROWS_AS(truncation_error_bound(10, 0.5, 0, base()), DomainError);
}

TEST_CASE("DtN pairing has non-negative real and imaginary parts") {
  std::mt19937 rng(2);
  std::normal_distribution<double> G;
  for (int t = 0; t < 20; ++t) {
    const ProblemConfig c = random_config(rng, t % 2 == 1);
    const SpectralLadder l = build_ladder(c, 8);
    std::vector<Complex> w(l.size());
    for (auto& x : w) x = Complex(G(rng), G(rng));
    for (auto side : {Boundary::Top, Boundary::Bottom}) {
      const Complex p = dtn_pairing(l, side, w);
      CHECK(p.real() >= 0);
      CHECK(p.imag() >= 0);
    }
    CHECK(discrete_hs_norm(l, w, 0.5) >= discrete_hs_norm(l, w, 0.0));
  }
}

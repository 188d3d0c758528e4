#include <doctest.h>

#include <boost/math/special_functions/trigamma.hpp>

#include <cmath>
#include <numbers>

#include "dsieve/errors.hpp"
#include "dsieve/majorant.hpp"

using namespace dsieve;
using dsieve::majorant::SelbergMajorant;

namespace {

// Beurling's function from its trigamma closed form,
// B(x) = (sin(pi x)/pi)^2 (psi_1(-x) - psi_1(1 + x) + 2/x), x not an integer.
long double beurling(long double x) {
  const long double pi = std::numbers::pi_v<long double>;
  const long double s = std::sin(pi * x) / pi;
  return s * s * (boost::math::trigamma(-x) - boost::math::trigamma(1 + x) + 2 / x);
}

long double psi_oracle(long double M, long double N, long double delta, long double t) {
  return (beurling(delta * (t - M)) + beurling(delta * (M + N - t))) / 2;
}

}  // namespace

TEST_SUITE("majorant") {

TEST_CASE("mass") {
  CHECK(SelbergMajorant::construct(0, 10, 0.5, 64).mass() == doctest::Approx(12));
  CHECK(SelbergMajorant::construct(0, 1, 1, 64).mass() == doctest::Approx(2));
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(SelbergMajorant::construct(0, 0, 1), ArgumentError);
  CHECK_THROWS_AS(SelbergMajorant::construct(0, 1, 0), ArgumentError);
  CHECK_THROWS_AS(SelbergMajorant::construct(0, 1, 1, 2), ArgumentError);
  CHECK_THROWS_AS(SelbergMajorant::construct(NAN, 1, 1), ArgumentError);
}

TEST_CASE("values against the trigamma closed form") {
  struct Params {
    double M, N, delta;
  };
  for (const Params& p : {Params{0, 10, 0.5}, Params{-5, 10, 0.25}, Params{3, 1, 1}, Params{0, 100, 0.05}}) {
    const auto psi = SelbergMajorant::construct(p.M, p.N, p.delta, 128);
    for (int i = 0; i < 400; ++i) {
      // Golden-ratio offsets keep delta (t - M) away from the integers.
      const double frac = std::fmod(0.5 + i * 0.6180339887498949, 1.0);
      const double t = p.M - 20 / p.delta + (p.N + 40 / p.delta) * (i + frac) / 400.0;
      const double a = p.delta * (t - p.M), b = p.delta * (p.M + p.N - t);
      if (std::abs(a - std::round(a)) < 1e-3 || std::abs(b - std::round(b)) < 1e-3) continue;
      const auto expected = static_cast<double>(psi_oracle(p.M, p.N, p.delta, t));
      REQUIRE(psi.eval(t) == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("majorizes the interval and is nonnegative") {
  const auto psi = SelbergMajorant::construct(-5, 10, 0.25, 128);
  CHECK(psi.eval(0) >= 1.0);
  CHECK(psi.eval(psi.midpoint()) >= 1.0);
  CHECK(psi.eval(-5) >= 1.0);
  CHECK(psi.eval(5) >= 1.0);
  const double lo = psi.M() - 50 / psi.delta(), hi = psi.M() + psi.N() + 50 / psi.delta();
  for (int i = 0; i < 10'000; ++i) {
    const double t = lo + (hi - lo) * std::fmod(i * 0.7548776662466927, 1.0);
    const double v = psi.eval(t);
    REQUIRE(v >= -psi.tail_bound());
    if (t >= psi.M() && t <= psi.M() + psi.N()) REQUIRE(v >= 1.0 - psi.tail_bound());
  }
}

TEST_CASE("symmetric about the midpoint") {
  const auto psi = SelbergMajorant::construct(2, 7, 0.3, 64);
  for (double s : {0.1, 1.7, 5.0, 33.3, 120.0}) {
    CHECK(psi.eval(psi.midpoint() + s) == doctest::Approx(psi.eval(psi.midpoint() - s)).epsilon(1e-12));
  }
}

TEST_CASE("quadratic decay far from the interval") {
  const auto psi = SelbergMajorant::construct(0, 10, 0.5, 64);
  const double gap = 100 / psi.delta();
  const double c = psi.decay_constant(gap);
  CHECK(c > 0);
  for (double t : {-300.0, -1000.0, 220.0, 900.0, 1e5}) {
    if (std::abs(t - psi.M()) <= psi.N() + gap) continue;
    CHECK(psi.eval(t) <= c / (1 + t * t));
  }
  CHECK_THROWS_AS(psi.decay_constant(0), ArgumentError);
}

TEST_CASE("Fourier transform: mass at 0, vanishing outside the band") {
  const auto psi = SelbergMajorant::construct(0, 10, 0.5, 64);
  const auto at0 = psi.fourier_mass_check(0, 0.5);
  CHECK(std::abs(at0.value - std::complex<double>(12, 0)) <= at0.error_bound);
  for (double alpha : {1.0, -1.0, 0.75}) {
    const auto s = psi.fourier_mass_check(alpha, 0.5);
    CHECK(std::abs(s.value) <= s.error_bound);
  }
}

TEST_CASE("aliasing step raises an accuracy error carrying a usable step") {
  const auto psi = SelbergMajorant::construct(0, 10, 0.5, 64);
  double step = 0;
  try {
    psi.fourier_mass_check(0, 2.0);
  } catch (const AccuracyError& e) {
    step = e.required_step();
  }
  REQUIRE(step > 0);
  REQUIRE(step < 2.0);
  const auto s = psi.fourier_mass_check(0, step);
  CHECK(std::abs(s.value.real() - 12) <= s.error_bound);
}

TEST_CASE("lattice sum equals the mass when delta < 1") {
  const auto psi = SelbergMajorant::construct(0.3, 10, 0.5, 64);
  const auto ls = psi.lattice_sum();
  CHECK(std::abs(ls.value - psi.mass()) <= ls.error_bound + 1e-9 * psi.mass());
  CHECK_THROWS_AS(psi.lattice_sum(0), ArgumentError);
}

}

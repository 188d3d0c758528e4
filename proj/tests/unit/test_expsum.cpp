#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "../support/oracles.hpp"
#include "dsieve/errors.hpp"
#include "dsieve/expsum.hpp"
#include "dsieve/rng.hpp"

using namespace dsieve;
using namespace dsieve::expsum;
using circle::CirclePoint;
using circle::PointSet;

namespace {

SupportedFunction random_function(Xorshift64Star& rng, std::size_t size, std::int64_t range) {
  std::vector<std::pair<std::int64_t, Complex>> pairs;
  std::vector<std::int64_t> used;
  while (pairs.size() < size) {
    const auto n = static_cast<std::int64_t>(1 + rng.below(static_cast<std::uint64_t>(range)));
    if (std::find(used.begin(), used.end(), n) != used.end()) continue;
    used.push_back(n);
    pairs.push_back({n, std::polar(rng.uniform(0.1, 1.0), 2 * std::numbers::pi * rng.uniform())});
  }
  return SupportedFunction::from_pairs(pairs);
}

}  // namespace

TEST_SUITE("expsum") {

TEST_CASE("supported functions") {
  const auto f = SupportedFunction::from_pairs({{3, {1, 0}}, {1, {0, 2}}, {7, {0, 0}}});
  CHECK(f.support() == std::vector<std::int64_t>{1, 3});
  CHECK(f.norm2_sq() == doctest::Approx(5));
  CHECK(f.norm1() == doctest::Approx(3));
  CHECK(f.at(7) == Complex(0, 0));
  CHECK_FALSE(f.is_indicator());
  CHECK(SupportedFunction::indicator({4, 2, 9}).is_indicator());
  CHECK_THROWS_AS(SupportedFunction::from_pairs({{1, {1, 0}}, {1, {2, 0}}}), ArgumentError);
  const auto g = SupportedFunction::parse("# header\n5\n6 0.5\n7 0 -1\n");
  CHECK(g.support() == std::vector<std::int64_t>{5, 6, 7});
  CHECK(g.at(7) == Complex(0, -1));
  CHECK_THROWS_AS(SupportedFunction::parse("5 x\n"), ArgumentError);
}

TEST_CASE("trigonometric polynomial values") {
  Xorshift64Star rng(1);
  const auto f = random_function(rng, 50, 1000);
  Complex sum = 0;
  for (auto w : f.weights()) sum += w;
  CHECK(std::abs(trig_poly(f, CirclePoint::rational(0, 1)) - sum) < 1e-12);
  const auto single = SupportedFunction::indicator({17});
  CHECK(std::abs(trig_poly(single, CirclePoint::real(0.1234))) == doctest::Approx(1.0));
  CHECK(std::abs(trig_poly(single, CirclePoint::rational(1, 5)) - std::polar(1.0, 2 * std::numbers::pi * 2 / 5)) <
        1e-12);
  CHECK(std::abs(trig_poly(SupportedFunction::indicator({1, 2, 3}), CirclePoint::rational(1, 3))) < 1e-15);
}

TEST_CASE("bucketed DFT agrees with direct summation") {
  Xorshift64Star rng(2);
  const auto f = random_function(rng, 1000, 100'000);
  const std::uint64_t U = 10'000;
  const auto fast = trig_poly_all(f, U);
  const auto slow = trig_poly_all_direct(f, U);
  REQUIRE(fast.size() == U);
  double worst = 0;
  for (std::uint64_t u = 0; u < U; ++u) worst = std::max(worst, std::abs(fast[u] - slow[u]));
  CHECK(worst < 1e-9);
  for (int i = 0; i < 100; ++i) {
    const auto u = rng.below(U);
    const long double x = static_cast<long double>(u) / U;
    REQUIRE(std::abs(fast[u] - oracle::naive_exp_sum(f.support(), f.weights(), x)) < 1e-9);
  }
  CHECK(trig_poly_all_direct(f, 777, false) == trig_poly_all_direct(f, 777, true));
}

TEST_CASE("trivial modulus and errors") {
  const auto f = SupportedFunction::from_pairs({{2, {1, 1}}, {5, {2, 0}}});
  const auto one = trig_poly_all(f, 1);
  REQUIRE(one.size() == 1);
  CHECK(std::abs(one[0] - Complex(3, 1)) < 1e-12);
  CHECK_THROWS_AS(trig_poly_all(f, 0), ArgumentError);
  CHECK_THROWS_AS(trig_poly_all(f, 1 << 20, 1000), ResourceError);
}

TEST_CASE("Parseval over Z/U") {
  Xorshift64Star rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t U = 50 + rng.below(500);
    // Support inside [1, U] so residues are distinct.
    const auto f = random_function(rng, 1 + rng.below(40), static_cast<std::int64_t>(U));
    const auto t = trig_poly_all(f, U);
    double total = 0;
    for (const auto& v : t) total += std::norm(v);
    REQUIRE(total == doctest::Approx(static_cast<double>(U) * f.norm2_sq()).epsilon(1e-10));
  }
}

TEST_CASE("spectrum") {
  const auto s = SupportedFunction::indicator({3, 10, 12, 40});
  CHECK(spectrum(s, 97, 1).contains(0));
  const auto single = spectrum(SupportedFunction::indicator({11}), 50, 1);
  CHECK(single.entries.size() == 50);
  std::vector<std::int64_t> ap;
  for (std::int64_t n = 4; n <= 1000; n += 9) ap.push_back(n);
  CHECK(spectrum(SupportedFunction::indicator(ap), 9, 1).entries.size() == 9);
  CHECK_THROWS_AS(spectrum(s, 97, 0.5), ArgumentError);
}

TEST_CASE("moments") {
  Xorshift64Star rng(4);
  const auto c = random_function(rng, 20, 300);
  const std::uint64_t U = 301;
  const auto g2 = group_moment(c, U, 2);
  CHECK(g2.l2_norm * g2.l2_norm == doctest::Approx(c.norm2_sq()));
  CHECK(g2.ratio == doctest::Approx(1.0));
  // Moment over the whole group at p = 2 is U sum |c|^2.
  std::vector<CirclePoint> all;
  for (std::uint64_t u = 0; u < U; ++u) all.push_back(CirclePoint::rational(static_cast<std::int64_t>(u), U));
  CHECK(moment(c, PointSet(all), 2) == doctest::Approx(static_cast<double>(U) * c.norm2_sq()));
  const auto x = PointSet::parse("2/7");
  CHECK(moment(c, x, 3.5) == doctest::Approx(std::pow(std::abs(trig_poly(c, x.points()[0])), 3.5)));
  CHECK(group_moment(c, U, 4).ratio >= 1.0);
  CHECK_THROWS_AS(moment(c, x, 0.5), ArgumentError);
}

TEST_CASE("dual polynomial") {
  const auto x = PointSet::parse("1/8,1/4");
  const std::vector<Complex> c = {{1, 0}, {0, 1}};
  const std::vector<std::int64_t> ns = {0, 1, 2, 8};
  const auto v = dual_poly(c, x, ns);
  CHECK(std::abs(v[0] - Complex(1, 1)) < 1e-15);
  CHECK(std::abs(v[3] - Complex(1, 1)) < 1e-12);
  const Complex e18 = std::polar(1.0, std::numbers::pi / 4), e14(0, 1);
  CHECK(std::abs(v[1] - (e18 + Complex(0, 1) * e14)) < 1e-12);
  CHECK(dual_moment(c, x, ns, 2) == doctest::Approx(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]) + std::norm(v[3])));
  CHECK_THROWS_AS(dual_poly({{1, 0}}, x, ns), ArgumentError);
}

}

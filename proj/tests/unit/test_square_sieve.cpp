#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "../support/oracles.hpp"
#include "dsieve/arith.hpp"
#include "dsieve/errors.hpp"
#include "dsieve/square_sieve.hpp"

using namespace dsieve;
using namespace dsieve::square_sieve;

namespace {

const arith::FactorTable& table() {
  static const auto t = arith::FactorTable::build(100'000);
  return t;
}

}  // namespace

TEST_SUITE("square_sieve") {

TEST_CASE("G# values") {
  CHECK(g_sharp(1, table()) == 1);
  CHECK(g_sharp(5, table()) == Rational(13, 6));
  CHECK(g_sharp(7, table()) == Rational(35, 12));
  CHECK(g_sharp(10, table()) == Rational(35, 12));
  CHECK(g_sharp(7.9, table()) == Rational(35, 12));
  for (std::uint64_t z = 1; z <= 500; z += 13) REQUIRE(g_sharp(z, table()) == oracle::g_sharp(z));
}

TEST_CASE("scan to 10") {
  std::vector<kernels::GSharpRow> rows;
  const auto s = g_sharp_scan(10, {}, [&](const kernels::GSharpRow& r) { rows.push_back(r); });
  REQUIRE(rows.size() == 10);
  for (const auto& r : rows) {
    const Rational exact = oracle::g_sharp(r.z);
    CHECK(abs(fixed_to_rational(r.g_fixed) - exact) <= fixed_error_bound(s.terms));
  }
  CHECK(abs(fixed_to_rational(s.g_fixed) - Rational(35, 12)) <= fixed_error_bound(s.terms));
}

TEST_CASE("scan to 2") {
  const auto s = g_sharp_scan(2);
  CHECK(s.argmin == 2);
  CHECK(fixed_to_rational(s.min_g_fixed) == 1);
}

TEST_CASE("pinned scan minima") {
  // Regression values of the scan, checked exactly against the rational G#.
  ScanOptions opts;
  opts.segment_size = 4096;
  const auto global = g_sharp_scan(100'000, opts);
  CHECK(global.argmin == 28);
  CHECK(g_sharp(28, table()) / 28 == Rational(20213, 70560));
  opts.min_from = 100;
  const auto tail = g_sharp_scan(100'000, opts);
  CHECK(tail.argmin == 178);
  CHECK(g_sharp(178, table()) / 178 ==
        Rational("12942721496912449547689/43125941433653840361600"));
  CHECK(fixed_to_double(tail.min_g_fixed) / 178 == doctest::Approx(0.30011452658544).epsilon(1e-13));
  opts.min_from = 179;
  CHECK(g_sharp_scan(100'000, opts).argmin == 190);
}

TEST_CASE("scan argument checks") {
  CHECK_THROWS_AS(g_sharp_scan(1), ArgumentError);
  ScanOptions opts;
  opts.min_from = 11;
  CHECK_THROWS_AS(g_sharp_scan(10, opts), ArgumentError);
  opts.min_from = 1;
  opts.segment_size = 0;
  CHECK_THROWS_AS(g_sharp_scan(10, opts), ArgumentError);
}

TEST_CASE("weights at z = 3 and z = 1") {
  const auto s3 = build_square_sieve(3, table());
  CHECK(s3.moduli == std::vector<std::uint64_t>{1, 3});
  CHECK(s3.lambda_sharp[s3.index_of(1)] == 0);
  CHECK(s3.lambda_sharp[s3.index_of(3)] == 1);
  CHECK(s3.lambda_classical[s3.index_of(1)] == 1);
  CHECK(s3.lambda_classical[s3.index_of(3)] == -1);
  CHECK(s3.G_sharp == Rational(3, 2));
  CHECK_THROWS_AS(s3.index_of(5), ArgumentError);

  const auto s1 = build_square_sieve(1, table());
  REQUIRE(s1.moduli.size() == 1);
  CHECK(s1.lambda_sharp[0] == 1);
}

TEST_CASE("weights sum to one at z = 15") {
  const auto s = build_square_sieve(15, table());
  CHECK(s.moduli == std::vector<std::uint64_t>{1, 3, 5, 7, 11, 13, 15});
  Rational total = 0;
  for (const auto& l : s.lambda_sharp) total += l;
  CHECK(total == 1);
  CHECK(normalization(s).all_hold());
}

TEST_CASE("beta values") {
  const auto s3 = build_square_sieve(3, table());
  CHECK(beta_square(16, s3) == 1);
  CHECK(beta_square(2, s3) == 0);
  CHECK(beta_square(3, s3) == 1);
  CHECK(beta_square(3, s3, BetaMethod::classical) == 1);
  const auto s33 = build_square_sieve(33, table());
  CHECK(beta_square(16, s33) == 1);
}

TEST_CASE("sharp and classical beta agree") {
  for (double z : {3.0, 15.0, 33.0, 50.0}) {
    const auto s = build_square_sieve(z, table());
    for (std::uint64_t n = 0; n <= 600; ++n) {
      const auto a = beta_square(n, s, BetaMethod::sharp);
      REQUIRE(a == beta_square(n, s, BetaMethod::classical));
      REQUIRE(a >= 0);
    }
  }
}

TEST_CASE("eta") {
  const std::complex<double> e13 = std::polar(1.0, -2 * std::numbers::pi / 3);
  CHECK(std::abs(eta(3, 1, table()) - (1.0 + e13)) < 1e-12);
  for (std::uint64_t q : {1u, 3u, 15u, 105u}) {
    CHECK(std::abs(eta(q, 0, table()) - std::complex<double>(arith::squares_mod(q).members.size(), 0)) < 1e-12);
  }
  CHECK_THROWS_AS(eta(9, 1, table()), ArgumentError);
  CHECK_THROWS_AS(eta(6, 1, table()), ArgumentError);
}

TEST_CASE("eta table matches the definition and inverts to the indicator") {
  for (std::uint64_t q = 1; q <= 231; q += 2) {
    if (!oracle::is_squarefree(q)) continue;
    const auto tab = eta_table(q, table());
    REQUIRE(tab.size() == q);
    const auto k = arith::squares_mod(q);
    for (std::uint64_t a = 0; a < q; a += 1 + q / 17) {
      std::complex<double> direct = 0;
      for (auto r : k.members) direct += std::polar(1.0, -2 * std::numbers::pi * static_cast<double>(r * a % q) / q);
      REQUIRE(std::abs(tab[a] - direct) < 1e-9);
      REQUIRE(std::abs(tab[a] - eta(q, a, table())) < 1e-9);
    }
    const auto ind = indicator_from_eta(tab);
    for (std::uint64_t n = 0; n < q; ++n) {
      REQUIRE(std::abs(ind[n] - (k.contains(n) ? 1.0 : 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("Fourier weights") {
  const auto t1 = fourier_weights(build_square_sieve(1, table()));
  REQUIRE(t1.blocks.size() == 1);
  CHECK(t1.blocks[0].d == 1);
  CHECK(std::abs(t1.weight(1, 1) - 1.0) < 1e-15);
  CHECK(t1.w1_exact == 1);

  const auto s3 = build_square_sieve(3, table());
  const auto t3 = fourier_weights(s3);
  const auto fb = fourier_beta(t3, 0, 101);
  for (std::uint64_t n = 0; n <= 100; ++n) CHECK(std::abs(fb[n] - beta_square(n, s3).get_d()) < 1e-9);

  for (double z : {5.0, 15.0, 21.0}) {
    const auto s = build_square_sieve(z, table());
    CHECK(fourier_weights(s).w1_exact == main_term(s));
    CHECK(main_term(s) == 1 / s.G_sharp);
  }
  CHECK_THROWS_AS(fourier_weights(build_square_sieve(40, table()), 30), ResourceError);
}

TEST_CASE("Fourier evaluation: serial equals parallel") {
  const auto t = fourier_weights(build_square_sieve(21, table()));
  const auto a = fourier_beta(t, 1000, 500, false);
  const auto b = fourier_beta(t, 1000, 500, true);
  CHECK(a == b);
}

TEST_CASE("level checks") {
  CHECK_THROWS_AS(build_square_sieve(0.5, table()), ArgumentError);
  CHECK_THROWS_AS(build_square_sieve(200'000, table()), RangeError);
}

}

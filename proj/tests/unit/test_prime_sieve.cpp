#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "../support/oracles.hpp"
#include "dsieve/arith.hpp"
#include "dsieve/errors.hpp"
#include "dsieve/prime_sieve.hpp"

using namespace dsieve;
using namespace dsieve::prime_sieve;

namespace {

const arith::FactorTable& table() {
  static const auto t = arith::FactorTable::build(20'000);
  return t;
}

// Minimizer of sum lambda_a lambda_b / [a, b] over the given support with
// lambda_1 = 1: solve M x = e_1 exactly and rescale so x_1 = 1.
std::vector<mpq_class> quadratic_minimizer(const std::vector<std::uint64_t>& support) {
  const std::size_t n = support.size();
  std::vector<std::vector<mpq_class>> a(n, std::vector<mpq_class>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i][j] = mpq_class(1, std::lcm(support[i], support[j]));
    }
    a[i][n] = (i == 0) ? 1 : 0;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (a[piv][col] == 0) ++piv;
    std::swap(a[piv], a[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const mpq_class f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<mpq_class> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
  const mpq_class x1 = x[0];
  for (auto& v : x) v /= x1;
  return x;
}

}  // namespace

TEST_SUITE("prime_sieve") {

TEST_CASE("level two") {
  const auto s = build_prime_sieve(2, 2, table());
  CHECK(s.support == std::vector<std::uint64_t>{1, 2});
  CHECK(s.lambda_at(1) == 1);
  CHECK(s.lambda_at(3) == 0);
}

TEST_CASE("empty sieve") {
  const auto s = build_prime_sieve(1.5, 2, table());
  CHECK(s.support == std::vector<std::uint64_t>{1});
  CHECK(s.G == 1);
  for (std::uint64_t n = 1; n <= 50; ++n) CHECK(beta_prime(n, s) == 1);
}

TEST_CASE("weights minimize the quadratic form") {
  struct Case {
    double z;
    std::uint64_t z0;
  };
  for (const Case c : {Case{10, 3}, Case{30, 2}, Case{40, 5}, Case{23.5, 3}}) {
    const auto s = build_prime_sieve(c.z, c.z0, table());
    CHECK(s.lambda_at(1) == 1);
    for (std::size_t i = 0; i < s.support.size(); ++i) {
      const auto d = s.support[i];
      CHECK(oracle::is_squarefree(d));
      for (auto p : oracle::distinct_primes(d)) CHECK(p >= c.z0);
      CHECK(abs(s.lambda[i]) <= 1);
    }
    const auto x = quadratic_minimizer(s.support);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(s.lambda[i] == x[i]);
    CHECK(diagonal_form(s) == 1 / oracle::g_prime(static_cast<std::uint64_t>(c.z), c.z0));
  }
  const auto odd = build_prime_sieve(10, 3, table());
  for (auto d : odd.support) CHECK(d % 2 == 1);
}

TEST_CASE("density G(z; z0)") {
  CHECK(g_prime(1, 2, table()) == 1);
  CHECK(g_prime(1, 7, table()) == 1);
  CHECK(g_prime(3, 2, table()) == Rational(5, 2));
  CHECK(g_prime(3, 3, table()) == Rational(3, 2));
  for (std::uint64_t z = 1; z <= 200; z += 7) {
    for (std::uint64_t z0 : {2u, 3u, 5u, 11u}) REQUIRE(g_prime(z, z0, table()) == oracle::g_prime(z, z0));
  }
}

TEST_CASE("beta at primes and semiprimes") {
  const auto s = build_prime_sieve(30, 3, table());
  CHECK(beta_prime(1, s) == 1);
  CHECK(beta_prime(10'007, s) == 1);
  for (std::uint64_t n : {5ull * 7, 11ull * 13, 3ull * 29}) {
    const auto b = beta_prime(n, s);
    CHECK(b >= 0);
    CHECK(b < 1);
  }
  // Direct divisor sum.
  Rational direct = 0;
  for (std::uint64_t d = 1; d <= 35; ++d) {
    if (35 % d == 0) direct += s.lambda_at(d);
  }
  CHECK(beta_prime(35, s) == direct * direct);
}

TEST_CASE("float path tracks the exact weights") {
  const auto exact = build_prime_sieve(300, 3, table());
  const auto approx = build_prime_sieve_float(300, 3, table());
  REQUIRE(approx.support == exact.support);
  CHECK(approx.G == doctest::Approx(exact.G.get_d()).epsilon(1e-14));
  for (std::size_t i = 0; i < exact.support.size(); ++i) {
    REQUIRE(std::abs(approx.lambda[i] - exact.lambda[i].get_d()) <= 1e-13);
  }
  for (std::uint64_t n = 1; n <= 2000; n += 37) {
    CHECK(beta_prime(n, approx) == doctest::Approx(beta_prime(n, exact).get_d()).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("level limits") {
  CHECK_THROWS_AS(build_prime_sieve(kExactLevelLimit + 1, 2, arith::FactorTable::build(20'000)), ResourceError);
  CHECK_THROWS_AS(build_prime_sieve(30'000, 2, table()), RangeError);
}

}

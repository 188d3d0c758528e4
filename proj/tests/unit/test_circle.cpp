#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "../support/oracles.hpp"
#include "dsieve/circle.hpp"
#include "dsieve/errors.hpp"
#include "dsieve/rng.hpp"

using namespace dsieve;
using namespace dsieve::circle;

namespace {

Fraction frac(std::int64_t a, std::int64_t b) { return Fraction::make(a, b); }

// min over q <= bound, all a, of |y - a/q| by scanning q directly.
Fraction brute_nearest(Fraction y, std::uint64_t bound) {
  mpq_class best(1);
  const mpq_class yy(y.num, y.den);
  for (std::uint64_t q = 1; q <= bound; ++q) {
    const mpq_class qy = yy * static_cast<unsigned long>(q);
    const mpz_class fl = qy.get_num() / qy.get_den();
    for (mpz_class a : {mpz_class(fl), mpz_class(fl + 1)}) {
      mpq_class near(a, static_cast<unsigned long>(q));
      near.canonicalize();
      mpq_class d = yy - near;
      if (d < 0) d = -d;
      best = std::min(best, d);
    }
  }
  best.canonicalize();
  return Fraction::make(best.get_num().get_si(), best.get_den().get_si());
}

}  // namespace

TEST_SUITE("circle") {

TEST_CASE("circle norm") {
  CHECK(circle_norm(CirclePoint::rational(0, 1)).exact == frac(0, 1));
  CHECK(circle_norm(CirclePoint::rational(3, 4)).exact == frac(1, 4));
  CHECK(circle_norm(CirclePoint::real(0.3)).value() == doctest::Approx(0.3));
  CHECK_FALSE(circle_norm(CirclePoint::real(0.3)).exact.has_value());
  CHECK(circle_norm(CirclePoint::real(0.75)).value() == doctest::Approx(0.25));
  CHECK(circle_norm(CirclePoint::rational(-1, 3)).exact == frac(1, 3));
}

TEST_CASE("points are reduced and wrapped") {
  const auto p = CirclePoint::rational(10, 4);
  CHECK(p.fraction() == frac(1, 2));
  CHECK(CirclePoint::parse("7/3").fraction() == frac(1, 3));
  CHECK_FALSE(CirclePoint::parse("0.25").exact());
  CHECK(CirclePoint::parse("0.25") == CirclePoint::rational(1, 4));
  CHECK_THROWS_AS(CirclePoint::rational(1, 0), ArgumentError);
  CHECK_THROWS_AS(CirclePoint::parse("1/x"), ArgumentError);
  CHECK_THROWS_AS(PointSet::parse("1/3,2/6,1/3"), ArgumentError);
}

TEST_CASE("minimal gap") {
  CHECK(min_gap(PointSet::parse("1/5,2/5")).exact == frac(1, 5));
  CHECK(min_gap(PointSet::parse("0/1,1/2")).exact == frac(1, 2));
  CHECK(min_gap(PointSet::parse("1/7,2/7,4/7")).exact == frac(1, 7));
  CHECK(min_gap(PointSet::parse("1/10,9/10")).exact == frac(1, 5));
  CHECK_THROWS_AS(min_gap(PointSet::parse("1/3")), ArgumentError);
}

TEST_CASE("signed sums") {
  const auto empty = signed_sums(PointSet{});
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].first.is_zero());
  CHECK(empty[0].second == CirclePoint::rational(0, 1));

  const auto one = signed_sums(PointSet::parse("1/4"));
  REQUIRE(one.size() == 3);
  CHECK(one[0].second == CirclePoint::rational(3, 4));
  CHECK(one[1].second == CirclePoint::rational(0, 1));
  CHECK(one[2].second == CirclePoint::rational(1, 4));

  const auto eighths = signed_sums(PointSet::parse("1/8,2/8,4/8"));
  CHECK(eighths.size() == 27);
  for (const auto& [eps, value] : eighths) {
    if (eps.is_zero()) continue;
    const auto f = value.fraction();
    CHECK(8 % f.den == 0);
    CHECK(f.num * (8 / f.den) >= 1);
  }
}

TEST_CASE("enumeration cap") {
  std::vector<CirclePoint> pts;
  for (int k = 1; k <= 30; ++k) pts.push_back(CirclePoint::rational(k, 1024));
  const PointSet big(pts);
  CHECK_THROWS_AS(signed_sums(big), ResourceError);
  CHECK_THROWS_AS(delta_star(big), ResourceError);
}

TEST_CASE("dissociativity") {
  CHECK(is_dissociate(PointSet::parse("1/64,2/64,4/64,8/64,16/64,32/64")));
  CHECK_FALSE(is_dissociate(PointSet::parse("0")));
  CHECK_FALSE(is_dissociate(PointSet::parse("1/7,2/7,3/7")));
  CHECK(delta_star(PointSet::parse("1/8,2/8,4/8")).exact == frac(1, 8));
  CHECK(delta_star(PointSet::parse("1/5,2/5")).exact == frac(1, 5));
  CHECK(delta_star(PointSet::parse("0/1,1/3")).exact == frac(0, 1));
  CHECK(delta_star(PointSet::parse("0,0.25")).is_zero());
  CHECK_THROWS_AS(delta_star(PointSet{}), ArgumentError);
}

TEST_CASE("delta_star positive exactly on dissociate sets, matching brute force") {
  Xorshift64Star rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t m = 3 + rng.below(300);
    std::vector<std::uint64_t> r;
    const std::size_t n = 1 + rng.below(6);
    while (r.size() < n) {
      const auto v = rng.below(m);
      if (std::find(r.begin(), r.end(), v) == r.end()) r.push_back(v);
      if (r.size() >= m) break;
    }
    const auto x = PointSet::from_residues(r, m);
    const auto ds = delta_star(x);
    const bool dis = oracle::dissociate_mod(r, m);
    REQUIRE(is_dissociate(x) == dis);
    REQUIRE(ds.is_zero() == !dis);
    REQUIRE(*ds.exact == frac(static_cast<std::int64_t>(oracle::delta_star_num(r, m)), static_cast<std::int64_t>(m)));
  }
}

TEST_CASE("real mode agrees with exact mode") {
  const auto x = PointSet::parse("1/8,2/8,4/8");
  CHECK(delta_star(x.to_real()).value() == doctest::Approx(0.125));
  CHECK(is_dissociate(x.to_real()));
  CHECK_FALSE(is_dissociate(PointSet::parse("1/7,2/7,3/7").to_real()));
}

TEST_CASE("arithmetic delta") {
  const auto x = PointSet::parse("1/7");
  CHECK(delta_star_arith(x, 2, 2).exact == frac(1, 7));
  CHECK(delta_star_arith(x, 7, 2).exact == frac(0, 1));
  CHECK(delta_star_arith(x, 7, 2, ArithMethod::brute_force).exact == frac(0, 1));

  // q in {1, 3}: min(||y||, ||3y|| / 3) for y = sqrt 2 - 1, evaluated in long double.
  const long double y = std::sqrt(2.0L) - 1.0L;
  auto norm = [](long double v) {
    v -= std::floor(v);
    return std::min(v, 1.0L - v);
  };
  const long double expected = std::min(norm(y), norm(3 * y) / 3);
  const auto xr = PointSet({CirclePoint::real(static_cast<double>(y))});
  CHECK(delta_star_arith(xr, 3, 2).value() == doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
  CHECK(delta_star_arith(xr, 3, 2).value() == doctest::Approx(0.08088).epsilon(1e-4));

  CHECK_THROWS_AS(delta_star_arith(x, 0.5, 2), ArgumentError);
  CHECK_THROWS_AS(delta_star_arith(x, 5, 1), ArgumentError);
}

TEST_CASE("accelerated arithmetic delta equals the brute-force scan") {
  Xorshift64Star rng(5);
  for (int trial = 0; trial < 150; ++trial) {
    const std::uint64_t m = 50 + rng.below(5000);
    std::vector<std::uint64_t> r;
    const std::size_t n = 1 + rng.below(5);
    while (r.size() < n) {
      const auto v = 1 + rng.below(m - 1);
      if (std::find(r.begin(), r.end(), v) == r.end()) r.push_back(v);
    }
    const auto x = PointSet::from_residues(r, m);
    const double z = 1 + rng.below(80);
    const std::uint64_t z0 = std::uint64_t{2} + rng.below(6);
    const auto a = delta_star_arith(x, z, z0, ArithMethod::accelerated);
    const auto b = delta_star_arith(x, z, z0, ArithMethod::brute_force);
    REQUIRE(a.exact == b.exact);
  }
}

TEST_CASE("nearest fraction distance against a scan over denominators") {
  Xorshift64Star rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::int64_t den = 2 + static_cast<std::int64_t>(rng.below(100'000));
    const std::int64_t num = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(den)));
    const std::uint64_t bound = 1 + rng.below(300);
    const auto y = frac(num, den);
    REQUIRE(nearest_fraction_distance(y, bound) == brute_nearest(y, bound));
  }
  CHECK_THROWS_AS(nearest_fraction_distance(frac(1, 3), 0), ArgumentError);
}

TEST_CASE("greedy extraction") {
  CHECK(greedy_dissociate(PointSet::parse("1/7,2/7,3/7")).to_string() == PointSet::parse("1/7,2/7").to_string());
  CHECK(greedy_dissociate(PointSet{}).empty());
  const auto pow2 = PointSet::parse("1/64,2/64,4/64,8/64");
  CHECK(greedy_dissociate(pow2).size() == 4);
  CHECK_THROWS_AS(greedy_dissociate(PointSet::parse("0.5,0.25")), ArgumentError);
}

TEST_CASE("signed span") {
  const auto s = span(PointSet::parse("1/7,2/7"));
  CHECK(s.size() == 7);
  const auto zero = span(PointSet{});
  REQUIRE(zero.size() == 1);
  CHECK(zero[0] == CirclePoint::rational(0, 1));
  CHECK(span(PointSet::parse("1/2")).size() == 2);
}

TEST_CASE("finite groups") {
  const FiniteGroup g({5, 6});
  CHECK(g.order() == 30);
  CHECK(g.encode({3, 2}) == 20);
  CHECK(g.decode(20) == std::vector<std::uint64_t>{3, 2});
  CHECK(g.add(g.encode({4, 5}), g.encode({1, 1})) == g.encode({0, 0}));
  CHECK(g.negate(g.encode({1, 2})) == g.encode({4, 4}));
  const std::vector<std::uint64_t> d = {g.encode({1, 1}), g.encode({1, 4}), g.encode({3, 2}), g.encode({3, 3})};
  CHECK(g.is_dissociate(d));
  // 1 + 2 - 3 = 0 in Z/6.
  const FiniteGroup z6({6});
  CHECK_FALSE(z6.is_dissociate({1, 2, 3}));
  CHECK(z6.span({1}) == std::vector<std::uint64_t>{0, 1, 5});
  CHECK_THROWS_AS(FiniteGroup({}), ArgumentError);
  CHECK_THROWS_AS(g.decode(30), RangeError);
  CHECK_THROWS_AS(g.encode({1}), ArgumentError);
}

TEST_CASE("group greedy extraction is maximal") {
  Xorshift64Star rng(3);
  const FiniteGroup g({101});
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::uint64_t> cand;
    for (int i = 0; i < 20; ++i) cand.push_back(rng.below(101));
    const auto d = g.greedy_dissociate(cand);
    REQUIRE(oracle::dissociate_mod(d, 101));
    const auto sp = g.span(d);
    for (auto c : cand) REQUIRE(std::binary_search(sp.begin(), sp.end(), c));
  }
}

}

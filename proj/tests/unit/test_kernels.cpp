// Serial reference versus OpenMP kernels, plus exactness of the fixed-point
// G# arithmetic.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "../support/oracles.hpp"
#include "dsieve/arith.hpp"
#include "dsieve/kernels.hpp"
#include "dsieve/parallel.hpp"
#include "dsieve/rng.hpp"
#include "dsieve/square_sieve.hpp"

using namespace dsieve;
using namespace dsieve::kernels;

namespace {

std::vector<GSharpRow> collect(bool parallel, std::uint64_t limit, std::size_t segment, std::uint64_t min_from,
                               GSharpSummary& summary) {
  std::vector<GSharpRow> rows;
  const GSharpSink sink = [&](const GSharpRow& r) { rows.push_back(r); };
  summary = parallel ? omp::gsharp_scan(limit, segment, sink, min_from)
                     : serial::gsharp_scan(limit, segment, sink, min_from);
  return rows;
}

bool same_rows(const std::vector<GSharpRow>& a, const std::vector<GSharpRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].z != b[i].z || a[i].g_fixed != b[i].g_fixed || a[i].running_min_num != b[i].running_min_num ||
        a[i].argmin != b[i].argmin)
      return false;
  }
  return true;
}

std::vector<Phase> random_phases(Xorshift64Star& rng, std::size_t count) {
  std::vector<Phase> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 2 == 0) {
      const std::uint64_t den = 1 + rng.below(10'000);
      out.push_back(Phase::rational(rng.below(den), den));
    } else {
      out.push_back(Phase::approx(rng.uniform()));
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("segmented spf: serial, parallel and linear agree") {
  const auto linear = serial::spf_linear(300'000);
  for (std::size_t segment : {std::size_t{97}, std::size_t{4096}, std::size_t{1} << 20}) {
    CHECK(serial::spf_segmented(300'000, segment) == linear);
    CHECK(omp::spf_segmented(300'000, segment) == linear);
  }
}

TEST_CASE("parallel result independent of thread count") {
  const auto reference = serial::spf_segmented(100'000, 1000);
  for (int threads : {1, 2, 4}) {
    parallel::set_threads(threads);
    CHECK(omp::spf_segmented(100'000, 1000) == reference);
  }
  parallel::set_threads(0);
}

TEST_CASE("G# scan: serial and parallel rows are identical") {
  for (std::size_t segment : {std::size_t{7}, std::size_t{64}, std::size_t{1} << 20}) {
    for (std::uint64_t min_from : {std::uint64_t{1}, std::uint64_t{100}}) {
      GSharpSummary s1, s2;
      const auto a = collect(false, 20'000, segment, min_from, s1);
      const auto b = collect(true, 20'000, segment, min_from, s2);
      CHECK(a.size() == 20'000);
      CHECK(same_rows(a, b));
      CHECK(s1.argmin == s2.argmin);
      CHECK(s1.g_fixed == s2.g_fixed);
      CHECK(s1.min_g_fixed == s2.min_g_fixed);
      CHECK(s1.terms == s2.terms);
    }
  }
}

TEST_CASE("G# scan argmin") {
  GSharpSummary s;
  collect(true, 20'000, 512, 1, s);
  CHECK(s.argmin == 28);
  collect(true, 20'000, 512, 100, s);
  CHECK(s.argmin == 178);
  collect(true, 20'000, 512, 179, s);
  CHECK(s.argmin == 190);
}

TEST_CASE("fixed-point G# within the rounding bound of the exact value") {
  GSharpSummary s;
  const auto rows = collect(false, 400, 64, 1, s);
  const auto table = arith::FactorTable::build(1000);
  std::uint64_t terms = 0;
  for (const auto& row : rows) {
    if (row.z % 2 == 1 && oracle::is_squarefree(row.z)) ++terms;
    const Rational exact = oracle::g_sharp(row.z);
    Rational diff = square_sieve::fixed_to_rational(row.g_fixed) - exact;
    if (diff < 0) diff = -diff;
    REQUIRE(diff <= square_sieve::fixed_error_bound(terms));
  }
  CHECK(s.terms == terms);
}

TEST_CASE("h fixed segment is h(n) * 2^64 rounded to nearest") {
  const auto base = serial::spf_linear(100);
  std::vector<std::uint64_t> primes;
  for (std::uint64_t n = 2; n <= 100; ++n) {
    if (base[n] == n) primes.push_back(n);
  }
  std::vector<u128> out;
  h_fixed_segment(1, 5001, primes, out);
  REQUIRE(out.size() == 5000);
  const auto table = arith::FactorTable::build(5000);
  const mpz_class scale = mpz_class(1) << 64;
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    const mpq_class scaled = arith::h(n, table) * scale + mpq_class(1, 2);
    const mpz_class expected = scaled.get_num() / scaled.get_den();
    const u128 got = out[n - 1];
    const mpz_class got_z = (mpz_class(static_cast<unsigned long>(got >> 64)) << 64) +
                            mpz_class(static_cast<unsigned long>(got & 0xFFFFFFFFFFFFFFFFULL));
    REQUIRE(got_z == expected);
  }
}

TEST_CASE("signed sums: serial, parallel and brute force") {
  Xorshift64Star rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint64_t m = 2 + rng.below(5000);
    std::vector<std::uint64_t> r;
    const std::size_t n = rng.below(10);
    for (std::size_t i = 0; i < n; ++i) r.push_back(rng.below(m));
    const auto a = serial::signed_sums(r, m);
    const auto b = omp::signed_sums(r, m);
    REQUIRE(a == b);
    REQUIRE(a.size() == static_cast<std::size_t>(std::pow(3, n)));
    // The all-zero pattern sits in the middle of the lexicographic order.
    CHECK(a[a.size() / 2] == 0);
    std::vector<std::pair<std::uint64_t, bool>> brute;
    oracle::signed_sums_rec(r, 0, m, 0, false, brute);
    std::vector<std::uint64_t> x(a), y;
    for (auto [v, nz] : brute) y.push_back(v);
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    CHECK(x == y);
  }
}

TEST_CASE("exponential sum matrix: serial equals parallel bitwise and matches a long double oracle") {
  Xorshift64Star rng(7);
  const std::size_t n = 3000, k = 64;
  std::vector<std::complex<double>> w(n);
  std::vector<std::int64_t> ints(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::polar(rng.uniform(), 6.283185307179586 * rng.uniform());
    ints[i] = static_cast<std::int64_t>(rng.below(1'000'000)) - 500'000;
  }
  const auto phases = random_phases(rng, k);
  std::vector<std::complex<double>> a(k), b(k);
  serial::exp_sum_matrix(w, ints, phases, a);
  omp::exp_sum_matrix(w, ints, phases, b);
  CHECK(a == b);
  for (std::size_t j = 0; j < k; ++j) {
    if (!phases[j].exact) continue;
    const long double x = static_cast<long double>(phases[j].num) / phases[j].den;
    CHECK(std::abs(a[j] - oracle::naive_exp_sum(ints, w, x)) < 1e-9);
  }

  // Transposed orientation over the same data.
  std::vector<std::complex<double>> wt(k);
  for (std::size_t j = 0; j < k; ++j) wt[j] = w[j];
  std::vector<std::complex<double>> c(n), d(n);
  serial::exp_sum_transposed(wt, phases, ints, c);
  omp::exp_sum_transposed(wt, phases, ints, d);
  CHECK(c == d);
}

TEST_CASE("frac_mul reduces exactly for rational phases") {
  CHECK(frac_mul(3, Phase::rational(5, 7)) == doctest::Approx(1.0 / 7));
  CHECK(frac_mul(-3, Phase::rational(5, 7)) == doctest::Approx(6.0 / 7));
  CHECK(frac_mul(1'000'000'007, Phase::rational(1, 2)) == 0.5);
  const double f = frac_mul(123456789, Phase::approx(0.1));
  CHECK(f >= 0.0);
  CHECK(f < 1.0);
  CHECK(f == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("Fourier block evaluation: serial equals parallel") {
  Xorshift64Star rng(99);
  std::vector<FourierBlock> blocks;
  for (std::uint64_t d : {1u, 3u, 5u, 9u, 15u, 45u}) {
    FourierBlock b;
    b.d = d;
    for (std::uint64_t i = 0; i < d; ++i) b.weights.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    blocks.push_back(b);
  }
  std::vector<std::complex<double>> a(2000), b(2000);
  serial::fourier_series_eval(blocks, 17, a);
  omp::fourier_series_eval(blocks, 17, b);
  CHECK(a == b);
  // Direct evaluation at one n.
  const std::uint64_t n = 17 + 1234;
  std::complex<double> direct = 0;
  for (const auto& blk : blocks) {
    for (std::uint64_t bb = 1; bb <= blk.d; ++bb) direct += blk.weights[bb - 1] * unit(static_cast<double>(n * bb % blk.d) / blk.d);
  }
  CHECK(std::abs(a[1234] - direct) < 1e-12);
}

}

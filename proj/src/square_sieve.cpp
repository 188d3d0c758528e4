#include "dsieve/square_sieve.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "dsieve/errors.hpp"

namespace dsieve::square_sieve {

namespace {

std::uint64_t level_of(double z, const arith::FactorTable& table) {
  if (!(z >= 1.0) || !std::isfinite(z)) throw ArgumentError("sieve level z must be >= 1");
  const auto level = static_cast<std::uint64_t>(std::floor(z));
  if (level > table.limit()) {
    throw RangeError("sieve level " + std::to_string(level) + " exceeds factor table limit " +
                     std::to_string(table.limit()));
  }
  return level;
}

void require_odd_squarefree(std::uint64_t q, const arith::FactorTable& table) {
  if (q == 0 || !arith::is_odd_squarefree(q, table)) {
    throw ArgumentError("modulus " + std::to_string(q) + " is not odd and squarefree");
  }
}

Rational u128_to_rational(kernels::u128 v) {
  Integer hi = to_integer(static_cast<std::uint64_t>(v >> 64));
  Integer lo = to_integer(static_cast<std::uint64_t>(v));
  Integer n = (hi << 64) + lo;
  return Rational(n);
}

}  // namespace

Rational g_sharp(double z, const arith::FactorTable& table) {
  const std::uint64_t level = level_of(z, table);
  Rational g = 0;
  for (std::uint64_t q = 1; q <= level; q += 2) g += arith::h(q, table);
  return g;
}

kernels::GSharpSummary g_sharp_scan(std::uint64_t limit, const ScanOptions& options,
                                    const kernels::GSharpSink& sink) {
  if (limit < 2) throw ArgumentError("gsharp scan needs limit >= 2");
  if (options.segment_size == 0) throw ArgumentError("segment size must be positive");
  if (limit > (std::uint64_t{1} << 34)) throw ResourceError("gsharp scan limit above 2^34");
  if (options.min_from == 0 || options.min_from > limit) {
    throw ArgumentError("min_from must lie in [1, limit]");
  }
  return options.parallel ? kernels::omp::gsharp_scan(limit, options.segment_size, sink, options.min_from)
                          : kernels::serial::gsharp_scan(limit, options.segment_size, sink, options.min_from);
}

double fixed_to_double(kernels::u128 v) {
  return std::ldexp(static_cast<double>(v), -kernels::kFixedFractionBits);
}

Rational fixed_to_rational(kernels::u128 v) {
  Rational r = u128_to_rational(v);
  r /= Rational(Integer(1) << kernels::kFixedFractionBits);
  return r;
}

Rational fixed_error_bound(std::uint64_t terms) {
  Rational r(to_integer(terms), Integer(1) << (kernels::kFixedFractionBits + 1));
  r.canonicalize();
  return r;
}

// --- SquareSieveSystem ------------------------------------------------------

std::size_t SquareSieveSystem::index_of(std::uint64_t q) const {
  const auto it = std::lower_bound(moduli.begin(), moduli.end(), q);
  if (it == moduli.end() || *it != q) {
    throw ArgumentError("modulus " + std::to_string(q) + " is not in the sieve support");
  }
  return static_cast<std::size_t>(it - moduli.begin());
}

bool SquareSieveSystem::in_squares(std::uint64_t n, std::size_t idx) const {
  for (std::uint64_t p : primes[idx]) {
    if (!square_tables[p][n % p]) return false;
  }
  return true;
}

bool SquareSieveSystem::in_avoided(std::uint64_t n, std::size_t idx) const {
  for (std::uint64_t p : primes[idx]) {
    if (square_tables[p][n % p]) return false;
  }
  return true;
}

SquareSieveSystem build_square_sieve(double z, const arith::FactorTable& table) {
  const std::uint64_t level = level_of(z, table);
  SquareSieveSystem sys;
  sys.z = z;
  sys.level = level;

  std::vector<int> mu(level + 1, 0);
  std::vector<Rational> h(level + 1, Rational(0));
  for (std::uint64_t m = 1; m <= level; ++m) {
    mu[m] = arith::mobius(m, table);
    if (m % 2 == 1 && mu[m] != 0) h[m] = arith::h(m, table);
  }
  for (std::uint64_t q = 1; q <= level; q += 2) {
    if (mu[q] == 0) continue;
    sys.moduli.push_back(q);
    sys.primes.push_back(table.prime_factors(q));
    std::uint64_t k = 1;
    for (std::uint64_t p : sys.primes.back()) k *= (p + 1) / 2;
    sys.kq_size.push_back(k);
    sys.G_sharp += h[q];
  }

  sys.square_tables.assign(level + 1, {});
  for (std::uint64_t p : table.primes_up_to(level)) {
    if (p == 2) continue;
    auto& t = sys.square_tables[p];
    t.assign(p, 0);
    for (std::uint64_t k = 0; k < p; ++k) t[k * k % p] = 1;
  }

  for (std::size_t i = 0; i < sys.moduli.size(); ++i) {
    const std::uint64_t q = sys.moduli[i];
    const Rational one_star_h = to_rational(q, sys.kq_size[i]);

    std::int64_t s = 0;       // sum over odd squarefree m <= z/q, (m, q) = 1, of mu(m)
    Rational t = 0;           // sum over m <= z/q, (m, q) = 1, of h(m)
    for (std::uint64_t m = 1; m <= level / q; m += 2) {
      if (mu[m] == 0 || std::gcd(m, q) != 1) continue;
      s += mu[m];
      t += h[m];
    }
    Rational sharp = one_star_h * s / sys.G_sharp;
    sharp.canonicalize();
    Rational classical = one_star_h * t / sys.G_sharp;
    if (mu[q] < 0) classical = -classical;
    classical.canonicalize();
    sys.lambda_sharp.push_back(std::move(sharp));
    sys.lambda_classical.push_back(std::move(classical));
  }
  return sys;
}

Rational beta_square(std::uint64_t n, const SquareSieveSystem& sys, BetaMethod method) {
  Rational s = 0;
  for (std::size_t i = 0; i < sys.moduli.size(); ++i) {
    if (method == BetaMethod::sharp) {
      if (sgn(sys.lambda_sharp[i]) != 0 && sys.in_squares(n, i)) s += sys.lambda_sharp[i];
    } else {
      if (sgn(sys.lambda_classical[i]) != 0 && sys.in_avoided(n, i)) s += sys.lambda_classical[i];
    }
  }
  return s * s;
}

Rational main_term(const SquareSieveSystem& sys) {
  Rational total = 0;
  const std::size_t k = sys.moduli.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (sgn(sys.lambda_sharp[i]) == 0) continue;
    for (std::size_t j = 0; j < k; ++j) {
      if (sgn(sys.lambda_sharp[j]) == 0) continue;
      const std::uint64_t q1 = sys.moduli[i];
      const std::uint64_t q2 = sys.moduli[j];
      const std::uint64_t g = std::gcd(q1, q2);
      const std::uint64_t l = q1 / g * q2;
      // |K| is multiplicative: |K_[q1,q2]| = |K_q1| |K_q2| / |K_(q1,q2)|.
      std::uint64_t kg = 1;
      for (std::uint64_t p : sys.primes[i]) {
        if (g % p == 0) kg *= (p + 1) / 2;
      }
      const std::uint64_t kl = sys.kq_size[i] / kg * sys.kq_size[j];
      total += sys.lambda_sharp[i] * sys.lambda_sharp[j] * to_rational(kl, l);
    }
  }
  return total;
}

Normalization normalization(const SquareSieveSystem& sys) {
  Normalization out;
  for (const auto& l : sys.lambda_sharp) out.lambda_sharp_sum += l;
  out.main_term = main_term(sys);
  out.inverse_g_sharp = 1 / sys.G_sharp;
  out.lambda_classical_1 = sys.lambda_classical.empty() ? Rational(0) : sys.lambda_classical.front();
  out.cross_identity = true;
  for (std::size_t i = 0; i < sys.moduli.size(); ++i) {
    const std::uint64_t l = sys.moduli[i];
    Rational s = 0;
    for (std::size_t j = i; j < sys.moduli.size(); ++j) {
      if (sys.moduli[j] % l == 0) s += sys.lambda_sharp[j];
    }
    if (sys.primes[i].size() % 2 == 1) s = -s;
    if (s != sys.lambda_classical[i]) {
      out.cross_identity = false;
      break;
    }
  }
  return out;
}

// --- eta --------------------------------------------------------------------

std::complex<double> eta(std::uint64_t q, std::uint64_t a, const arith::FactorTable& table) {
  require_odd_squarefree(q, table);
  const auto k = arith::squares_mod(q);
  const std::uint64_t ar = a % q;
  std::complex<double> s = 0;
  for (std::uint64_t r : k.members) {
    const auto ka = static_cast<std::uint64_t>(static_cast<unsigned __int128>(r) * ar % q);
    s += kernels::unit(-static_cast<double>(ka) / static_cast<double>(q));
  }
  return s;
}

std::vector<std::complex<double>> eta_table(std::uint64_t q, const arith::FactorTable& table) {
  require_odd_squarefree(q, table);
  const auto k = arith::squares_mod(q);
  std::vector<std::complex<double>> in(q, 0.0), out(q);
  for (std::uint64_t r : k.members) in[r] = 1.0;
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(q), reinterpret_cast<fftw_complex*>(in.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

std::vector<std::complex<double>> indicator_from_eta(const std::vector<std::complex<double>>& eta) {
  const std::size_t q = eta.size();
  if (q == 0) throw ArgumentError("empty eta table");
  std::vector<std::complex<double>> in(eta), out(q);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(q), reinterpret_cast<fftw_complex*>(in.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  for (auto& v : out) v /= static_cast<double>(q);
  return out;
}

// --- Fourier expansion ------------------------------------------------------

std::complex<double> FourierWeightTable::weight(std::uint64_t d, std::uint64_t b) const {
  const auto it = std::lower_bound(blocks.begin(), blocks.end(), d,
                                   [](const kernels::FourierBlock& blk, std::uint64_t v) { return blk.d < v; });
  if (it == blocks.end() || it->d != d || b == 0 || b > d) return 0.0;
  return it->weights[b - 1];
}

FourierWeightTable fourier_weights(const SquareSieveSystem& sys, std::uint64_t cap, std::uint64_t memory_budget) {
  if (sys.level > cap) {
    throw ResourceError("fourier weights limited to z <= " + std::to_string(cap) + ", got " +
                        std::to_string(sys.level));
  }
  // Collapse pairs by their lcm: c_L = sum_{[q1,q2] = L} lambda#_q1 lambda#_q2 / L.
  std::map<std::uint64_t, Rational> coeff;
  std::map<std::uint64_t, std::uint64_t> k_size;
  const std::size_t k = sys.moduli.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (sgn(sys.lambda_sharp[i]) == 0) continue;
    for (std::size_t j = 0; j < k; ++j) {
      if (sgn(sys.lambda_sharp[j]) == 0) continue;
      const std::uint64_t q1 = sys.moduli[i];
      const std::uint64_t q2 = sys.moduli[j];
      const std::uint64_t g = std::gcd(q1, q2);
      const std::uint64_t l = q1 / g * q2;
      coeff[l] += sys.lambda_sharp[i] * sys.lambda_sharp[j] / to_rational(l);
      if (!k_size.count(l)) {
        std::uint64_t kg = 1;
        for (std::uint64_t p : sys.primes[i]) {
          if (g % p == 0) kg *= (p + 1) / 2;
        }
        k_size[l] = sys.kq_size[i] / kg * sys.kq_size[j];
      }
    }
  }

  FourierWeightTable out;
  out.level = sys.level;

  // Blocks needed: every divisor d of every L carrying a nonzero coefficient.
  std::map<std::uint64_t, std::size_t> block_index;
  std::uint64_t bytes = 0;
  for (const auto& [l, c] : coeff) {
    out.w1_exact += c * to_rational(k_size[l]);
    if (sgn(c) == 0) continue;
    for (std::uint64_t d = 1; d * d <= l; ++d) {
      if (l % d != 0) continue;
      for (std::uint64_t dd : {d, l / d}) {
        if (!block_index.count(dd)) {
          block_index[dd] = 0;
          bytes += dd * sizeof(std::complex<double>);
        }
      }
    }
  }
  if (bytes > memory_budget) {
    throw ResourceError("fourier weight table needs " + std::to_string(bytes) + " bytes, budget is " +
                        std::to_string(memory_budget));
  }
  for (auto& [d, idx] : block_index) {
    idx = out.blocks.size();
    out.blocks.push_back({d, std::vector<std::complex<double>>(d, 0.0)});
  }

  // Primes of L are those of the moduli, all <= level, so the factor table
  // for eta only needs to reach max L; build a local one.
  std::uint64_t max_l = 2;
  for (const auto& [l, c] : coeff) max_l = std::max(max_l, l);
  const auto local = arith::FactorTable::build(max_l);
  for (const auto& [l, c] : coeff) {
    if (sgn(c) == 0) continue;
    const double cl = c.get_d();
    const auto et = eta_table(l, local);
    for (std::uint64_t a = 0; a < l; ++a) {
      const std::uint64_t g = std::gcd(a, l);  // gcd(0, l) = l
      const std::uint64_t d = l / g;
      const std::uint64_t b = a == 0 ? 1 : a / g;
      out.blocks[block_index[d]].weights[b - 1] += cl * et[a];
    }
  }
  return out;
}

std::vector<std::complex<double>> fourier_beta(const FourierWeightTable& table, std::uint64_t n_begin,
                                               std::size_t count, bool parallel) {
  std::vector<std::complex<double>> out(count);
  if (parallel) {
    kernels::omp::fourier_series_eval(table.blocks, n_begin, out);
  } else {
    kernels::serial::fourier_series_eval(table.blocks, n_begin, out);
  }
  return out;
}

}  // namespace dsieve::square_sieve

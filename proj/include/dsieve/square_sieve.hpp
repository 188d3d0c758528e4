#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dsieve/arith.hpp"
#include "dsieve/kernels.hpp"

namespace dsieve::square_sieve {

/// G#(z) = sum over odd squarefree q <= z of prod_{p | q} (p-1)/(p+1).
Rational g_sharp(double z, const arith::FactorTable& table);

struct ScanOptions {
  std::size_t segment_size = std::size_t{1} << 20;
  bool parallel = true;
  // The running minimum of G#(z)/z only considers z >= min_from.
  std::uint64_t min_from = 1;
};

/// Streaming scan of G#(z) for z = 1..limit. Each h(q) is rounded once to
/// a multiple of 2^-64, so |G#_fixed(z) - G#(z)| <= terms * 2^-65 and the
/// ratio comparisons behind the running minimum are exact on the fixed
/// values. Rows reach the sink in increasing z.
kernels::GSharpSummary g_sharp_scan(std::uint64_t limit, const ScanOptions& options = {},
                                    const kernels::GSharpSink& sink = {});

double fixed_to_double(kernels::u128 v);
Rational fixed_to_rational(kernels::u128 v);
// Certified bound on |fixed - exact| after `terms` rounded additions.
Rational fixed_error_bound(std::uint64_t terms);

struct SquareSieveSystem {
  double z = 1.0;
  std::uint64_t level = 1;
  std::vector<std::uint64_t> moduli;                 // odd squarefree q <= z, ascending
  std::vector<std::vector<std::uint64_t>> primes;    // prime factors of each modulus
  std::vector<std::uint64_t> kq_size;                // |K_q|
  std::vector<Rational> lambda_sharp;                // aligned with moduli
  std::vector<Rational> lambda_classical;            // lambda_l, aligned with moduli
  Rational G_sharp;

  std::size_t index_of(std::uint64_t q) const;  // throws ArgumentError off the support
  bool in_squares(std::uint64_t n, std::size_t idx) const;   // n in K_q
  bool in_avoided(std::uint64_t n, std::size_t idx) const;   // n in Omega_q

  // square_tables[p][r] != 0 iff r is a square mod p, for odd primes p <= level.
  std::vector<std::vector<char>> square_tables;
};

///   lambda#_q = (q/|K_q|) sum_{d <= z odd squarefree, q | d} mu(d/q) / G#(z)
///   lambda_l  = mu(l) (1*h)(l) sum_{m <= z/l, (m, l) = 1} h(m) / G#(z)
SquareSieveSystem build_square_sieve(double z, const arith::FactorTable& table);

enum class BetaMethod { sharp, classical };

/// sharp:     (sum_{q : n in K_q} lambda#_q)^2
/// classical: (sum_l lambda_l 1_{Omega_l}(n))^2
Rational beta_square(std::uint64_t n, const SquareSieveSystem& sys, BetaMethod method = BetaMethod::sharp);

/// sum_{q1, q2} |K_[q1,q2]| / [q1,q2] lambda#_q1 lambda#_q2.
Rational main_term(const SquareSieveSystem& sys);

/// eta(q; a) = sum_{k in K_q} e(-k a / q), so that
/// 1_{K_q}(n) = (1/q) sum_{a mod q} eta(q; a) e(n a / q).
std::complex<double> eta(std::uint64_t q, std::uint64_t a, const arith::FactorTable& table);
/// eta(q; a) for all a, by one forward DFT of 1_{K_q}.
std::vector<std::complex<double>> eta_table(std::uint64_t q, const arith::FactorTable& table);
/// Inverse of eta_table: (1/q) sum_a eta(q; a) e(n a / q) for n in [0, q).
std::vector<std::complex<double>> indicator_from_eta(const std::vector<std::complex<double>>& eta);

struct Normalization {
  Rational lambda_sharp_sum;     // sum_q lambda#_q, equals 1
  Rational main_term;            // equals 1 / G#(z)
  Rational inverse_g_sharp;
  Rational lambda_classical_1;   // equals 1
  bool cross_identity = false;   // lambda_l = mu(l) sum_{q : l | q} lambda#_q for every l

  bool all_hold() const {
    return lambda_sharp_sum == 1 && main_term == inverse_g_sharp && lambda_classical_1 == 1 && cross_identity;
  }
};

Normalization normalization(const SquareSieveSystem& sys);

inline constexpr std::uint64_t kFourierLevelCap = 500;

/// w_d(b/d) = sum_{q1, q2 : d | L} lambda#_q1 lambda#_q2 / L * eta(L; b L / d),
/// L = [q1, q2], stored as one block per d with weights indexed b - 1
/// (zero where gcd(b, d) > 1).
struct FourierWeightTable {
  std::uint64_t level = 1;
  std::vector<kernels::FourierBlock> blocks;   // ascending d
  Rational w1_exact;                           // w_1(1), exact

  std::complex<double> weight(std::uint64_t d, std::uint64_t b) const;
};

FourierWeightTable fourier_weights(const SquareSieveSystem& sys, std::uint64_t cap = kFourierLevelCap,
                                   std::uint64_t memory_budget = std::uint64_t{1} << 30);

/// beta_z(n) from the expansion for n in [n_begin, n_begin + count).
std::vector<std::complex<double>> fourier_beta(const FourierWeightTable& table, std::uint64_t n_begin,
                                               std::size_t count, bool parallel = true);

}  // namespace dsieve::square_sieve

#pragma once

#include <cstdint>
#include <vector>

#include "dsieve/arith.hpp"

namespace dsieve::prime_sieve {

// Above this level the exact construction is refused; use the float path.
inline constexpr std::uint64_t kExactLevelLimit = 10'000;

/// Selberg Lambda^2 weights for the primes with the small primes below z0
/// removed from the sieving range.
///
///   G(z; z0)   = sum_{q <= z, (q, P(z0)) = 1} mu^2(q) / phi(q)
///   G_d(z)     = sum_{m <= z/d, (m, d P(z0)) = 1} mu^2(m) / phi(m)
///   lambda_d   = mu(d) (d / phi(d)) G_d(z) / G(z; z0)
///
/// supported on squarefree d <= z coprime to P(z0).
struct PrimeSieveSystem {
  double z = 1.0;
  std::uint64_t z0 = 2;
  std::uint64_t level = 1;              // floor(z)
  std::vector<std::uint64_t> support;   // ascending
  std::vector<Rational> lambda;         // aligned with support
  Rational G;

  // 0 off the support.
  Rational lambda_at(std::uint64_t d) const;
};

/// Double-precision counterpart for levels beyond the exact path.
struct PrimeSieveShadow {
  double z = 1.0;
  std::uint64_t z0 = 2;
  std::vector<std::uint64_t> support;
  std::vector<double> lambda;
  double G = 1.0;
};

Rational g_prime(double z, std::uint64_t z0, const arith::FactorTable& table);

PrimeSieveSystem build_prime_sieve(double z, std::uint64_t z0, const arith::FactorTable& table);
PrimeSieveShadow build_prime_sieve_float(double z, std::uint64_t z0, const arith::FactorTable& table);

/// (sum_{d | n} lambda_d)^2, n >= 1.
Rational beta_prime(std::uint64_t n, const PrimeSieveSystem& sys);
double beta_prime(std::uint64_t n, const PrimeSieveShadow& sys);

/// sum_{d1, d2} lambda_{d1} lambda_{d2} / [d1, d2].
Rational diagonal_form(const PrimeSieveSystem& sys);

}  // namespace dsieve::prime_sieve

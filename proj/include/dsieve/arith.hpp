#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace dsieve {

using Rational = mpq_class;
using Integer = mpz_class;

static_assert(sizeof(unsigned long) == sizeof(std::uint64_t), "LP64 platform expected");

inline Integer to_integer(std::uint64_t n) { return Integer(static_cast<unsigned long>(n)); }
inline Rational to_rational(std::uint64_t num, std::uint64_t den = 1) {
  Rational r(to_integer(num), to_integer(den));
  r.canonicalize();
  return r;
}

namespace arith {

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;
};

struct FactorTableOptions {
  // Above this limit construction switches to the segmented sieve.
  std::uint64_t segmented_threshold = 100'000'000;
  std::size_t segment_size = std::size_t{1} << 20;
  // Resident-table budget in bytes; construction refuses tables larger
  // than this. One entry costs sizeof(std::uint32_t), well under the
  // 8 bytes/entry ceiling.
  std::uint64_t memory_budget = std::uint64_t{4} << 30;
};

/// Smallest-prime-factor table on [0, limit].
///
/// spf(p) == p exactly for primes, spf(n) | n for n >= 2. Entries 0 and 1
/// are stored as 0. Immutable after construction; concurrent reads are safe.
class FactorTable {
 public:
  static FactorTable build(std::uint64_t limit, const FactorTableOptions& options = {});

  std::uint64_t limit() const noexcept { return limit_; }
  bool segmented() const noexcept { return segmented_; }

  std::uint32_t spf(std::uint64_t n) const;
  bool is_prime(std::uint64_t n) const;
  std::vector<PrimePower> factorize(std::uint64_t n) const;
  // Distinct prime factors, ascending.
  std::vector<std::uint64_t> prime_factors(std::uint64_t n) const;
  // All divisors of n that are squarefree, ascending.
  std::vector<std::uint64_t> squarefree_divisors(std::uint64_t n) const;
  std::vector<std::uint64_t> primes_up_to(std::uint64_t bound) const;

  std::size_t prime_count() const;

 private:
  FactorTable(std::uint64_t limit, std::vector<std::uint32_t> spf, bool segmented)
      : limit_(limit), spf_(std::move(spf)), segmented_(segmented) {}

  void require(std::uint64_t n) const;

  std::uint64_t limit_;
  std::vector<std::uint32_t> spf_;
  bool segmented_;
};

enum class MultFn { mobius, euler_phi, omega, squarefree, h, one_star_h };

MultFn parse_mult_fn(std::string_view name);

int mobius(std::uint64_t n, const FactorTable& table);
std::uint64_t euler_phi(std::uint64_t n, const FactorTable& table);
int omega(std::uint64_t n, const FactorTable& table);
bool is_squarefree(std::uint64_t n, const FactorTable& table);
bool is_odd_squarefree(std::uint64_t n, const FactorTable& table);

/// The squares-sieve density function: multiplicative, supported on
/// squarefree n, h(2) = 0 and h(p) = (p-1)/(p+1) for odd primes p.
Rational h(std::uint64_t n, const FactorTable& table);

/// (1*h)(n) = sum_{d | n} h(d). Equals n/|K_n| for odd squarefree n.
Rational one_star_h(std::uint64_t n, const FactorTable& table);

/// Exact value of fn at n; throws RangeError when n > table.limit().
Rational mult_eval(MultFn fn, std::uint64_t n, const FactorTable& table);

/// Product of all primes strictly below z0 (1 for z0 <= 2).
Integer primorial(std::uint64_t z0);

/// Odd squarefree integers in [1, bound], ascending.
std::vector<std::uint64_t> odd_squarefree_up_to(std::uint64_t bound, const FactorTable& table);

/// A sorted duplicate-free subset of Z/qZ.
struct ResidueSet {
  std::uint64_t modulus = 1;
  std::vector<std::uint64_t> members;

  std::size_t size() const noexcept { return members.size(); }
  bool contains(std::uint64_t r) const;
};

/// K_q = { k^2 mod q : 0 <= k < q }.
ResidueSet squares_mod(std::uint64_t q);

/// Omega_q: residues that are non-squares modulo every prime p | q
/// (q squarefree), glued by CRT. Omega_1 = Z/1Z.
ResidueSet avoided_mod(std::uint64_t q, const FactorTable& table);

/// n mod p is a square for every prime p | q (q squarefree): n in K_q.
bool in_squares_mod(std::uint64_t n, std::uint64_t q, const FactorTable& table);

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);

}  // namespace arith
}  // namespace dsieve

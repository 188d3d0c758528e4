#include "dsieve/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dsieve/errors.hpp"
#include "dsieve/kernels.hpp"

namespace dsieve::arith {

FactorTable FactorTable::build(std::uint64_t limit, const FactorTableOptions& options) {
  if (limit < 2) {
    throw ArgumentError("factor table limit must be >= 2, got " + std::to_string(limit));
  }
  if (limit >= (std::uint64_t{1} << 32)) {
    throw ResourceError("factor table limit " + std::to_string(limit) +
                        " exceeds 32-bit entry range");
  }
  const std::uint64_t bytes = (limit + 1) * sizeof(std::uint32_t);
  if (bytes > options.memory_budget) {
    throw ResourceError("factor table for limit " + std::to_string(limit) + " needs " +
                        std::to_string(bytes) + " bytes, budget is " +
                        std::to_string(options.memory_budget));
  }
  if (options.segment_size == 0) {
    throw ArgumentError("segment size must be positive");
  }

  if (limit > options.segmented_threshold) {
    return FactorTable(limit, kernels::omp::spf_segmented(limit, options.segment_size), true);
  }
  return FactorTable(limit, kernels::serial::spf_linear(limit), false);
}

void FactorTable::require(std::uint64_t n) const {
  if (n > limit_) {
    throw RangeError("n = " + std::to_string(n) + " exceeds factor table limit " +
                     std::to_string(limit_));
  }
}

std::uint32_t FactorTable::spf(std::uint64_t n) const {
  require(n);
  return spf_[n];
}

bool FactorTable::is_prime(std::uint64_t n) const {
  require(n);
  return n >= 2 && spf_[n] == n;
}

std::vector<PrimePower> FactorTable::factorize(std::uint64_t n) const {
  require(n);
  std::vector<PrimePower> out;
  while (n > 1) {
    const std::uint64_t p = spf_[n];
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  return out;
}

std::vector<std::uint64_t> FactorTable::prime_factors(std::uint64_t n) const {
  std::vector<std::uint64_t> out;
  for (const auto& pp : factorize(n)) out.push_back(pp.prime);
  return out;
}

std::vector<std::uint64_t> FactorTable::squarefree_divisors(std::uint64_t n) const {
  std::vector<std::uint64_t> divs{1};
  for (std::uint64_t p : prime_factors(n)) {
    const std::size_t k = divs.size();
    for (std::size_t i = 0; i < k; ++i) divs.push_back(divs[i] * p);
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

std::vector<std::uint64_t> FactorTable::primes_up_to(std::uint64_t bound) const {
  bound = std::min(bound, limit_);
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 2; n <= bound; ++n) {
    if (spf_[n] == n) out.push_back(n);
  }
  return out;
}

std::size_t FactorTable::prime_count() const {
  std::size_t count = 0;
  for (std::uint64_t n = 2; n <= limit_; ++n) count += (spf_[n] == n);
  return count;
}

MultFn parse_mult_fn(std::string_view name) {
  if (name == "mu" || name == "mobius") return MultFn::mobius;
  if (name == "phi" || name == "euler_phi") return MultFn::euler_phi;
  if (name == "omega") return MultFn::omega;
  if (name == "squarefree") return MultFn::squarefree;
  if (name == "h") return MultFn::h;
  if (name == "one_star_h" || name == "1*h") return MultFn::one_star_h;
  throw ArgumentError("unknown multiplicative function '" + std::string(name) + "'");
}

int mobius(std::uint64_t n, const FactorTable& table) {
  int sign = 1;
  for (const auto& pp : table.factorize(n)) {
    if (pp.exponent > 1) return 0;
    sign = -sign;
  }
  return sign;
}

std::uint64_t euler_phi(std::uint64_t n, const FactorTable& table) {
  std::uint64_t phi = n;
  for (const auto& pp : table.factorize(n)) phi = phi / pp.prime * (pp.prime - 1);
  return phi;
}

int omega(std::uint64_t n, const FactorTable& table) {
  return static_cast<int>(table.factorize(n).size());
}

bool is_squarefree(std::uint64_t n, const FactorTable& table) {
  for (const auto& pp : table.factorize(n)) {
    if (pp.exponent > 1) return false;
  }
  return true;
}

bool is_odd_squarefree(std::uint64_t n, const FactorTable& table) {
  return n % 2 == 1 && is_squarefree(n, table);
}

Rational h(std::uint64_t n, const FactorTable& table) {
  Integer num = 1;
  Integer den = 1;
  for (const auto& pp : table.factorize(n)) {
    if (pp.exponent > 1 || pp.prime == 2) return Rational(0);
    num *= pp.prime - 1;
    den *= pp.prime + 1;
  }
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational one_star_h(std::uint64_t n, const FactorTable& table) {
  // h vanishes off squarefree n, so each prime power contributes 1 + h(p).
  Integer num = 1;
  Integer den = 1;
  for (const auto& pp : table.factorize(n)) {
    if (pp.prime == 2) continue;
    num *= 2 * pp.prime;
    den *= pp.prime + 1;
  }
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational mult_eval(MultFn fn, std::uint64_t n, const FactorTable& table) {
  if (n == 0) throw ArgumentError("multiplicative functions are defined for n >= 1");
  switch (fn) {
    case MultFn::mobius:
      return Rational(mobius(n, table));
    case MultFn::euler_phi:
      return to_rational(euler_phi(n, table));
    case MultFn::omega:
      return Rational(omega(n, table));
    case MultFn::squarefree:
      return Rational(is_squarefree(n, table) ? 1 : 0);
    case MultFn::h:
      return h(n, table);
    case MultFn::one_star_h:
      return one_star_h(n, table);
  }
  throw ArgumentError("unhandled multiplicative function");
}

Integer primorial(std::uint64_t z0) {
  if (z0 < 2) throw ArgumentError("primorial needs z0 >= 2");
  Integer product = 1;
  std::vector<char> composite(z0, 0);
  for (std::uint64_t p = 2; p < z0; ++p) {
    if (composite[p]) continue;
    product *= static_cast<unsigned long>(p);
    for (std::uint64_t m = p * p; m < z0; m += p) composite[m] = 1;
  }
  return product;
}

std::vector<std::uint64_t> odd_squarefree_up_to(std::uint64_t bound, const FactorTable& table) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = 1; q <= bound; q += 2) {
    if (is_squarefree(q, table)) out.push_back(q);
  }
  return out;
}

bool ResidueSet::contains(std::uint64_t r) const {
  return std::binary_search(members.begin(), members.end(), r);
}

ResidueSet squares_mod(std::uint64_t q) {
  if (q == 0) throw ArgumentError("modulus must be positive");
  std::vector<char> seen(q, 0);
  for (std::uint64_t k = 0; k < q; ++k) {
    const auto sq = static_cast<std::uint64_t>((static_cast<unsigned __int128>(k) * k) % q);
    seen[sq] = 1;
  }
  ResidueSet out{q, {}};
  for (std::uint64_t r = 0; r < q; ++r) {
    if (seen[r]) out.members.push_back(r);
  }
  return out;
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  if (mod == 1) return 0;
  unsigned __int128 result = 1;
  unsigned __int128 b = base % mod;
  while (exp > 0) {
    if (exp & 1) result = result * b % mod;
    b = b * b % mod;
    exp >>= 1;
  }
  return static_cast<std::uint64_t>(result);
}

namespace {

bool is_square_mod_prime(std::uint64_t n, std::uint64_t p) {
  const std::uint64_t r = n % p;
  if (r == 0 || p == 2) return true;
  return powmod(r, (p - 1) / 2, p) == 1;
}

}  // namespace

bool in_squares_mod(std::uint64_t n, std::uint64_t q, const FactorTable& table) {
  for (const auto& pp : table.factorize(q)) {
    if (pp.exponent > 1) throw ArgumentError("in_squares_mod expects a squarefree modulus");
    if (!is_square_mod_prime(n, pp.prime)) return false;
  }
  return true;
}

ResidueSet avoided_mod(std::uint64_t q, const FactorTable& table) {
  if (!is_squarefree(q, table)) throw ArgumentError("avoided_mod expects a squarefree modulus");
  const auto primes = table.prime_factors(q);
  ResidueSet out{q, {}};
  for (std::uint64_t r = 0; r < q; ++r) {
    bool avoided = true;
    for (std::uint64_t p : primes) {
      if (is_square_mod_prime(r, p)) {
        avoided = false;
        break;
      }
    }
    if (avoided) out.members.push_back(r);
  }
  return out;
}

}  // namespace dsieve::arith

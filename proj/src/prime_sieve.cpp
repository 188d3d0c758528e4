#include "dsieve/prime_sieve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dsieve/errors.hpp"

namespace dsieve::prime_sieve {

namespace {

std::uint64_t level_of(double z, std::uint64_t z0, const arith::FactorTable& table) {
  if (!(z >= 1.0) || !std::isfinite(z)) throw ArgumentError("sieve level z must be >= 1");
  if (z0 < 2) throw ArgumentError("exclusion parameter z0 must be >= 2");
  const auto level = static_cast<std::uint64_t>(std::floor(z));
  if (level > table.limit()) {
    throw RangeError("sieve level " + std::to_string(level) + " exceeds factor table limit " +
                     std::to_string(table.limit()));
  }
  return level;
}

// Squarefree m <= level without prime factors below z0, with phi(m).
struct Admissible {
  std::vector<char> ok;              // indexed by m
  std::vector<std::uint64_t> phi;    // indexed by m, valid where ok
  std::vector<std::uint64_t> list;   // ascending
};

Admissible admissible(std::uint64_t level, std::uint64_t z0, const arith::FactorTable& table) {
  Admissible a;
  a.ok.assign(level + 1, 0);
  a.phi.assign(level + 1, 0);
  for (std::uint64_t m = 1; m <= level; ++m) {
    bool good = true;
    std::uint64_t phi = 1;
    for (const auto& pp : table.factorize(m)) {
      if (pp.exponent > 1 || pp.prime < z0) {
        good = false;
        break;
      }
      phi *= pp.prime - 1;
    }
    if (good) {
      a.ok[m] = 1;
      a.phi[m] = phi;
      a.list.push_back(m);
    }
  }
  return a;
}

Rational inv(std::uint64_t n) {
  return to_rational(1, n);
}

}  // namespace

Rational PrimeSieveSystem::lambda_at(std::uint64_t d) const {
  const auto it = std::lower_bound(support.begin(), support.end(), d);
  if (it == support.end() || *it != d) return Rational(0);
  return lambda[static_cast<std::size_t>(it - support.begin())];
}

Rational g_prime(double z, std::uint64_t z0, const arith::FactorTable& table) {
  const std::uint64_t level = level_of(z, z0, table);
  const Admissible a = admissible(level, z0, table);
  Rational g = 0;
  for (std::uint64_t m : a.list) g += inv(a.phi[m]);
  return g;
}

PrimeSieveSystem build_prime_sieve(double z, std::uint64_t z0, const arith::FactorTable& table) {
  const std::uint64_t level = level_of(z, z0, table);
  if (level > kExactLevelLimit) {
    throw ResourceError("exact prime sieve limited to z <= " + std::to_string(kExactLevelLimit) +
                        "; use the float path");
  }
  const Admissible a = admissible(level, z0, table);

  PrimeSieveSystem sys;
  sys.z = z;
  sys.z0 = z0;
  sys.level = level;
  sys.support = a.list;
  for (std::uint64_t m : a.list) sys.G += inv(a.phi[m]);

  sys.lambda.reserve(a.list.size());
  for (std::uint64_t d : a.list) {
    Rational gd = 0;
    for (std::uint64_t m : a.list) {
      if (m > level / d) break;
      if (std::gcd(m, d) == 1) gd += inv(a.phi[m]);
    }
    Rational lam = gd / sys.G;
    lam *= to_rational(d, a.phi[d]);
    if (table.factorize(d).size() % 2 == 1) lam = -lam;
    lam.canonicalize();
    sys.lambda.push_back(std::move(lam));
  }
  return sys;
}

PrimeSieveShadow build_prime_sieve_float(double z, std::uint64_t z0, const arith::FactorTable& table) {
  const std::uint64_t level = level_of(z, z0, table);
  const Admissible a = admissible(level, z0, table);

  PrimeSieveShadow sys;
  sys.z = z;
  sys.z0 = z0;
  sys.support = a.list;
  long double g = 0;
  for (std::uint64_t m : a.list) g += 1.0L / static_cast<long double>(a.phi[m]);
  sys.G = static_cast<double>(g);

  // G_d by a sum over m coprime to d; long double keeps the relative error
  // near 1e-15 for levels in the millions.
  sys.lambda.reserve(a.list.size());
  for (std::uint64_t d : a.list) {
    long double gd = 0;
    for (std::uint64_t m : a.list) {
      if (m > level / d) break;
      if (std::gcd(m, d) == 1) gd += 1.0L / static_cast<long double>(a.phi[m]);
    }
    long double lam = gd / g * static_cast<long double>(d) / static_cast<long double>(a.phi[d]);
    if (table.factorize(d).size() % 2 == 1) lam = -lam;
    sys.lambda.push_back(static_cast<double>(lam));
  }
  return sys;
}

Rational beta_prime(std::uint64_t n, const PrimeSieveSystem& sys) {
  if (n == 0) throw ArgumentError("beta_prime is defined for n >= 1");
  Rational s = 0;
  for (std::size_t i = 0; i < sys.support.size(); ++i) {
    if (n % sys.support[i] == 0) s += sys.lambda[i];
  }
  return s * s;
}

double beta_prime(std::uint64_t n, const PrimeSieveShadow& sys) {
  if (n == 0) throw ArgumentError("beta_prime is defined for n >= 1");
  long double s = 0;
  for (std::size_t i = 0; i < sys.support.size(); ++i) {
    if (n % sys.support[i] == 0) s += sys.lambda[i];
  }
  return static_cast<double>(s * s);
}

Rational diagonal_form(const PrimeSieveSystem& sys) {
  Rational total = 0;
  const std::size_t k = sys.support.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::uint64_t d1 = sys.support[i];
      const std::uint64_t d2 = sys.support[j];
      const std::uint64_t l = d1 / std::gcd(d1, d2) * d2;
      total += sys.lambda[i] * sys.lambda[j] / to_rational(l);
    }
  }
  return total;
}

}  // namespace dsieve::prime_sieve

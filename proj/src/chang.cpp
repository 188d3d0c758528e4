#include "dsieve/chang.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "dsieve/circle.hpp"
#include "dsieve/errors.hpp"
#include "dsieve/expsum.hpp"

namespace dsieve::chang {

namespace {

using u128 = unsigned __int128;

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// Inverse of a modulo m, gcd(a, m) = 1.
std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
  std::int64_t r0 = static_cast<std::int64_t>(m), r1 = static_cast<std::int64_t>(a % m);
  std::int64_t t0 = 0, t1 = 1;
  while (r1 != 0) {
    const std::int64_t q = r0 / r1;
    std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
    std::tie(t0, t1) = std::pair{t1, t0 - q * t1};
  }
  if (t0 < 0) t0 += static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(t0);
}

Component extract(const std::vector<std::uint64_t>& spectrum, std::uint64_t modulus) {
  Component c;
  c.modulus = modulus;
  for (auto u : spectrum) c.projection.push_back(u % modulus);
  std::sort(c.projection.begin(), c.projection.end());
  c.projection.erase(std::unique(c.projection.begin(), c.projection.end()), c.projection.end());

  const circle::FiniteGroup group({modulus});
  c.dissociate = group.greedy_dissociate(c.projection);
  c.is_dissociate = group.is_dissociate(c.dissociate);

  const auto span = group.span(c.dissociate);
  c.span_size = span.size();
  auto in_span = [&](std::uint64_t r) { return std::binary_search(span.begin(), span.end(), r); };

  c.is_maximal = true;
  for (auto r : c.projection) {
    if (std::binary_search(c.dissociate.begin(), c.dissociate.end(), r)) continue;
    auto extended = c.dissociate;
    extended.push_back(r);
    if (group.is_dissociate(extended)) c.is_maximal = false;
  }
  c.covers_projection = std::all_of(c.projection.begin(), c.projection.end(), in_span);
  c.log_bound = std::log(static_cast<double>(modulus)) / std::log(2.0);
  c.log_bound_holds = static_cast<double>(c.dissociate.size()) <= c.log_bound;
  return c;
}

}  // namespace

std::uint64_t crt_lift(std::uint64_t u1, std::uint64_t U1, std::uint64_t u2, std::uint64_t U2) {
  if (U1 == 0 || U2 == 0) throw ArgumentError("crt_lift needs positive moduli");
  if (std::gcd(U1, U2) != 1) {
    throw ArgumentError("crt_lift needs coprime moduli, got " + std::to_string(U1) + " and " + std::to_string(U2));
  }
  if (static_cast<u128>(U1) * U2 > (u128{1} << 63)) throw ArgumentError("crt_lift: U1 U2 exceeds 2^63");
  u1 %= U1;
  u2 %= U2;
  // u = u1 + U1 * t with t = (u2 - u1) / U1 mod U2.
  const std::uint64_t diff = (u2 + U2 - u1 % U2) % U2;
  const std::uint64_t t = static_cast<std::uint64_t>(static_cast<u128>(diff) * inverse_mod(U1 % U2, U2) % U2);
  return u1 + U1 * t;
}

ChangDecomposition chang_decompose(const std::vector<std::uint64_t>& S_in, double N, std::uint64_t U1,
                                   std::uint64_t U2, double A, const ChangOptions& options) {
  if (S_in.empty()) throw ArgumentError("S must be nonempty");
  if (!(N >= 2.0)) throw ArgumentError("N must be >= 2");
  if (!(A >= 1.0)) throw ArgumentError("A must be >= 1");
  if (U1 == U2) throw ArgumentError("U1 and U2 must be distinct");
  if (!is_prime(U1) || !is_prime(U2)) throw ArgumentError("U1 and U2 must be prime");

  std::vector<std::uint64_t> S = S_in;
  std::sort(S.begin(), S.end());
  if (std::adjacent_find(S.begin(), S.end()) != S.end()) throw ArgumentError("S has duplicate entries");

  ChangDecomposition out;
  out.N = N;
  out.U1 = U1;
  out.U2 = U2;
  out.U = U1 * U2;
  out.A = A;
  out.support_size = S.size();

  const double lo = std::pow(N, 0.25) - 1e-9, hi = std::pow(N, 0.75) + 1e-9;
  std::string violation;
  for (auto u : {U1, U2}) {
    if (static_cast<double>(u) < lo || static_cast<double>(u) > hi) {
      violation = "U_i = " + std::to_string(u) + " outside [N^(1/4), N^(3/4)]";
    }
  }
  if (static_cast<double>(out.U) < N) violation = "U = " + std::to_string(out.U) + " is below N";
  for (auto p : S) {
    if (!is_prime(p) || static_cast<double>(p) < lo || static_cast<double>(p) > N + 1e-9) {
      violation = "S contains " + std::to_string(p) + ", not a prime in [N^(1/4), N]";
      break;
    }
  }
  if (!violation.empty()) {
    if (!options.override_window) throw ArgumentError(violation + " (use the window override)");
    out.conforming = false;
  }

  std::vector<std::int64_t> support(S.begin(), S.end());
  const auto spec = expsum::spectrum(expsum::SupportedFunction::indicator(std::move(support)), out.U, A);
  out.threshold = spec.threshold;
  for (const auto& [u, mag] : spec.entries) out.spectrum.push_back(u);

  const std::uint64_t moduli[2] = {U1, U2};
#pragma omp parallel for schedule(static, 1)
  for (int i = 0; i < 2; ++i) out.components[i] = extract(out.spectrum, moduli[i]);

  const double s = static_cast<double>(S.size());
  out.K = N / (s * std::log(N));
  out.bound_value = 30.0 * A * A * std::log(8.0 * out.K) * std::exp(static_cast<double>(out.U) / N);
  out.contextual_bound = A * A * out.K * std::log(2.0 * A);
  for (auto& c : out.components) c.bound_holds = static_cast<double>(c.dissociate.size()) <= out.bound_value;
  out.bound_asserted = out.conforming && out.bound_value > 0.0;

  // Direct membership: u mod U_i must lie in span(D_i) for both i.
  const circle::FiniteGroup g1({U1}), g2({U2});
  const auto span1 = g1.span(out.components[0].dissociate);
  const auto span2 = g2.span(out.components[1].dissociate);
  out.containment_verified = std::all_of(out.spectrum.begin(), out.spectrum.end(), [&](std::uint64_t u) {
    return std::binary_search(span1.begin(), span1.end(), u % U1) &&
           std::binary_search(span2.begin(), span2.end(), u % U2);
  });
  return out;
}

}  // namespace dsieve::chang

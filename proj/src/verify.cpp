#include "dsieve/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "dsieve/arith.hpp"
#include "dsieve/errors.hpp"
#include "dsieve/rng.hpp"

namespace dsieve::verify {

namespace {

using Complex = std::complex<double>;
using circle::CirclePoint;
using circle::PointSet;

constexpr std::pair<Kind, std::string_view> kKindNames[] = {
    {Kind::hyp, "hyp"},
    {Kind::distrib, "distrib"},
    {Kind::rudin_moment, "rudin_moment"},
    {Kind::ra, "ra"},
    {Kind::interval, "interval"},
    {Kind::interval_moment, "interval_moment"},
    {Kind::lsi_baseline, "lsi_baseline"},
    {Kind::primes, "primes"},
    {Kind::squares, "squares"},
    {Kind::corollary, "corollary"},
};

constexpr std::pair<Setting, std::string_view> kSettingNames[] = {
    {Setting::interval, "interval"}, {Setting::primes, "primes"}, {Setting::squares, "squares"}};

constexpr std::pair<ConstantCheck, std::string_view> kConstantNames[] = {
    {ConstantCheck::stirling, "stirling"},
    {ConstantCheck::gamma_chain, "gamma_chain"},
    {ConstantCheck::cosh_bounds, "cosh_bounds"},
    {ConstantCheck::corollary_c, "corollary_c"},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string buf(trim(text));
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw ArgumentError("field '" + std::string(key) + "': cannot parse number '" + buf + "'");
  }
  return v;
}

std::int64_t parse_i64(std::string_view key, std::string_view text) {
  const std::string buf(trim(text));
  char* end = nullptr;
  const long long v = std::strtoll(buf.c_str(), &end, 10);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw ArgumentError("field '" + std::string(key) + "': cannot parse integer '" + buf + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  const std::string buf(trim(text));
  char* end = nullptr;
  if (!buf.empty() && buf.front() == '-') {
    throw ArgumentError("field '" + std::string(key) + "' must be nonnegative");
  }
  const unsigned long long v = std::strtoull(buf.c_str(), &end, 10);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw ArgumentError("field '" + std::string(key) + "': cannot parse integer '" + buf + "'");
  }
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// "re:im" or "re".
Complex parse_complex(std::string_view key, std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) return {parse_double(key, parts[0]), 0.0};
  if (parts.size() == 2) return {parse_double(key, parts[0]), parse_double(key, parts[1])};
  throw ArgumentError("field '" + std::string(key) + "': cannot parse complex '" + std::string(text) + "'");
}

[[noreturn]] void missing(Kind kind, std::string_view field) {
  throw ArgumentError("instance of kind '" + std::string(kind_name(kind)) + "' is missing field '" +
                      std::string(field) + "'");
}

template <class T>
const T& need(const std::optional<T>& v, Kind kind, std::string_view field) {
  if (!v) missing(kind, field);
  return *v;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Smallest integer >= N^e, robust to rounding when N^e is an integer.
std::int64_t ceil_power(double n, double e) {
  const double v = std::pow(n, e);
  auto c = static_cast<std::int64_t>(std::ceil(v - 1e-9 * std::max(1.0, v)));
  return std::max<std::int64_t>(c, 1);
}

std::int64_t floor_n(double n) { return static_cast<std::int64_t>(std::floor(n + 1e-9)); }

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d : {2u, 3u, 5u, 7u}) {
    if (n % d == 0) return n == d;
  }
  for (std::uint64_t d = 11; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<std::int64_t> primes_in(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> out;
  if (hi < 2) return out;
  const auto table = arith::FactorTable::build(static_cast<std::uint64_t>(std::max<std::int64_t>(hi, 2)));
  for (auto p : table.primes_up_to(static_cast<std::uint64_t>(hi))) {
    if (static_cast<std::int64_t>(p) >= lo) out.push_back(static_cast<std::int64_t>(p));
  }
  return out;
}

struct Domain {
  std::vector<std::int64_t> members;   // ascending
  std::string description;

  bool contains(std::int64_t n) const { return std::binary_search(members.begin(), members.end(), n); }
};

double need_N(const Instance& in) {
  const double n = need(in.N, in.kind, "N");
  if (!(n >= 1.0) || !std::isfinite(n)) throw ArgumentError("N must be >= 1");
  return n;
}

double need_kappa(const Instance& in) {
  const double k = need(in.kappa, in.kind, "kappa");
  if (!(k > 0.0 && k <= 0.5)) throw ArgumentError("kappa must lie in (0, 1/2]");
  return k;
}

std::uint64_t need_z0(const Instance& in) {
  const std::uint64_t z0 = need(in.z0, in.kind, "z0");
  if (z0 < 2) throw ArgumentError("z0 must be >= 2");
  return z0;
}

Domain domain_of(const Instance& in, Setting setting) {
  const double N = need_N(in);
  Domain d;
  switch (setting) {
    case Setting::interval: {
      const std::int64_t n = floor_n(N);
      d.members.resize(static_cast<std::size_t>(n));
      std::iota(d.members.begin(), d.members.end(), std::int64_t{1});
      d.description = "[1, " + std::to_string(n) + "]";
      break;
    }
    case Setting::primes: {
      const double kappa = need_kappa(in);
      const std::int64_t lo = ceil_power(N, kappa);
      d.members = primes_in(lo, floor_n(N));
      d.description = "primes in [" + std::to_string(lo) + ", " + std::to_string(floor_n(N)) + "]";
      break;
    }
    case Setting::squares: {
      const std::uint64_t r = isqrt(static_cast<std::uint64_t>(floor_n(N)));
      for (std::uint64_t n = 1; n <= r; ++n) d.members.push_back(static_cast<std::int64_t>(n * n));
      d.description = "squares in [1, " + std::to_string(floor_n(N)) + "]";
      break;
    }
  }
  return d;
}

const PointSet& need_X(const Instance& in) {
  if (in.X.empty()) missing(in.kind, "X");
  return in.X;
}

double inverse_delta_star(const PointSet& X) {
  const auto d = circle::delta_star(X);
  if (d.is_zero(X.tolerance())) throw DomainError("X is not dissociate: delta_star = 0");
  return 1.0 / d.value();
}

double inverse_delta_arith(const PointSet& X, double z, std::uint64_t z0) {
  const auto d = circle::delta_star_arith(X, std::max(z, 1.0), z0);
  if (d.is_zero(X.tolerance())) {
    throw DomainError("delta_*(" + fmt(z) + ", " + std::to_string(z0) + ") = 0 for X");
  }
  return 1.0 / d.value();
}

// Default hypothesis constant H for the abstract kinds.
double default_H(const Instance& in, Setting setting, InequalityReport& rep) {
  const PointSet& X = need_X(in);
  const double N = need_N(in);
  switch (setting) {
    case Setting::interval: {
      const double inv = inverse_delta_star(X);
      rep.constants.emplace_back("inv_delta_star", inv);
      return N + inv;
    }
    case Setting::primes: {
      const double kappa = need_kappa(in);
      const std::uint64_t z0 = need_z0(in);
      const double inv = inverse_delta_arith(X, std::sqrt(N), z0);
      rep.constants.emplace_back("inv_delta_star_arith", inv);
      rep.constants.emplace_back("sieve_density", kSieveDensity);
      return kSieveDensity * (N + inv) * std::log(static_cast<double>(z0)) / (kappa * std::log(N));
    }
    case Setting::squares: {
      const double inv = inverse_delta_arith(X, std::sqrt(N), 2);
      rep.constants.emplace_back("inv_delta_star_arith", inv);
      rep.constants.emplace_back("sieve_density", kSieveDensity);
      return kSieveDensity * (N + inv) / std::sqrt(N);
    }
  }
  return 0.0;
}

double hypothesis_H(const Instance& in, const Domain& dom, InequalityReport& rep) {
  double H;
  if (in.H) {
    H = *in.H;
    if (!(H > 0.0)) throw ArgumentError("H must be positive");
  } else {
    H = default_H(in, in.setting, rep);
  }
  rep.constants.emplace_back("H", H);
  if (H < static_cast<double>(dom.members.size())) {
    rep.notes.push_back("H = " + fmt(H) + " is below |N| = " + std::to_string(dom.members.size()) +
                        "; the hypothesis cannot hold");
  }
  return H;
}

const std::vector<Complex>& need_c(const Instance& in) {
  const auto& c = need(in.c, in.kind, "c");
  if (c.size() != need_X(in).size()) {
    throw ArgumentError("c has " + std::to_string(c.size()) + " entries but X has " +
                        std::to_string(in.X.size()) + " points");
  }
  return c;
}

double l2_sq(const std::vector<Complex>& c) {
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return s;
}

// The declared S (defaults to the support of f), validated against the domain.
std::size_t support_size(const Instance& in, const Domain& dom) {
  const auto& f = need(in.f, in.kind, "f");
  if (f.empty()) throw ArgumentError("f has empty support");
  for (auto n : f.support()) {
    if (!dom.contains(n)) {
      throw DomainError("support of f contains " + std::to_string(n) + ", which is outside " + dom.description);
    }
  }
  if (!in.S) return f.size();
  std::vector<std::int64_t> s = *in.S;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw ArgumentError("S has duplicate entries");
  for (auto n : s) {
    if (!dom.contains(n)) throw DomainError("S contains " + std::to_string(n) + ", outside " + dom.description);
  }
  for (auto n : f.support()) {
    if (!std::binary_search(s.begin(), s.end(), n)) {
      throw DomainError("support of f is not inside S (missing " + std::to_string(n) + ")");
    }
  }
  return s.size();
}

double large_sieve_lhs(const Instance& in) {
  const auto values = expsum::trig_poly_many(*in.f, in.X.points(), false);
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s;
}

void finish(InequalityReport& rep) {
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? INFINITY : 0.0);
  rep.holds = rep.lhs <= rep.rhs * (1.0 + kRelativeSlack);
}

// --- per-kind checks --------------------------------------------------------

void check_hyp(const Instance& in, InequalityReport& rep) {
  const auto& c = need_c(in);
  const auto dom = domain_of(in, in.setting);
  const double H = hypothesis_H(in, dom, rep);
  const auto values = expsum::dual_poly(c, in.X, dom.members, false);
  double m = -INFINITY;
  for (const auto& v : values) m = std::max(m, v.real());
  double s = 0.0;
  for (const auto& v : values) s += std::exp(v.real() - m);
  rep.lhs = m + std::log(s);
  rep.rhs = 0.5 * l2_sq(c) + std::log(H);
}

void check_distrib(const Instance& in, InequalityReport& rep) {
  const auto& c = need_c(in);
  const double lambda = need(in.lambda, in.kind, "lambda");
  if (!(lambda >= 0.0)) throw ArgumentError("lambda must be >= 0");
  const auto dom = domain_of(in, in.setting);
  const double H = hypothesis_H(in, dom, rep);
  const double level = lambda * std::sqrt(l2_sq(c));
  const auto values = expsum::dual_poly(c, in.X, dom.members, false);
  std::uint64_t count = 0;
  for (const auto& v : values) count += std::abs(v) >= level;
  rep.lhs = static_cast<double>(count);
  rep.rhs = kTailLeading * H * std::exp(-lambda * lambda / 4.0);
  rep.constants.emplace_back("tail_leading", kTailLeading);
}

void check_rudin_moment(const Instance& in, InequalityReport& rep) {
  const auto& c = need_c(in);
  const double p = need(in.p, in.kind, "p");
  if (!(p > 0.0)) throw ArgumentError("p must be positive");
  const auto dom = domain_of(in, in.setting);
  const double H = hypothesis_H(in, dom, rep);
  rep.lhs = expsum::dual_moment(c, in.X, dom.members, p);
  rep.rhs = kTailLeading * std::pow(kMomentBase * std::sqrt(p), p) * H * std::pow(l2_sq(c), p / 2.0);
  rep.constants.emplace_back("tail_leading", kTailLeading);
  rep.constants.emplace_back("moment_base", kMomentBase);
}

void check_ra(const Instance& in, InequalityReport& rep) {
  need_X(in);
  const auto dom = domain_of(in, in.setting);
  const double S = static_cast<double>(support_size(in, dom));
  const double H = hypothesis_H(in, dom, rep);
  rep.lhs = large_sieve_lhs(in);
  rep.rhs = kSupportFactor * S * in.f->norm2_sq() * std::log(kLogScale * H / S);
  rep.constants.emplace_back("support_factor", kSupportFactor);
  rep.constants.emplace_back("log_scale", kLogScale);
}

void check_interval(const Instance& in, InequalityReport& rep) {
  const PointSet& X = need_X(in);
  const double N = need_N(in);
  const auto dom = domain_of(in, Setting::interval);
  const double S = static_cast<double>(support_size(in, dom));
  const double inv = inverse_delta_star(X);
  rep.constants.emplace_back("inv_delta_star", inv);
  rep.constants.emplace_back("support_factor", kSupportFactor);
  rep.constants.emplace_back("log_scale", kLogScale);
  const double log_term = std::log(kLogScale * (N + inv) / S);
  const double f2 = in.f->norm2_sq();
  if (in.kind == Kind::interval) {
    rep.lhs = large_sieve_lhs(in);
    rep.rhs = kSupportFactor * S * f2 * log_term;
    return;
  }
  const double ell = need(in.ell, in.kind, "ell");
  if (!(ell >= 0.0)) throw ArgumentError("ell must be >= 0");
  const auto values = expsum::trig_poly_many(*in.f, X.points(), false);
  double a = 0.0, b = 0.0;
  for (const auto& v : values) {
    const double t = std::abs(v);
    a += std::pow(t, ell + 1.0);
    b += std::pow(t, 2.0 * ell);
  }
  rep.lhs = a * a;
  rep.rhs = kSupportFactor * S * f2 * b * log_term;
  rep.constants.emplace_back("ell", ell);
}

void check_lsi(const Instance& in, InequalityReport& rep) {
  const PointSet& X = need_X(in);
  const double N = need_N(in);
  const auto& f = need(in.f, in.kind, "f");
  if (f.empty()) throw ArgumentError("f has empty support");
  const auto span = f.support().back() - f.support().front() + 1;
  if (static_cast<double>(span) > N + 1e-9) {
    throw DomainError("support of f spans " + std::to_string(span) + " consecutive integers, more than N");
  }
  const double inv = X.size() >= 2 ? 1.0 / circle::min_gap(X).value() : 0.0;
  rep.constants.emplace_back("inv_delta", inv);
  rep.lhs = large_sieve_lhs(in);
  rep.rhs = (N + inv) * f.norm2_sq();
}

void check_primes(const Instance& in, InequalityReport& rep) {
  const PointSet& X = need_X(in);
  const double N = need_N(in);
  const double kappa = need_kappa(in);
  const std::uint64_t z0 = need_z0(in);
  if (N < static_cast<double>(z0)) throw ArgumentError("primes kind needs N >= z0");
  const auto dom = domain_of(in, Setting::primes);
  const double S = static_cast<double>(support_size(in, dom));
  const double f2 = in.f->norm2_sq();
  const double logN = std::log(N);
  const double log_k = std::log(kLogScale * N / (S * logN));
  auto rhs_at = [&](double z) {
    const double inv = inverse_delta_arith(X, z, z0);
    const double top = std::log(kSieveLogScale * (N + inv) / (kappa * S * logN) * std::log(static_cast<double>(z0)));
    return std::pair{inv, kSupportFactor * S * f2 * top};
  };
  const auto [inv_sqrt, rhs_sqrt] = rhs_at(std::sqrt(N));
  const auto [inv_kappa, rhs_kappa] = rhs_at(std::pow(N, kappa));
  const auto [inv_half, rhs_half] = rhs_at(std::pow(N, kappa / 2.0));
  rep.lhs = large_sieve_lhs(in);
  rep.rhs = rhs_sqrt;
  rep.constants.emplace_back("c_kappa", rhs_sqrt / (S * f2 * log_k));
  rep.constants.emplace_back("inv_delta_star_sqrt_n", inv_sqrt);
  rep.constants.emplace_back("inv_delta_star_n_kappa", inv_kappa);
  rep.constants.emplace_back("inv_delta_star_n_half_kappa", inv_half);
  rep.constants.emplace_back("rhs_n_kappa", rhs_kappa);
  rep.constants.emplace_back("rhs_n_half_kappa", rhs_half);
  if (in.z) {
    const auto [inv_z, rhs_z] = rhs_at(*in.z);
    rep.constants.emplace_back("inv_delta_star_z", inv_z);
    rep.constants.emplace_back("rhs_z", rhs_z);
  }
  rep.constants.emplace_back("support_factor", kSupportFactor);
  rep.constants.emplace_back("sieve_log_scale", kSieveLogScale);
  if (rep.lhs > rhs_half * (1.0 + kRelativeSlack)) {
    rep.notes.push_back("lhs exceeds the bound with delta_* taken at N^(kappa/2)");
  }
}

void check_squares(const Instance& in, InequalityReport& rep) {
  const PointSet& X = need_X(in);
  const double N = need_N(in);
  const auto dom = domain_of(in, Setting::squares);
  const double S = static_cast<double>(support_size(in, dom));
  const double f2 = in.f->norm2_sq();
  const double rootN = std::sqrt(N);
  const double inv = inverse_delta_arith(X, rootN, 2);
  const double top = std::log(kSieveLogScale * (N + inv) / (S * rootN));
  rep.lhs = large_sieve_lhs(in);
  rep.rhs = kSupportFactor * S * f2 * top;
  rep.constants.emplace_back("c", kSupportFactor * top / std::log(kLogScale * rootN / S));
  rep.constants.emplace_back("inv_delta_star_sqrt_n", inv);
  rep.constants.emplace_back("support_factor", kSupportFactor);
  rep.constants.emplace_back("sieve_log_scale", kSieveLogScale);
}

void check_corollary(const Instance& in, InequalityReport& rep) {
  const PointSet& X = need_X(in);
  const double N = need_N(in);
  if (N < 2.0) throw ArgumentError("corollary needs N >= 2");
  const std::uint64_t U = need(in.U, in.kind, "U");
  const std::uint64_t U1 = need(in.U1, in.kind, "U1");
  if (static_cast<double>(U) < N) throw DomainError("corollary needs U >= N");
  if (U1 == 0 || U % U1 != 0 || !is_prime_u64(U1)) throw DomainError("U1 must be a prime divisor of U");
  if (static_cast<double>(U1) < std::pow(N, 0.25) - 1e-9 || static_cast<double>(U1) > std::pow(N, 0.75) + 1e-9) {
    throw DomainError("U1 = " + std::to_string(U1) + " lies outside [N^(1/4), N^(3/4)]");
  }
  if (!X.exact()) throw DomainError("corollary needs rational points u/U");
  std::vector<std::uint64_t> mod_u1;
  for (const auto& pt : X.points()) {
    const auto& fr = pt.fraction();
    if (U % static_cast<std::uint64_t>(fr.den) != 0) {
      throw DomainError("point " + pt.to_string() + " is not of the form u/U");
    }
    const auto u = static_cast<std::uint64_t>(fr.num) * (U / static_cast<std::uint64_t>(fr.den));
    mod_u1.push_back(u % U1);
  }
  if (!circle::FiniteGroup({U1}).is_dissociate(mod_u1)) {
    throw DomainError("X modulo U1 is not dissociate (subset sums collide)");
  }
  Instance as_primes = in;
  as_primes.kappa = 0.25;
  const auto dom = domain_of(as_primes, Setting::primes);
  const double S = static_cast<double>(support_size(in, dom));
  const double f2 = in.f->norm2_sq();
  const double logN = std::log(N);
  const double K = N / (S * logN);
  const double growth = std::exp(static_cast<double>(U) / N);
  rep.lhs = large_sieve_lhs(in);
  rep.rhs = kCorollaryFactor * S * f2 * growth * std::log(kLogScale * K);
  // The constant produced by the primes bound with kappa = 1/4, z0 = 2 on
  // this X. Only delta_*(N^(1/4), 2) is guaranteed positive here.
  const double inv = inverse_delta_arith(X, std::pow(N, 0.25), 2);
  const double c_derived = kSupportFactor *
                           std::log(kSieveLogScale * (N + inv) / (0.25 * S * logN) * std::log(2.0)) /
                           std::log(kLogScale * K);
  rep.constants.emplace_back("K", K);
  rep.constants.emplace_back("corollary_factor", kCorollaryFactor);
  rep.constants.emplace_back("c_bound", kCorollaryFactor * growth);
  rep.constants.emplace_back("c_derived", c_derived);
  rep.constants.emplace_back("inv_delta_star_n_quarter", inv);
  if (c_derived > kCorollaryFactor * growth) {
    rep.notes.push_back("c from the primes bound exceeds 30 e^(U/N) on this instance");
  }
}

}  // namespace

Kind parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw ArgumentError("unknown kind '" + std::string(name) + "'");
}

std::string_view kind_name(Kind kind) {
  for (const auto& [k, n] : kKindNames) {
    if (k == kind) return n;
  }
  return "?";
}

const std::vector<Kind>& all_kinds() {
  static const std::vector<Kind> kinds = [] {
    std::vector<Kind> v;
    for (const auto& [k, n] : kKindNames) v.push_back(k);
    return v;
  }();
  return kinds;
}

Setting parse_setting(std::string_view name) {
  for (const auto& [s, n] : kSettingNames) {
    if (n == name) return s;
  }
  throw ArgumentError("unknown setting '" + std::string(name) + "'");
}

std::string_view setting_name(Setting s) {
  for (const auto& [k, n] : kSettingNames) {
    if (k == s) return n;
  }
  return "?";
}

ConstantCheck parse_constant_check(std::string_view name) {
  for (const auto& [k, n] : kConstantNames) {
    if (n == name) return k;
  }
  throw ArgumentError("unknown constant check '" + std::string(name) + "'");
}

std::string_view constant_check_name(ConstantCheck which) {
  for (const auto& [k, n] : kConstantNames) {
    if (k == which) return n;
  }
  return "?";
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// --- Instance text form -----------------------------------------------------

std::string Instance::to_text() const {
  std::ostringstream os;
  os << "kind=" << kind_name(kind) << '\n';
  os << "setting=" << setting_name(setting) << '\n';
  if (!X.empty()) {
    std::string xs = X.to_string();
    os << "X=" << xs.substr(1, xs.size() - 2) << '\n';
  }
  if (f) {
    os << "f=";
    for (std::size_t i = 0; i < f->size(); ++i) {
      if (i) os << ',';
      const Complex w = f->weights()[i];
      os << f->support()[i] << ':' << fmt(w.real()) << ':' << fmt(w.imag());
    }
    os << '\n';
  }
  if (S) {
    os << "S=";
    for (std::size_t i = 0; i < S->size(); ++i) os << (i ? "," : "") << (*S)[i];
    os << '\n';
  }
  if (c) {
    os << "c=";
    for (std::size_t i = 0; i < c->size(); ++i) {
      os << (i ? "," : "") << fmt((*c)[i].real()) << ':' << fmt((*c)[i].imag());
    }
    os << '\n';
  }
  auto opt = [&](const char* key, const auto& v) {
    if (v) {
      if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, double>) {
        os << key << '=' << fmt(*v) << '\n';
      } else {
        os << key << '=' << *v << '\n';
      }
    }
  };
  opt("N", N);
  opt("z", z);
  opt("z0", z0);
  opt("kappa", kappa);
  opt("ell", ell);
  opt("lambda", lambda);
  opt("p", p);
  opt("H", H);
  opt("U", U);
  opt("U1", U1);
  os << "seed=" << seed << '\n';
  return os.str();
}

Instance Instance::parse(std::string_view text) {
  Instance in;
  bool have_kind = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ArgumentError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key == "kind") {
      in.kind = parse_kind(value);
      have_kind = true;
    } else if (key == "setting") {
      in.setting = parse_setting(value);
    } else if (key == "X") {
      in.X = PointSet::parse(value);
    } else if (key == "f") {
      std::vector<std::pair<std::int64_t, Complex>> pairs;
      for (auto item : split(value, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) {
          pairs.emplace_back(parse_i64(key, item), Complex(1.0, 0.0));
        } else {
          pairs.emplace_back(parse_i64(key, item.substr(0, colon)), parse_complex(key, item.substr(colon + 1)));
        }
      }
      in.f = expsum::SupportedFunction::from_pairs(std::move(pairs));
    } else if (key == "S") {
      std::vector<std::int64_t> s;
      for (auto item : split(value, ',')) s.push_back(parse_i64(key, item));
      in.S = std::move(s);
    } else if (key == "c") {
      std::vector<Complex> c;
      for (auto item : split(value, ',')) c.push_back(parse_complex(key, item));
      in.c = std::move(c);
    } else if (key == "N") {
      in.N = parse_double(key, value);
    } else if (key == "z") {
      in.z = parse_double(key, value);
    } else if (key == "z0") {
      in.z0 = parse_u64(key, value);
    } else if (key == "kappa") {
      in.kappa = parse_double(key, value);
    } else if (key == "ell") {
      in.ell = parse_double(key, value);
    } else if (key == "lambda") {
      in.lambda = parse_double(key, value);
    } else if (key == "p") {
      in.p = parse_double(key, value);
    } else if (key == "H") {
      in.H = parse_double(key, value);
    } else if (key == "U") {
      in.U = parse_u64(key, value);
    } else if (key == "U1") {
      in.U1 = parse_u64(key, value);
    } else if (key == "seed") {
      in.seed = parse_u64(key, value);
    } else {
      throw ArgumentError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_kind) throw ArgumentError("instance is missing field 'kind'");
  return in;
}

std::uint64_t Instance::digest() const { return fnv1a(to_text()); }

// --- check ------------------------------------------------------------------

InequalityReport check(const Instance& in) {
  InequalityReport rep;
  rep.kind = in.kind;
  rep.seed = in.seed;
  rep.instance_digest = in.digest();
  switch (in.kind) {
    case Kind::hyp:
      check_hyp(in, rep);
      break;
    case Kind::distrib:
      check_distrib(in, rep);
      break;
    case Kind::rudin_moment:
      check_rudin_moment(in, rep);
      break;
    case Kind::ra:
      check_ra(in, rep);
      break;
    case Kind::interval:
    case Kind::interval_moment:
      check_interval(in, rep);
      break;
    case Kind::lsi_baseline:
      check_lsi(in, rep);
      break;
    case Kind::primes:
      check_primes(in, rep);
      break;
    case Kind::squares:
      check_squares(in, rep);
      break;
    case Kind::corollary:
      check_corollary(in, rep);
      break;
  }
  finish(rep);
  return rep;
}

// --- generator --------------------------------------------------------------

namespace {

std::uint64_t random_prime(Xorshift64Star& rng, std::uint64_t lo, std::uint64_t hi) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const std::uint64_t n = lo + rng.below(hi - lo + 1);
    if (is_prime_u64(n)) return n;
  }
  throw ResourceError("no prime found in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

template <class T>
void partial_shuffle(std::vector<T>& v, std::size_t k, Xorshift64Star& rng) {
  for (std::size_t i = 0; i < k && i + 1 < v.size(); ++i) {
    std::swap(v[i], v[i + rng.below(v.size() - i)]);
  }
}

// k-point dissociate subset of Z/Q, Q prime, drawn from a greedy extraction.
std::vector<std::uint64_t> random_dissociate(Xorshift64Star& rng, std::uint64_t Q, std::size_t max_points) {
  std::vector<std::uint64_t> cand;
  for (std::size_t i = 0; i < 3 * max_points + 4; ++i) cand.push_back(1 + rng.below(Q - 1));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  auto d = circle::FiniteGroup({Q}).greedy_dissociate(cand);
  const std::size_t k = 1 + rng.below(std::min(max_points, d.size()));
  partial_shuffle(d, k, rng);
  d.resize(k);
  return d;
}

expsum::SupportedFunction random_function(Xorshift64Star& rng, std::vector<std::int64_t> domain) {
  if (domain.empty()) throw ArgumentError("generator: empty support domain");
  const std::size_t k = 1 + rng.below(domain.size());
  partial_shuffle(domain, k, rng);
  domain.resize(k);
  if (rng.below(4) == 0) return expsum::SupportedFunction::indicator(std::move(domain));
  std::vector<std::pair<std::int64_t, Complex>> pairs;
  for (auto n : domain) {
    const double r = 1.0 - rng.uniform();   // (0, 1]
    pairs.emplace_back(n, std::polar(r, 2.0 * M_PI * rng.uniform()));
  }
  return expsum::SupportedFunction::from_pairs(std::move(pairs));
}

}  // namespace

Instance generate(Kind kind, const GeneratorConfig& cfg, std::uint64_t seed, std::uint64_t trial) {
  if (!(cfg.N >= 4.0)) throw ArgumentError("generator needs N >= 4");
  if (cfg.max_points == 0) throw ArgumentError("generator needs max_points >= 1");
  auto rng = Xorshift64Star::stream(seed, trial);
  Instance in;
  in.kind = kind;
  in.seed = seed;
  in.N = cfg.N;
  const auto N = static_cast<std::uint64_t>(std::floor(cfg.N));

  if (kind == Kind::corollary) {
    const auto lo = static_cast<std::uint64_t>(std::ceil(std::pow(cfg.N, 0.25)));
    const auto hi = static_cast<std::uint64_t>(std::floor(std::pow(cfg.N, 0.75)));
    const std::uint64_t U1 = random_prime(rng, std::max<std::uint64_t>(lo, 2), std::max(hi, lo));
    const std::uint64_t m_min = (N + U1 - 1) / U1;
    const std::uint64_t m = m_min + rng.below(m_min + 1);
    const std::uint64_t U = U1 * m;
    const auto d = random_dissociate(rng, U1, cfg.max_points);
    std::vector<std::uint64_t> us;
    for (auto r : d) us.push_back(r + U1 * rng.below(m));
    in.U = U;
    in.U1 = U1;
    in.X = PointSet::from_residues(us, U);
    in.z0 = 2;
    in.kappa = 0.25;
    in.f = random_function(rng, domain_of(in, Setting::primes).members);
    in.kappa.reset();
    in.z0.reset();
    return in;
  }

  in.setting = kind == Kind::primes ? Setting::primes : kind == Kind::squares ? Setting::squares
               : (kind == Kind::interval || kind == Kind::interval_moment || kind == Kind::lsi_baseline)
                   ? Setting::interval
                   : cfg.setting;
  if (in.setting == Setting::primes) {
    in.kappa = cfg.kappa;
    in.z0 = cfg.z0;
  }
  const std::uint64_t Q = random_prime(rng, N, 4 * N);
  in.X = PointSet::from_residues(random_dissociate(rng, Q, cfg.max_points), Q);

  switch (kind) {
    case Kind::hyp:
    case Kind::distrib:
    case Kind::rudin_moment: {
      std::vector<Complex> c;
      for (std::size_t i = 0; i < in.X.size(); ++i) {
        c.push_back(std::polar(cfg.c_scale * rng.uniform(), 2.0 * M_PI * rng.uniform()));
      }
      in.c = std::move(c);
      if (kind == Kind::distrib) in.lambda = cfg.lambda_max * rng.uniform();
      if (kind == Kind::rudin_moment) in.p = 1.0 + (cfg.p_max - 1.0) * rng.uniform();
      break;
    }
    default:
      in.f = random_function(rng, domain_of(in, in.setting).members);
      if (kind == Kind::interval_moment) in.ell = cfg.ell_max * rng.uniform();
      break;
  }
  return in;
}

AggregateReport check_randomized(Kind kind, const GeneratorConfig& config, std::uint64_t trials,
                                 std::uint64_t seed) {
  if (trials == 0) throw ArgumentError("trials must be >= 1");
  std::vector<InequalityReport> reports(trials);
  std::vector<std::exception_ptr> errors(trials);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
    try {
      reports[t] = check(generate(kind, config, seed, static_cast<std::uint64_t>(t)));
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  AggregateReport agg;
  agg.kind = kind;
  agg.trials = trials;
  agg.seed = seed;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto& r = reports[t];
    if (!r.holds) {
      ++agg.failures;
      agg.failed.push_back(r);
    }
    if (t == 0 || r.ratio > agg.worst_ratio) {
      agg.worst_ratio = r.ratio;
      agg.worst_trial = t;
      agg.worst = r;
    }
  }
  return agg;
}

// --- constants --------------------------------------------------------------

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

Big big_pi() { return boost::math::constants::pi<Big>(); }

struct MarginTracker {
  double min_margin = INFINITY;
  double worst_at = 0.0;
  std::uint64_t points = 0;

  void add(double margin, double at) {
    ++points;
    if (margin < min_margin) {
      min_margin = margin;
      worst_at = at;
    }
  }
};

ConstantReport stirling_report() {
  ConstantReport rep;
  MarginTracker m;
  double max_theta = 0.0, min_theta = 1.0;
  constexpr int kPoints = 10000;
  const double lo = std::log(0.1), hi = std::log(1e4);
  for (int i = 0; i < kPoints; ++i) {
    const double x = std::exp(lo + (hi - lo) * i / (kPoints - 1));
    const double th = stirling_theta(x);
    min_theta = std::min(min_theta, th);
    max_theta = std::max(max_theta, th);
    m.add(std::min(th, 1.0 - th), x);
  }
  rep.points = m.points;
  rep.min_margin = m.min_margin;
  rep.worst_at = m.worst_at;
  rep.max_residual = max_theta;
  rep.holds = m.min_margin > 0.0;
  rep.details = {{"min_theta", min_theta}, {"max_theta", max_theta}, {"x_min", 0.1}, {"x_max", 1e4}};
  return rep;
}

// Logs of the four quantities in the moment-constant chain.
std::array<Big, 4> gamma_chain_logs(const Big& p) {
  using boost::multiprecision::log;
  const Big two(2), half = p / 2;
  const Big tail = -half + 1 / (6 * p);
  const Big l0 = p * log(two) + boost::math::lgamma(1 + half);
  const Big l1 = log(2 * big_pi()) / 2 + p * log(two) + (p + 1) / 2 * log(half) + tail;
  const Big l2 = log(big_pi()) / 2 + half * log(two) + (p + 1) / 2 * log(p) + tail;
  const Big l3 = p * (log(Big(9) / 5) + log(p) / 2);
  return {l0, l1, l2, l3};
}

ConstantReport gamma_chain_report() {
  ConstantReport rep;
  MarginTracker m;
  double max_identity = 0.0;
  double min_first = INFINITY, min_last = INFINITY;
  std::vector<Big> grid{Big(1), Big(3) / 2};
  for (int k = 2; k <= 1000; ++k) grid.emplace_back(k);
  for (const auto& p : grid) {
    const auto l = gamma_chain_logs(p);
    const double first = static_cast<double>(l[1] - l[0]);
    const double last = static_cast<double>(l[3] - l[2]);
    const double identity = static_cast<double>(abs(l[2] - l[1]));
    max_identity = std::max(max_identity, identity);
    min_first = std::min(min_first, first);
    min_last = std::min(min_last, last);
    m.add(std::min(first, last), static_cast<double>(p));
  }
  rep.points = m.points;
  rep.min_margin = m.min_margin;
  rep.worst_at = m.worst_at;
  rep.max_residual = max_identity;
  rep.holds = m.min_margin > 0.0 && max_identity < 1e-40;
  rep.details = {{"min_log_margin_stirling_link", min_first},
                 {"min_log_margin_final_link", min_last},
                 {"max_middle_link_residual", max_identity}};
  return rep;
}

ConstantReport cosh_report() {
  using boost::multiprecision::cosh;
  using boost::multiprecision::exp;
  ConstantReport rep;
  MarginTracker m;
  double min_exp = INFINITY, min_gauss = INFINITY;
  constexpr int kSide = 100;
  for (int i = 0; i < kSide; ++i) {
    const Big y = Big(20) * i / (kSide - 1);
    const Big ey = exp(y), emy = exp(-y);
    const Big ch = cosh(y), gauss = exp(y * y / 2);
    const double gauss_margin = static_cast<double>((gauss - ch) / gauss);
    min_gauss = std::min(min_gauss, gauss_margin);
    for (int j = 0; j < kSide; ++j) {
      const Big t = Big(-1) + Big(2) * j / (kSide - 1);
      // ch y + t sh y, written without the cancellation near t = -1.
      const Big rhs = ((1 + t) * ey + (1 - t) * emy) / 2;
      const double margin = static_cast<double>((rhs - exp(t * y)) / rhs);
      min_exp = std::min(min_exp, margin);
      m.add(std::min(margin, gauss_margin) + 0.0, static_cast<double>(y));
    }
  }
  rep.points = m.points;
  // Both bounds are equalities at y = 0 and the first one at t = +-1; the
  // 50-digit evaluation leaves residuals far below this threshold there.
  constexpr double kEqualityTolerance = 1e-40;
  rep.min_margin = m.min_margin;
  rep.worst_at = m.worst_at;
  rep.max_residual = std::max(0.0, -m.min_margin);
  rep.holds = m.min_margin >= -kEqualityTolerance;
  rep.details = {{"min_rel_margin_exp", min_exp}, {"min_rel_margin_gauss", min_gauss}};
  return rep;
}

// c(r, K) for the primes bound at kappa = 1/4, z0 = 2 with 1/delta_* <= U
// and U = r N, against 30 e^r. Also evaluates the chain as displayed
// (factor 2 U K / N, no kappa) for comparison.
ConstantReport corollary_c_report() {
  ConstantReport rep;
  MarginTracker m;
  double min_displayed = INFINITY;
  double min_exp_reading = INFINITY;
  constexpr int kR = 100, kK = 100;
  const double K_min = 0.7968, K_max = 1e8;
  const double log2 = std::log(2.0);
  for (int i = 0; i < kR; ++i) {
    const double r = 1.0 + 19.0 * i / (kR - 1);
    const double bound = std::log(kCorollaryFactor) + r;
    for (int j = 0; j < kK; ++j) {
      const double K = K_min * std::pow(K_max / K_min, static_cast<double>(j) / (kK - 1));
      const double l8k = std::log(kLogScale * K);
      const double c_full = kSupportFactor * std::log(kSieveLogScale * 4.0 * (1.0 + r) * K * log2) / l8k;
      const double c_disp = kSupportFactor * std::log(kSieveLogScale * 2.0 * r * K * log2) / l8k;
      const double c_exp = kSupportFactor * std::exp(std::log(kSieveLogScale * 2.0 * r * K * log2) / l8k);
      m.add(bound - std::log(c_full), r);
      min_displayed = std::min(min_displayed, bound - std::log(c_disp));
      min_exp_reading = std::min(min_exp_reading, bound - std::log(c_exp));
    }
  }
  rep.points = m.points;
  rep.min_margin = m.min_margin;
  rep.worst_at = m.worst_at;
  rep.max_residual = 0.0;
  rep.holds = m.min_margin >= 0.0;
  rep.details = {{"min_log_margin_with_kappa", m.min_margin},
                 {"min_log_margin_displayed_chain", min_displayed},
                 {"min_log_margin_exp_reading", min_exp_reading},
                 {"K_min", K_min},
                 {"K_max", K_max}};
  return rep;
}

}  // namespace

double stirling_theta(double x) {
  using boost::multiprecision::log;
  if (!(x > 0.0)) throw ArgumentError("stirling_theta needs x > 0");
  const Big bx(x);
  const Big r = boost::math::lgamma(bx + 1) - log(2 * big_pi()) / 2 - (bx + Big(0.5)) * log(bx) + bx;
  return static_cast<double>(12 * bx * r);
}

ConstantReport check_constants(ConstantCheck which) {
  ConstantReport rep;
  switch (which) {
    case ConstantCheck::stirling:
      rep = stirling_report();
      break;
    case ConstantCheck::gamma_chain:
      rep = gamma_chain_report();
      break;
    case ConstantCheck::cosh_bounds:
      rep = cosh_report();
      break;
    case ConstantCheck::corollary_c:
      rep = corollary_c_report();
      break;
  }
  rep.which = which;
  return rep;
}

}  // namespace dsieve::verify

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsieve/circle.hpp"
#include "dsieve/expsum.hpp"

namespace dsieve::verify {

// Constants appearing on the right-hand sides.
inline constexpr double kTailLeading = 4.0;        // 4 H e^{-lambda^2/4}, 4 (9/5 sqrt p)^p H
inline constexpr double kMomentBase = 9.0 / 5.0;   // (9/5 sqrt p)^p
inline constexpr double kSupportFactor = 9.0;      // 9 |S| ||f||^2 log(...)
inline constexpr double kLogScale = 8.0;           // log(8 H / |S|)
inline constexpr double kSieveLogScale = 64.0;     // primes/squares: log(64 (N + 1/delta_*) ...)
inline constexpr double kSieveDensity = 8.0;       // H = 8 (N + 1/delta_*) ... for primes and squares
inline constexpr double kCorollaryFactor = 30.0;   // 30 |S| ||f||^2 e^{U/N} log(...)
inline constexpr double kRelativeSlack = 1e-9;     // holds <=> lhs <= rhs (1 + slack)

struct NamedConstant {
  std::string_view name;
  double value;
  std::string_view appears_in;
};

inline constexpr NamedConstant kConstantTable[] = {
    {"tail_leading", kTailLeading, "distribution bound 4 H exp(-lambda^2/4); moment bound 4 (9/5 sqrt p)^p H"},
    {"moment_base", kMomentBase, "moment bound (9/5 sqrt p)^p"},
    {"support_factor", kSupportFactor, "9 |S| ||f||_2^2 log(...) for interval, primes, squares"},
    {"log_scale", kLogScale, "log(8 H / |S|)"},
    {"sieve_log_scale", kSieveLogScale, "log(64 (N + 1/delta_*) ...) for primes and squares"},
    {"sieve_density", kSieveDensity, "H = 8 (N + 1/delta_*) log z0 / (kappa log N); H = 8 (N + 1/delta_*) / sqrt N"},
    {"corollary_factor", kCorollaryFactor, "30 |S| ||f||_2^2 e^{U/N} log(8N / (|S| log N))"},
};

enum class Kind { hyp, distrib, rudin_moment, ra, interval, interval_moment, lsi_baseline, primes, squares, corollary };

Kind parse_kind(std::string_view name);
std::string_view kind_name(Kind kind);
const std::vector<Kind>& all_kinds();

/// Which integer set N the abstract kinds (hyp, distrib, rudin_moment, ra)
/// run over, and the matching default hypothesis constant H:
///   interval: [1, N],                        H = N + 1/delta_star
///   primes:   primes in (N^kappa, N],         H = 8 (N + 1/delta_*(sqrt N, z0)) log z0 / (kappa log N)
///   squares:  { n^2 : n <= sqrt N },          H = 8 (N + 1/delta_*(sqrt N, 2)) / sqrt N
enum class Setting { interval, primes, squares };

Setting parse_setting(std::string_view name);
std::string_view setting_name(Setting s);

struct Instance {
  Kind kind = Kind::interval;
  Setting setting = Setting::interval;
  circle::PointSet X;
  std::optional<expsum::SupportedFunction> f;          // ra, interval*, lsi_baseline, primes, squares, corollary
  std::optional<std::vector<std::complex<double>>> c;  // hyp, distrib, rudin_moment; aligned with X
  // Declared support set S, a superset of supp f; defaults to supp f.
  std::optional<std::vector<std::int64_t>> S;
  std::optional<double> N, z, kappa, ell, lambda, p, H;
  std::optional<std::uint64_t> z0, U, U1;
  std::uint64_t seed = 0;

  // Canonical text form; parse(to_text()) round-trips.
  std::string to_text() const;
  static Instance parse(std::string_view key_value_text);
  std::uint64_t digest() const;
};

struct InequalityReport {
  Kind kind = Kind::interval;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::vector<std::pair<std::string, double>> constants;
  bool holds = false;
  std::uint64_t instance_digest = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> notes;
};

/// Evaluates both sides on one instance. Missing fields raise ArgumentError;
/// supports outside the kind's domain or non-dissociate X raise DomainError.
InequalityReport check(const Instance& instance);

struct GeneratorConfig {
  double N = 512;
  std::size_t max_points = 8;
  Setting setting = Setting::interval;
  double kappa = 0.5;
  std::uint64_t z0 = 2;
  double p_max = 6.0;
  double ell_max = 4.0;
  double lambda_max = 4.0;
  double c_scale = 2.0;   // |c(x)| <= c_scale
};

/// Documented instance generator for randomized checks (see README).
Instance generate(Kind kind, const GeneratorConfig& config, std::uint64_t seed, std::uint64_t trial);

struct AggregateReport {
  Kind kind = Kind::interval;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double worst_ratio = 0.0;
  std::uint64_t worst_trial = 0;
  std::uint64_t seed = 0;
  std::vector<InequalityReport> failed;   // full reports, trial order
  InequalityReport worst;
};

AggregateReport check_randomized(Kind kind, const GeneratorConfig& config, std::uint64_t trials, std::uint64_t seed);

enum class ConstantCheck { stirling, gamma_chain, cosh_bounds, corollary_c };

ConstantCheck parse_constant_check(std::string_view name);
std::string_view constant_check_name(ConstantCheck which);

struct ConstantReport {
  ConstantCheck which = ConstantCheck::stirling;
  std::uint64_t points = 0;
  double min_margin = 0.0;    // smallest margin over the grid (>= 0 means pass)
  double worst_at = 0.0;      // grid coordinate of the smallest margin
  double max_residual = 0.0;  // check-specific residual (see README)
  bool holds = false;
  std::vector<std::pair<std::string, double>> details;
};

ConstantReport check_constants(ConstantCheck which);

/// theta(x) = 12 x (ln Gamma(x+1) - ln sqrt(2 pi) - (x + 1/2) ln x + x), evaluated
/// with 50 significant digits.
double stirling_theta(double x);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace dsieve::verify

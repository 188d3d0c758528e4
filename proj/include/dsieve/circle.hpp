#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dsieve::circle {

inline constexpr double kDefaultTolerance = 1e-12;
inline constexpr std::size_t kDefaultCap = 24;

/// Reduced fraction num/den with den > 0.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction make(std::int64_t num, std::int64_t den);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;

  friend bool operator==(const Fraction&, const Fraction&) = default;
  friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b);
};

/// A point of R/Z: exactly a/q (reduced, 0 <= a < q) or a double in [0, 1)
/// carrying an absolute tolerance used for equality and zero tests.
class CirclePoint {
 public:
  static CirclePoint rational(std::int64_t a, std::int64_t q);
  static CirclePoint real(double x, double tolerance = kDefaultTolerance);
  // "a/q" parses as rational, anything else as a decimal literal.
  static CirclePoint parse(std::string_view text, double tolerance = kDefaultTolerance);

  bool exact() const noexcept { return exact_; }
  const Fraction& fraction() const noexcept { return frac_; }
  double value() const noexcept { return exact_ ? frac_.value() : real_; }
  double tolerance() const noexcept { return tol_; }

  CirclePoint to_real(double tolerance = kDefaultTolerance) const;
  std::string to_string() const;

  // Mode-aware: exact points compare exactly, real points within tolerance
  // on the circle. Mixed comparisons promote the rational side.
  bool equals(const CirclePoint& other) const;
  bool operator==(const CirclePoint& other) const { return equals(other); }

 private:
  CirclePoint() = default;

  bool exact_ = true;
  Fraction frac_{};
  double real_ = 0.0;
  double tol_ = kDefaultTolerance;
};

/// A nonnegative quantity that is exact whenever its inputs were.
struct Scalar {
  std::optional<Fraction> exact;
  double approx = 0.0;

  static Scalar of(Fraction f) { return {f, f.value()}; }
  static Scalar of(double x) { return {std::nullopt, x}; }

  double value() const { return approx; }
  bool is_zero(double tolerance = kDefaultTolerance) const;
  std::string to_string() const;

  friend bool operator<(const Scalar& a, const Scalar& b);
  friend bool operator==(const Scalar& a, const Scalar& b);
};

/// ||u||_{R/Z} = min_k |u - k|, in [0, 1/2].
Scalar circle_norm(const CirclePoint& u);

/// Finite set of distinct points sharing a representation mode.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::vector<CirclePoint> points, std::size_t cap = kDefaultCap);

  static PointSet parse(std::string_view comma_separated, std::size_t cap = kDefaultCap);
  // Points k/modulus for each k; duplicates mod modulus are rejected.
  static PointSet from_residues(const std::vector<std::uint64_t>& residues, std::uint64_t modulus,
                                std::size_t cap = kDefaultCap);

  const std::vector<CirclePoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  bool exact() const noexcept { return exact_; }
  std::size_t cap() const noexcept { return cap_; }
  double tolerance() const noexcept { return tol_; }

  // Exact mode: the points are residues[i] / common_denominator().
  std::uint64_t common_denominator() const;
  std::vector<std::uint64_t> residues() const;

  PointSet to_real(double tolerance = kDefaultTolerance) const;
  std::string to_string() const;

  // Throws ResourceError when 3^|X| enumeration would exceed the cap.
  void require_cap(std::string_view what) const;

 private:
  std::vector<CirclePoint> points_;
  std::size_t cap_ = kDefaultCap;
  bool exact_ = true;
  double tol_ = kDefaultTolerance;
  std::uint64_t lcm_ = 1;
};

/// eps(x) in {-1, 0, +1} for each point, in PointSet order.
struct SignPattern {
  std::vector<std::int8_t> eps;

  bool is_zero() const;
  std::string to_string() const;
};

/// delta = min ||x - x'|| over distinct pairs; requires |X| >= 2.
Scalar min_gap(const PointSet& x);

/// All 3^|X| signed sums with their patterns, lexicographic in eps with
/// -1 < 0 < +1 and the first point most significant.
std::vector<std::pair<SignPattern, CirclePoint>> signed_sums(const PointSet& x);

/// Raw signed-sum values without patterns, in the same order.
std::vector<std::uint64_t> exact_signed_sums(const PointSet& x);
std::vector<double> real_signed_sums(const PointSet& x);

bool is_dissociate(const PointSet& x);

/// delta_star = min over nonzero patterns of ||sum eps(x) x||; zero iff X is
/// not dissociate. Requires X nonempty.
Scalar delta_star(const PointSet& x);

enum class ArithMethod { brute_force, accelerated };

/// delta_*(z, z0) = min over nonzero patterns y and integers q <= z with
/// (q, P(z0)) = 1 of ||q y|| / q, i.e. the distance from the signed sums to
/// rationals whose denominators avoid the primes below z0.
Scalar delta_star_arith(const PointSet& x, double z, std::uint64_t z0,
                        ArithMethod method = ArithMethod::accelerated);

/// Maximal dissociate subset, scanning points in ascending order with
/// first-fit insertion. Rational mode only.
PointSet greedy_dissociate(const PointSet& candidates);

/// { sum eps(a) a : eps in {0, +-1}^D }, deduplicated and ascending.
std::vector<CirclePoint> span(const PointSet& d);

/// Minimal distance from y to a fraction a/q with q <= bound, via
/// continued-fraction best approximations. Exact.
Fraction nearest_fraction_distance(Fraction y, std::uint64_t bound);

// ---------------------------------------------------------------------------
// Finite abelian groups Z/m_1 x ... x Z/m_k, elements encoded in mixed radix
// (first component most significant). Z/U is the single-modulus case.

class FiniteGroup {
 public:
  explicit FiniteGroup(std::vector<std::uint64_t> moduli);

  const std::vector<std::uint64_t>& moduli() const noexcept { return moduli_; }
  std::uint64_t order() const noexcept { return order_; }

  std::uint64_t encode(const std::vector<std::uint64_t>& components) const;
  std::vector<std::uint64_t> decode(std::uint64_t code) const;
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t negate(std::uint64_t a) const;

  std::vector<std::uint64_t> signed_sums(const std::vector<std::uint64_t>& elements) const;
  bool is_dissociate(const std::vector<std::uint64_t>& elements) const;
  // Ascending-code first-fit maximal dissociate subset.
  std::vector<std::uint64_t> greedy_dissociate(std::vector<std::uint64_t> candidates,
                                               std::size_t cap = 64) const;
  // Sorted, deduplicated signed span.
  std::vector<std::uint64_t> span(const std::vector<std::uint64_t>& elements) const;

 private:
  std::vector<std::uint64_t> moduli_;
  std::uint64_t order_ = 1;
};

}  // namespace dsieve::circle

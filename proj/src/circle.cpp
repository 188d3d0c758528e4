#include "dsieve/circle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "dsieve/errors.hpp"
#include "dsieve/kernels.hpp"

namespace dsieve::circle {

namespace {

using i128 = __int128;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ArgumentError("cannot parse integer '" + std::string(s) + "'");
  }
  return v;
}

double wrap_unit(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;
  return f;
}

double circle_dist(double x) {
  const double f = wrap_unit(x);
  return std::min(f, 1.0 - f);
}

std::uint64_t ipow3(std::size_t n) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < n; ++i) r *= 3;
  return r;
}

SignPattern decode_pattern(std::uint64_t index, std::size_t n) {
  SignPattern p;
  p.eps.assign(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    p.eps[i] = static_cast<std::int8_t>(static_cast<int>(index % 3) - 1);
    index /= 3;
  }
  return p;
}

std::vector<std::uint64_t> admissible_moduli(std::uint64_t bound, std::uint64_t z0) {
  std::vector<std::uint64_t> small;
  for (std::uint64_t p = 2; p < z0; ++p) {
    bool prime = true;
    for (std::uint64_t d = 2; d * d <= p; ++d) {
      if (p % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) small.push_back(p);
  }
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = 1; q <= bound; ++q) {
    bool ok = true;
    for (std::uint64_t p : small) {
      if (q % p == 0) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(q);
  }
  return out;
}

// ||q t / L|| * L for 0 <= t < L.
std::uint64_t scaled_norm(std::uint64_t q, std::uint64_t t, std::uint64_t L) {
  const auto v = static_cast<std::uint64_t>(static_cast<unsigned __int128>(q) * t % L);
  return std::min(v, L - v);
}

// num/den < best_num/best_den
bool frac_less(std::uint64_t num, std::uint64_t den, std::uint64_t best_num, std::uint64_t best_den) {
  return static_cast<unsigned __int128>(num) * best_den < static_cast<unsigned __int128>(best_num) * den;
}

Fraction fraction_from(std::uint64_t num, std::uint64_t den) {
  if (den > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw ResourceError("denominator overflow in exact circle arithmetic");
  }
  return Fraction::make(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

// --- Fraction ---------------------------------------------------------------

Fraction Fraction::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ArgumentError("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

std::string Fraction::to_string() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
  const i128 lhs = static_cast<i128>(a.num) * b.den;
  const i128 rhs = static_cast<i128>(b.num) * a.den;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

// --- CirclePoint ------------------------------------------------------------

CirclePoint CirclePoint::rational(std::int64_t a, std::int64_t q) {
  if (q == 0) throw ArgumentError("circle point needs a nonzero denominator");
  if (q < 0) {
    a = -a;
    q = -q;
  }
  a %= q;
  if (a < 0) a += q;
  CirclePoint p;
  p.exact_ = true;
  p.frac_ = Fraction::make(a, q);
  return p;
}

CirclePoint CirclePoint::real(double x, double tolerance) {
  if (!std::isfinite(x)) throw ArgumentError("circle point must be finite");
  if (!(tolerance > 0.0)) throw ArgumentError("real circle point needs a positive tolerance");
  CirclePoint p;
  p.exact_ = false;
  p.real_ = wrap_unit(x);
  p.tol_ = tolerance;
  return p;
}

CirclePoint CirclePoint::parse(std::string_view text, double tolerance) {
  text = trim(text);
  if (text.empty()) throw ArgumentError("empty circle point");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  const std::string buf(text);
  char* end = nullptr;
  const double x = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) throw ArgumentError("cannot parse circle point '" + buf + "'");
  return real(x, tolerance);
}

CirclePoint CirclePoint::to_real(double tolerance) const {
  return real(value(), exact_ ? tolerance : std::max(tol_, tolerance));
}

std::string CirclePoint::to_string() const {
  if (exact_) return frac_.to_string();
  std::ostringstream os;
  os.precision(17);
  os << real_;
  return os.str();
}

bool CirclePoint::equals(const CirclePoint& other) const {
  if (exact_ && other.exact_) return frac_ == other.frac_;
  const double tol = std::max(exact_ ? 0.0 : tol_, other.exact_ ? 0.0 : other.tol_);
  return circle_dist(value() - other.value()) <= tol;
}

// --- Scalar -----------------------------------------------------------------

bool Scalar::is_zero(double tolerance) const {
  if (exact) return exact->num == 0;
  return approx <= tolerance;
}

std::string Scalar::to_string() const {
  if (exact) return exact->to_string();
  std::ostringstream os;
  os.precision(17);
  os << approx;
  return os.str();
}

bool operator<(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return *a.exact < *b.exact;
  return a.approx < b.approx;
}

bool operator==(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return *a.exact == *b.exact;
  return a.approx == b.approx;
}

Scalar circle_norm(const CirclePoint& u) {
  if (u.exact()) {
    const Fraction& f = u.fraction();
    return Scalar::of(Fraction::make(std::min(f.num, f.den - f.num), f.den));
  }
  return Scalar::of(circle_dist(u.value()));
}

// --- PointSet ---------------------------------------------------------------

PointSet::PointSet(std::vector<CirclePoint> points, std::size_t cap) : cap_(cap) {
  exact_ = std::all_of(points.begin(), points.end(), [](const CirclePoint& p) { return p.exact(); });
  if (!exact_) {
    for (auto& p : points) {
      tol_ = std::max(tol_, p.exact() ? 0.0 : p.tolerance());
    }
    for (auto& p : points) p = p.to_real(tol_);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (points[i].equals(points[j])) {
        throw ArgumentError("duplicate point " + points[i].to_string() + " in point set");
      }
    }
  }
  if (exact_) {
    std::uint64_t l = 1;
    for (const auto& p : points) {
      const auto q = static_cast<std::uint64_t>(p.fraction().den);
      const std::uint64_t g = std::gcd(l, q);
      const unsigned __int128 next = static_cast<unsigned __int128>(l / g) * q;
      if (next > (std::uint64_t{1} << 62)) {
        throw ResourceError("common denominator of point set exceeds 2^62");
      }
      l = static_cast<std::uint64_t>(next);
    }
    lcm_ = l;
  }
  points_ = std::move(points);
}

PointSet PointSet::parse(std::string_view comma_separated, std::size_t cap) {
  std::vector<CirclePoint> pts;
  std::string_view rest = trim(comma_separated);
  if (!rest.empty() && rest.front() == '{') rest.remove_prefix(1);
  if (!rest.empty() && rest.back() == '}') rest.remove_suffix(1);
  while (!trim(rest).empty()) {
    const auto comma = rest.find(',');
    pts.push_back(CirclePoint::parse(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return PointSet(std::move(pts), cap);
}

PointSet PointSet::from_residues(const std::vector<std::uint64_t>& residues, std::uint64_t modulus,
                                 std::size_t cap) {
  if (modulus == 0) throw ArgumentError("modulus must be positive");
  std::vector<CirclePoint> pts;
  pts.reserve(residues.size());
  for (std::uint64_t r : residues) {
    pts.push_back(CirclePoint::rational(static_cast<std::int64_t>(r % modulus),
                                        static_cast<std::int64_t>(modulus)));
  }
  return PointSet(std::move(pts), cap);
}

std::uint64_t PointSet::common_denominator() const {
  if (!exact_) throw ArgumentError("common denominator requested for a real-mode point set");
  return lcm_;
}

std::vector<std::uint64_t> PointSet::residues() const {
  const std::uint64_t l = common_denominator();
  std::vector<std::uint64_t> out;
  out.reserve(points_.size());
  for (const auto& p : points_) {
    const auto& f = p.fraction();
    out.push_back(static_cast<std::uint64_t>(f.num) * (l / static_cast<std::uint64_t>(f.den)));
  }
  return out;
}

PointSet PointSet::to_real(double tolerance) const {
  std::vector<CirclePoint> pts;
  for (const auto& p : points_) pts.push_back(p.to_real(tolerance));
  return PointSet(std::move(pts), cap_);
}

std::string PointSet::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i) s += ", ";
    s += points_[i].to_string();
  }
  return s + "}";
}

void PointSet::require_cap(std::string_view what) const {
  if (points_.size() > cap_) {
    throw ResourceError(std::string(what) + ": |X| = " + std::to_string(points_.size()) +
                        " exceeds the signed-sum enumeration cap " + std::to_string(cap_));
  }
}

// --- SignPattern ------------------------------------------------------------

bool SignPattern::is_zero() const {
  return std::all_of(eps.begin(), eps.end(), [](std::int8_t e) { return e == 0; });
}

std::string SignPattern::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (i) s += ",";
    s += eps[i] > 0 ? "+1" : (eps[i] < 0 ? "-1" : "0");
  }
  return s + ")";
}

// --- Separation quantities --------------------------------------------------

Scalar min_gap(const PointSet& x) {
  if (x.size() < 2) throw ArgumentError("min_gap needs at least two points");
  if (x.exact()) {
    const std::uint64_t l = x.common_denominator();
    const auto r = x.residues();
    std::uint64_t best = l;
    for (std::size_t i = 0; i < r.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const std::uint64_t d = r[i] > r[j] ? r[i] - r[j] : r[j] - r[i];
        best = std::min(best, std::min(d, l - d));
      }
    }
    return Scalar::of(fraction_from(best, l));
  }
  double best = 1.0;
  const auto& p = x.points();
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) best = std::min(best, circle_dist(p[i].value() - p[j].value()));
  }
  return Scalar::of(best);
}

std::vector<std::uint64_t> exact_signed_sums(const PointSet& x) {
  x.require_cap("signed_sums");
  const auto r = x.residues();
  return kernels::omp::signed_sums(r, x.common_denominator());
}

std::vector<double> real_signed_sums(const PointSet& x) {
  x.require_cap("signed_sums");
  std::vector<double> sums{0.0};
  for (const auto& p : x.points()) {
    const double v = p.value();
    std::vector<double> next;
    next.reserve(sums.size() * 3);
    for (double s : sums) {
      next.push_back(wrap_unit(s - v));
      next.push_back(s);
      next.push_back(wrap_unit(s + v));
    }
    sums = std::move(next);
  }
  return sums;
}

std::vector<std::pair<SignPattern, CirclePoint>> signed_sums(const PointSet& x) {
  std::vector<std::pair<SignPattern, CirclePoint>> out;
  const std::size_t n = x.size();
  if (x.exact()) {
    const auto sums = exact_signed_sums(x);
    const auto l = static_cast<std::int64_t>(x.common_denominator());
    out.reserve(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
      out.emplace_back(decode_pattern(i, n), CirclePoint::rational(static_cast<std::int64_t>(sums[i]), l));
    }
  } else {
    const auto sums = real_signed_sums(x);
    out.reserve(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
      out.emplace_back(decode_pattern(i, n), CirclePoint::real(sums[i], x.tolerance()));
    }
  }
  return out;
}

Scalar delta_star(const PointSet& x) {
  if (x.empty()) throw ArgumentError("delta_star needs a nonempty point set");
  const std::uint64_t centre = (ipow3(x.size()) - 1) / 2;
  if (x.exact()) {
    const std::uint64_t l = x.common_denominator();
    const auto sums = exact_signed_sums(x);
    std::uint64_t best = l;
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (i == centre) continue;
      best = std::min(best, std::min(sums[i], l - sums[i]));
      if (best == 0) break;
    }
    return Scalar::of(fraction_from(best, l));
  }
  const auto sums = real_signed_sums(x);
  double best = 1.0;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (i != centre) best = std::min(best, circle_dist(sums[i]));
  }
  return Scalar::of(best);
}

bool is_dissociate(const PointSet& x) {
  if (x.empty()) return true;
  return !delta_star(x).is_zero(x.tolerance());
}

namespace {

Fraction reduced_u128(unsigned __int128 num, unsigned __int128 den) {
  unsigned __int128 a = num, b = den;
  while (b != 0) {
    const unsigned __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr auto kMax = static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max());
  if (den > kMax || num > kMax) throw ResourceError("fraction exceeds 64-bit range");
  return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

}  // namespace

Fraction nearest_fraction_distance(Fraction y, std::uint64_t bound) {
  if (bound == 0) throw ArgumentError("denominator bound must be positive");
  // Work with y reduced into [0, 1); distances are translation invariant.
  std::int64_t n = y.num % y.den;
  if (n < 0) n += y.den;
  const std::int64_t dd = y.den;
  if (n == 0 || static_cast<std::uint64_t>(dd) <= bound) return {0, 1};

  // Best lower/upper approximations with denominators <= bound.
  std::uint64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  std::uint64_t num = static_cast<std::uint64_t>(n), den = static_cast<std::uint64_t>(dd);
  while (den != 0) {
    const std::uint64_t a = num / den;
    const unsigned __int128 q2 = q0 + static_cast<unsigned __int128>(a) * q1;
    if (q2 > bound) break;
    const std::uint64_t p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = static_cast<std::uint64_t>(q2);
    const std::uint64_t r = num - a * den;
    num = den;
    den = r;
  }
  const std::uint64_t k = (bound - q0) / q1;
  const std::uint64_t sp = p0 + k * p1;
  const std::uint64_t sq = q0 + k * q1;

  // |y - p/q| = e / (den * q); the common den cancels in comparisons.
  auto err = [&](std::uint64_t p, std::uint64_t q) {
    const auto lhs = static_cast<unsigned __int128>(n) * q;
    const auto rhs = static_cast<unsigned __int128>(p) * static_cast<std::uint64_t>(dd);
    return lhs > rhs ? lhs - rhs : rhs - lhs;
  };
  const unsigned __int128 e1 = err(p1, q1);
  const unsigned __int128 e2 = err(sp, sq);
  const bool semi_better = e2 * q1 < e1 * sq;
  const std::uint64_t q = semi_better ? sq : q1;
  return reduced_u128(semi_better ? e2 : e1, static_cast<unsigned __int128>(dd) * q);
}

Scalar delta_star_arith(const PointSet& x, double z, std::uint64_t z0, ArithMethod method) {
  if (x.empty()) throw ArgumentError("delta_star_arith needs a nonempty point set");
  if (!(z >= 1.0) || !std::isfinite(z)) throw ArgumentError("delta_star_arith needs z >= 1");
  if (z0 < 2) throw ArgumentError("delta_star_arith needs z0 >= 2");
  const auto bound = static_cast<std::uint64_t>(std::floor(z));
  const std::uint64_t centre = (ipow3(x.size()) - 1) / 2;

  if (!x.exact()) {
    const auto qs = admissible_moduli(bound, z0);
    const auto sums = real_signed_sums(x);
    double best = 1.0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (i == centre) continue;
      for (std::uint64_t q : qs) {
        best = std::min(best, circle_dist(static_cast<double>(q) * sums[i]) / static_cast<double>(q));
      }
    }
    return Scalar::of(best);
  }

  const std::uint64_t l = x.common_denominator();
  const auto sums = exact_signed_sums(x);
  // Best so far is best_num / best_den.
  std::uint64_t best_num = 1, best_den = 1;
  auto consider = [&](std::uint64_t num, std::uint64_t den) {
    if (frac_less(num, den, best_num, best_den)) {
      best_num = num;
      best_den = den;
    }
  };

  if (method == ArithMethod::brute_force) {
    const auto qs = admissible_moduli(bound, z0);
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (i == centre) continue;
      for (std::uint64_t q : qs) {
        const unsigned __int128 den = static_cast<unsigned __int128>(q) * l;
        const Fraction f = reduced_u128(scaled_norm(q, sums[i], l), den);
        consider(static_cast<std::uint64_t>(f.num), static_cast<std::uint64_t>(f.den));
      }
    }
    return Scalar::of(fraction_from(best_num, best_den));
  }

  // ||q t/L|| = ||q (L - t)/L||, so t and L - t are interchangeable.
  std::vector<std::uint64_t> values;
  values.reserve(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (i != centre) values.push_back(std::min(sums[i], l - sums[i]));
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (!values.empty() && values.front() == 0) return Scalar::of(Fraction{0, 1});

  if (z0 == 2) {
    for (std::uint64_t t : values) {
      const Fraction f = nearest_fraction_distance(fraction_from(t, l), bound);
      consider(static_cast<std::uint64_t>(f.num), static_cast<std::uint64_t>(f.den));
      if (best_num == 0) break;
    }
  } else {
    const auto qs = admissible_moduli(bound, z0);
    for (std::uint64_t t : values) {
      for (std::uint64_t q : qs) {
        const unsigned __int128 den = static_cast<unsigned __int128>(q) * l;
        const Fraction f = reduced_u128(scaled_norm(q, t, l), den);
        consider(static_cast<std::uint64_t>(f.num), static_cast<std::uint64_t>(f.den));
      }
      if (best_num == 0) break;
    }
  }
  return Scalar::of(fraction_from(best_num, best_den));
}

PointSet greedy_dissociate(const PointSet& candidates) {
  if (!candidates.exact()) throw ArgumentError("greedy_dissociate requires rational points");
  if (candidates.empty()) return candidates;
  const std::uint64_t l = candidates.common_denominator();
  FiniteGroup group({l});
  const auto picked = group.greedy_dissociate(candidates.residues(), candidates.cap());
  return PointSet::from_residues(picked, l, candidates.cap());
}

std::vector<CirclePoint> span(const PointSet& d) {
  if (d.exact()) {
    const std::uint64_t l = d.empty() ? 1 : d.common_denominator();
    FiniteGroup group({l});
    std::vector<CirclePoint> out;
    for (std::uint64_t r : group.span(d.residues())) {
      out.push_back(CirclePoint::rational(static_cast<std::int64_t>(r), static_cast<std::int64_t>(l)));
    }
    return out;
  }
  auto sums = real_signed_sums(d);
  std::sort(sums.begin(), sums.end());
  std::vector<CirclePoint> out;
  for (double s : sums) {
    const CirclePoint p = CirclePoint::real(s, d.tolerance());
    if (out.empty() || !out.back().equals(p)) out.push_back(p);
  }
  // Points near 1 wrap onto 0.
  if (out.size() > 1 && out.back().equals(out.front())) out.pop_back();
  return out;
}

// --- FiniteGroup ------------------------------------------------------------

namespace {

// Membership set over [0, order): a bitmap for small groups, hashed otherwise.
class CodeSet {
 public:
  explicit CodeSet(std::uint64_t order) : dense_(order <= (std::uint64_t{1} << 26)) {
    if (dense_) bits_.assign(order, 0);
  }
  bool contains(std::uint64_t c) const { return dense_ ? bits_[c] != 0 : hashed_.count(c) != 0; }
  void insert(std::uint64_t c) {
    if (dense_) {
      bits_[c] = 1;
    } else {
      hashed_.insert(c);
    }
  }

 private:
  bool dense_;
  std::vector<char> bits_;
  std::unordered_set<std::uint64_t> hashed_;
};

constexpr std::size_t kSpanLimit = std::size_t{1} << 26;

}  // namespace

FiniteGroup::FiniteGroup(std::vector<std::uint64_t> moduli) : moduli_(std::move(moduli)) {
  if (moduli_.empty()) throw ArgumentError("finite group needs at least one modulus");
  for (std::uint64_t m : moduli_) {
    if (m == 0) throw ArgumentError("group moduli must be positive");
    const unsigned __int128 next = static_cast<unsigned __int128>(order_) * m;
    if (next > (std::uint64_t{1} << 62)) throw ResourceError("group order exceeds 2^62");
    order_ = static_cast<std::uint64_t>(next);
  }
}

std::uint64_t FiniteGroup::encode(const std::vector<std::uint64_t>& components) const {
  if (components.size() != moduli_.size()) {
    throw ArgumentError("element has " + std::to_string(components.size()) + " components, group has " +
                        std::to_string(moduli_.size()));
  }
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < moduli_.size(); ++i) code = code * moduli_[i] + components[i] % moduli_[i];
  return code;
}

std::vector<std::uint64_t> FiniteGroup::decode(std::uint64_t code) const {
  if (code >= order_) throw RangeError("group element code out of range");
  std::vector<std::uint64_t> out(moduli_.size());
  for (std::size_t i = moduli_.size(); i-- > 0;) {
    out[i] = code % moduli_[i];
    code /= moduli_[i];
  }
  return out;
}

std::uint64_t FiniteGroup::add(std::uint64_t a, std::uint64_t b) const {
  if (moduli_.size() == 1) {
    const unsigned __int128 s = static_cast<unsigned __int128>(a) + b;
    return static_cast<std::uint64_t>(s % order_);
  }
  auto ca = decode(a);
  const auto cb = decode(b);
  for (std::size_t i = 0; i < ca.size(); ++i) ca[i] = (ca[i] + cb[i]) % moduli_[i];
  return encode(ca);
}

std::uint64_t FiniteGroup::negate(std::uint64_t a) const {
  auto c = decode(a);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = (moduli_[i] - c[i]) % moduli_[i];
  return encode(c);
}

std::vector<std::uint64_t> FiniteGroup::signed_sums(const std::vector<std::uint64_t>& elements) const {
  if (elements.size() > 24) throw ResourceError("signed sums of more than 24 elements");
  std::vector<std::uint64_t> sums{0};
  for (std::uint64_t e : elements) {
    const std::uint64_t neg = negate(e);
    std::vector<std::uint64_t> next;
    next.reserve(sums.size() * 3);
    for (std::uint64_t s : sums) {
      next.push_back(add(s, neg));
      next.push_back(s);
      next.push_back(add(s, e));
    }
    sums = std::move(next);
  }
  return sums;
}

bool FiniteGroup::is_dissociate(const std::vector<std::uint64_t>& elements) const {
  CodeSet in_span(order_);
  std::vector<std::uint64_t> members{0};
  in_span.insert(0);
  for (std::uint64_t c : elements) {
    if (c >= order_) throw RangeError("group element code out of range");
    if (in_span.contains(c)) return false;
    const std::uint64_t neg = negate(c);
    const std::size_t k = members.size();
    if (3 * k > kSpanLimit) throw ResourceError("span exceeds 2^26 elements");
    for (std::size_t i = 0; i < k; ++i) {
      for (std::uint64_t s : {add(members[i], c), add(members[i], neg)}) {
        if (!in_span.contains(s)) {
          in_span.insert(s);
          members.push_back(s);
        }
      }
    }
  }
  return true;
}

std::vector<std::uint64_t> FiniteGroup::greedy_dissociate(std::vector<std::uint64_t> candidates,
                                                          std::size_t cap) const {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  CodeSet in_span(order_);
  std::vector<std::uint64_t> members{0};
  in_span.insert(0);
  std::vector<std::uint64_t> picked;
  for (std::uint64_t c : candidates) {
    if (c >= order_) throw RangeError("group element code out of range");
    if (in_span.contains(c)) continue;
    if (picked.size() == cap) {
      throw ResourceError("greedy dissociate subset exceeds cap " + std::to_string(cap));
    }
    picked.push_back(c);
    const std::uint64_t neg = negate(c);
    const std::size_t k = members.size();
    if (3 * k > kSpanLimit) throw ResourceError("span exceeds 2^26 elements");
    for (std::size_t i = 0; i < k; ++i) {
      for (std::uint64_t s : {add(members[i], c), add(members[i], neg)}) {
        if (!in_span.contains(s)) {
          in_span.insert(s);
          members.push_back(s);
        }
      }
    }
    if (members.size() == order_) break;
  }
  return picked;
}

std::vector<std::uint64_t> FiniteGroup::span(const std::vector<std::uint64_t>& elements) const {
  CodeSet in_span(order_);
  std::vector<std::uint64_t> members{0};
  in_span.insert(0);
  for (std::uint64_t c : elements) {
    if (c >= order_) throw RangeError("group element code out of range");
    const std::uint64_t neg = negate(c);
    const std::size_t k = members.size();
    if (3 * k > kSpanLimit) throw ResourceError("span exceeds 2^26 elements");
    for (std::size_t i = 0; i < k; ++i) {
      for (std::uint64_t s : {add(members[i], c), add(members[i], neg)}) {
        if (!in_span.contains(s)) {
          in_span.insert(s);
          members.push_back(s);
        }
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

}  // namespace dsieve::circle

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "dsieve/circle.hpp"
#include "dsieve/kernels.hpp"

namespace dsieve::expsum {

using Complex = std::complex<double>;

/// n -> f(n) with finite support. Zero weights are dropped, so every
/// stored weight is nonzero and the support is exactly {n : f(n) != 0}.
class SupportedFunction {
 public:
  SupportedFunction() = default;

  static SupportedFunction indicator(std::vector<std::int64_t> support);
  // Duplicate n are rejected.
  static SupportedFunction from_pairs(std::vector<std::pair<std::int64_t, Complex>> pairs);
  // One entry per line: "n" (weight 1), "n re" or "n re im". '#' starts a comment.
  static SupportedFunction parse(std::string_view text);

  void set(std::int64_t n, Complex value);

  const std::vector<std::int64_t>& support() const noexcept { return support_; }
  const std::vector<Complex>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return support_.size(); }
  bool empty() const noexcept { return support_.empty(); }
  Complex at(std::int64_t n) const;

  double norm2_sq() const noexcept { return norm2_sq_; }
  double norm1() const noexcept { return norm1_; }
  bool is_indicator() const;

 private:
  void refresh();

  std::vector<std::int64_t> support_;
  std::vector<Complex> weights_;
  double norm2_sq_ = 0.0;
  double norm1_ = 0.0;
};

kernels::Phase to_phase(const circle::CirclePoint& x);

/// T(f, x) = sum_n f(n) e(n x), compensated summation.
Complex trig_poly(const SupportedFunction& f, const circle::CirclePoint& x);
std::vector<Complex> trig_poly_many(const SupportedFunction& f, const std::vector<circle::CirclePoint>& xs,
                                    bool parallel = true);

/// T(f, u/U) for u = 0..U-1: residues bucketed mod U, then one length-U DFT.
std::vector<Complex> trig_poly_all(const SupportedFunction& f, std::uint64_t U,
                                   std::uint64_t memory_budget = std::uint64_t{1} << 30);
/// Same values by direct summation (O(U |S|)).
std::vector<Complex> trig_poly_all_direct(const SupportedFunction& f, std::uint64_t U, bool parallel = true);

/// sum_x c(x) e(n x) for each n in ns.
std::vector<Complex> dual_poly(const std::vector<Complex>& c, const circle::PointSet& x,
                               const std::vector<std::int64_t>& ns, bool parallel = true);

struct SpectrumResult {
  std::uint64_t modulus = 1;
  double threshold = 0.0;
  std::vector<std::pair<std::uint64_t, double>> entries;  // (u, |T(f, u/U)|), ascending u

  bool contains(std::uint64_t u) const;
};

// Values within this relative distance of the threshold count as above it.
inline constexpr double kSpectrumTieTolerance = 1e-12;

/// { u : |T(f, u/U)| >= ||f||_1 / A }.
SpectrumResult spectrum(const SupportedFunction& f, std::uint64_t U, double A);

/// sum_{x in X} |T(f, x)|^p.
double moment(const SupportedFunction& f, const circle::PointSet& x, double p);

/// sum_{n in ns} |sum_x c(x) e(n x)|^p.
double dual_moment(const std::vector<Complex>& c, const circle::PointSet& x, const std::vector<std::int64_t>& ns,
                   double p);

struct GroupMoment {
  double lp_norm = 0.0;   // (1/U sum_u |T(c, u/U)|^p)^(1/p)
  double l2_norm = 0.0;   // (1/U sum_u |T(c, u/U)|^2)^(1/2)
  double ratio = 0.0;     // lp_norm / l2_norm: empirical Lambda(p) constant for this c
};

/// c is supported on residues of Z/UZ.
GroupMoment group_moment(const SupportedFunction& c, std::uint64_t U, double p);

}  // namespace dsieve::expsum

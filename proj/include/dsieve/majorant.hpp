#pragma once

#include <complex>
#include <cstdint>

namespace dsieve::majorant {

inline constexpr unsigned kDefaultTerms = 256;
inline constexpr unsigned kMinTerms = 8;

/// psi^(alpha) approximated by a truncated trapezoid sum with its error bound.
struct FourierSample {
  std::complex<double> value;
  double error_bound = 0.0;   // truncation + evaluation + rounding allowance
  double half_window = 0.0;   // samples cover [mid - half_window, mid + half_window]
  std::uint64_t samples = 0;
};

struct LatticeSum {
  double value = 0.0;
  double error_bound = 0.0;
};

/// psi(x) = (B(delta (x - M)) + B(delta (M + N - x))) / 2 where B is
/// Beurling's entire function: B >= sgn, B^ supported in [-1, 1] and
/// int (B - sgn) = 1. Hence psi >= 0, psi >= 1 on [M, M+N], psi^ vanishes
/// outside [-delta, delta] and int psi = N + 1/delta.
///
/// B(x) - sgn(x) is evaluated through the trigamma function
/// psi_1(1 + |x|) = sum_{n >= 1} (|x| + n)^-2, summed for n <= K and closed by
/// Euler-Maclaurin, which leaves an error of at most 1/(30 (|x|+K)^9).
class SelbergMajorant {
 public:
  static SelbergMajorant construct(double M, double N, double delta, unsigned K = kDefaultTerms);

  double M() const noexcept { return m_; }
  double N() const noexcept { return n_; }
  double delta() const noexcept { return delta_; }
  unsigned terms() const noexcept { return k_; }
  double midpoint() const noexcept { return m_ + n_ / 2; }

  // int psi = psi^(0) = N + 1/delta.
  double mass() const noexcept { return n_ + 1.0 / delta_; }

  // Absolute bound on |eval(t) - psi(t)|: series truncation plus a
  // floating-point allowance.
  double tail_bound() const noexcept { return tail_; }

  double eval(double t) const;
  double operator()(double t) const { return eval(t); }

  // C with psi(t) <= C / (1 + t^2) whenever t lies at distance >= gap from
  // [M, M+N].
  double decay_constant(double gap) const;

  // Trapezoid rule with the given step. Exact up to truncation when
  // |alpha| + delta < 1/step (no aliasing); otherwise, or when more than
  // max_samples nodes would be needed for error < 1e-6 * mass, throws
  // AccuracyError carrying a step that would work.
  FourierSample fourier_mass_check(double alpha, double step,
                                   std::uint64_t max_samples = 400'000'000) const;

  // sum_{n in Z} psi(n), truncated with a certified tail.
  LatticeSum lattice_sum(double relative_tolerance = 1e-7) const;

 private:
  SelbergMajorant(double m, double n, double delta, unsigned k);

  // B(x) - sgn(x), with sgn(0) = 0.
  double beurling_excess(double x) const;
  // Bound on sum over |t - mid| > w of step * psi(t) (and of psi itself).
  double window_tail(double half_window, double step) const;

  double m_, n_, delta_;
  unsigned k_;
  double tail_;
};

}  // namespace dsieve::majorant

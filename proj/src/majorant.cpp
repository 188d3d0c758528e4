#include "dsieve/majorant.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dsieve/errors.hpp"
#include "dsieve/kernels.hpp"

namespace dsieve::majorant {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
// Quadrature truncation target, relative to the mass. Kept an order of
// magnitude below the 1e-6 acceptance level so evaluation error fits too.
constexpr double kWindowTarget = 1e-7;
// Fixed chunking keeps the parallel reduction order independent of the
// thread count.
constexpr std::int64_t kChunks = 256;

struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

SelbergMajorant::SelbergMajorant(double m, double n, double delta, unsigned k)
    : m_(m), n_(n), delta_(delta), k_(k) {
  const double trunc = (2.0 / (kPi * kPi)) / (30.0 * std::pow(static_cast<double>(k), 9));
  tail_ = trunc + 64 * kEps;
}

SelbergMajorant SelbergMajorant::construct(double M, double N, double delta, unsigned K) {
  if (!std::isfinite(M)) throw ArgumentError("majorant: M must be finite");
  if (!(N > 0.0) || !std::isfinite(N)) throw ArgumentError("majorant: N must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ArgumentError("majorant: delta must be positive");
  if (K < kMinTerms) throw ArgumentError("majorant: K must be at least " + std::to_string(kMinTerms));
  return SelbergMajorant(M, N, delta, K);
}

double SelbergMajorant::beurling_excess(double x) const {
  if (x == 0.0) return 1.0;
  const double a = std::abs(x);
  const double s = std::sin(kPi * a) / kPi;
  // Beyond K the asymptotic expansion alone is at least as accurate as the
  // K-term sum, and avoids cancellation between 1/a and psi_1.
  const unsigned kk = a >= k_ ? 0 : k_;
  const double b = a + kk;
  const double b2 = b * b;
  const double b3 = b2 * b;
  const double b5 = b3 * b2;
  const double b7 = b5 * b2;
  double core;
  if (kk == 0) {
    if (x > 0) {
      core = 1 / (2 * b2) - 1 / (6 * b3) + 1 / (30 * b5) - 1 / (42 * b7);
    } else {
      core = 1 / (2 * b2) + 1 / (6 * b3) - 1 / (30 * b5) + 1 / (42 * b7);
    }
  } else {
    double head = 0.0;
    for (unsigned n = kk; n >= 1; --n) {
      const double d = a + n;
      head += 1.0 / (d * d);
    }
    const double tail = 1 / b - 1 / (2 * b2) + 1 / (6 * b3) - 1 / (30 * b5) + 1 / (42 * b7);
    const double psi1 = head + tail;
    core = x > 0 ? 1 / a - psi1 : psi1 + 1 / (a * a) - 1 / a;
  }
  return 2 * s * s * core;
}

double SelbergMajorant::eval(double t) const {
  const double u = delta_ * (t - m_);
  const double v = delta_ * (m_ + n_ - t);
  const auto sgn = [](double y) { return y > 0 ? 1.0 : (y < 0 ? -1.0 : 0.0); };
  return 0.5 * (sgn(u) + sgn(v) + beurling_excess(u) + beurling_excess(v));
}

double SelbergMajorant::decay_constant(double gap) const {
  if (!(gap > 0.0)) throw ArgumentError("decay_constant needs a positive gap");
  const double r = std::max(std::abs(m_), std::abs(m_ + n_));
  return (2.0 / (kPi * kPi * delta_ * delta_)) * (1.0 / (gap * gap) + std::pow(1.0 + r / gap, 2));
}

double SelbergMajorant::window_tail(double half_window, double step) const {
  const double gap = half_window - n_ / 2;
  if (gap <= step) return std::numeric_limits<double>::infinity();
  return 4.0 / (kPi * kPi * delta_ * delta_ * (gap - step));
}

FourierSample SelbergMajorant::fourier_mass_check(double alpha, double step,
                                                  std::uint64_t max_samples) const {
  if (!std::isfinite(alpha)) throw ArgumentError("fourier_mass_check: alpha must be finite");
  const double max_step = 1.0 / (std::abs(alpha) + delta_);
  const double suggested = 0.99 * max_step;
  if (!(step > 0.0) || step >= max_step) {
    throw AccuracyError("quadrature step " + std::to_string(step) + " aliases; need step < " +
                            std::to_string(max_step),
                        suggested);
  }
  const double gap = step + 4.0 / (kPi * kPi * delta_ * delta_ * kWindowTarget * mass());
  const double half = gap + n_ / 2;
  const double j_max = std::ceil(half / step);
  const double count = 2 * j_max + 1;
  if (count > static_cast<double>(max_samples)) {
    throw AccuracyError("quadrature needs " + std::to_string(count) + " samples, budget is " +
                            std::to_string(max_samples),
                        suggested);
  }
  const auto jm = static_cast<std::int64_t>(j_max);
  const double mid = midpoint();
  const kernels::Phase k_phase = kernels::Phase::approx(alpha * step);
  const double base = alpha * mid;

  std::vector<Neumaier> re(kChunks), im(kChunks), absum(kChunks);
  const std::int64_t total = 2 * jm + 1;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < kChunks; ++c) {
    const std::int64_t lo = -jm + total * c / kChunks;
    const std::int64_t hi = -jm + total * (c + 1) / kChunks;
    for (std::int64_t k = lo; k < hi; ++k) {
      const double w = step * eval(mid + static_cast<double>(k) * step);
      // e(-alpha t) with alpha t = alpha mid + k alpha step, reduced mod 1.
      const double theta = -2 * kPi * (base + kernels::frac_mul(k, k_phase));
      re[c].add(w * std::cos(theta));
      im[c].add(w * std::sin(theta));
      absum[c].add(std::abs(w));
    }
  }
  Neumaier sr, si, sa;
  for (std::int64_t c = 0; c < kChunks; ++c) {
    sr.add(re[c].value());
    si.add(im[c].value());
    sa.add(absum[c].value());
  }
  FourierSample out;
  out.value = {sr.value(), si.value()};
  out.half_window = static_cast<double>(jm) * step;
  out.samples = static_cast<std::uint64_t>(total);
  out.error_bound = window_tail(out.half_window, step) + tail_ * step * static_cast<double>(total) +
                    16 * kEps * sa.value();
  return out;
}

LatticeSum SelbergMajorant::lattice_sum(double relative_tolerance) const {
  if (!(relative_tolerance > 0.0)) throw ArgumentError("lattice_sum needs a positive tolerance");
  const double gap = 1.0 + 4.0 / (kPi * kPi * delta_ * delta_ * relative_tolerance * mass());
  const double mid = midpoint();
  const auto lo = static_cast<std::int64_t>(std::floor(mid - n_ / 2 - gap));
  const auto hi = static_cast<std::int64_t>(std::ceil(mid + n_ / 2 + gap));
  const std::int64_t total = hi - lo + 1;
  std::vector<Neumaier> parts(kChunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < kChunks; ++c) {
    const std::int64_t a = lo + total * c / kChunks;
    const std::int64_t b = lo + total * (c + 1) / kChunks;
    for (std::int64_t n = a; n < b; ++n) parts[c].add(eval(static_cast<double>(n)));
  }
  Neumaier s;
  for (const auto& p : parts) s.add(p.value());
  // Integers outside [lo, hi] are at distance > gap from [M, M+N].
  const double tail = 4.0 / (kPi * kPi * delta_ * delta_ * (gap - 1.0));
  return {s.value(), tail + tail_ * static_cast<double>(total) + 16 * kEps * s.value()};
}

}  // namespace dsieve::majorant

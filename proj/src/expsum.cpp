#include "dsieve/expsum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "dsieve/errors.hpp"

namespace dsieve::expsum {

namespace {

std::vector<kernels::Phase> phases_of(const std::vector<circle::CirclePoint>& xs) {
  std::vector<kernels::Phase> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(to_phase(x));
  return out;
}

void require_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ArgumentError("moment exponent p must be >= 1");
}

}  // namespace

// --- SupportedFunction ------------------------------------------------------

SupportedFunction SupportedFunction::indicator(std::vector<std::int64_t> support) {
  std::vector<std::pair<std::int64_t, Complex>> pairs;
  pairs.reserve(support.size());
  for (std::int64_t n : support) pairs.emplace_back(n, 1.0);
  return from_pairs(std::move(pairs));
}

SupportedFunction SupportedFunction::from_pairs(std::vector<std::pair<std::int64_t, Complex>> pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SupportedFunction f;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0 && pairs[i].first == pairs[i - 1].first) {
      throw ArgumentError("duplicate support point " + std::to_string(pairs[i].first));
    }
    if (!std::isfinite(pairs[i].second.real()) || !std::isfinite(pairs[i].second.imag())) {
      throw ArgumentError("non-finite weight at " + std::to_string(pairs[i].first));
    }
    if (pairs[i].second == Complex{}) continue;
    f.support_.push_back(pairs[i].first);
    f.weights_.push_back(pairs[i].second);
  }
  f.refresh();
  return f;
}

SupportedFunction SupportedFunction::parse(std::string_view text) {
  std::vector<std::pair<std::int64_t, Complex>> pairs;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::int64_t n;
    if (!(ls >> n)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ArgumentError("set file line " + std::to_string(lineno) + ": expected an integer");
    }
    double re = 1.0, im = 0.0;
    if (ls >> re) ls >> im;
    ls.clear();
    std::string rest;
    if (ls >> rest) throw ArgumentError("set file line " + std::to_string(lineno) + ": trailing '" + rest + "'");
    pairs.emplace_back(n, Complex{re, im});
  }
  return from_pairs(std::move(pairs));
}

void SupportedFunction::set(std::int64_t n, Complex value) {
  const auto it = std::lower_bound(support_.begin(), support_.end(), n);
  const auto i = static_cast<std::size_t>(it - support_.begin());
  const bool present = it != support_.end() && *it == n;
  if (value == Complex{}) {
    if (present) {
      support_.erase(it);
      weights_.erase(weights_.begin() + static_cast<std::ptrdiff_t>(i));
    }
  } else if (present) {
    weights_[i] = value;
  } else {
    support_.insert(it, n);
    weights_.insert(weights_.begin() + static_cast<std::ptrdiff_t>(i), value);
  }
  refresh();
}

Complex SupportedFunction::at(std::int64_t n) const {
  const auto it = std::lower_bound(support_.begin(), support_.end(), n);
  if (it == support_.end() || *it != n) return 0.0;
  return weights_[static_cast<std::size_t>(it - support_.begin())];
}

bool SupportedFunction::is_indicator() const {
  return std::all_of(weights_.begin(), weights_.end(), [](Complex w) { return w == Complex{1.0, 0.0}; });
}

void SupportedFunction::refresh() {
  norm2_sq_ = 0.0;
  norm1_ = 0.0;
  for (const Complex& w : weights_) {
    norm2_sq_ += std::norm(w);
    norm1_ += std::abs(w);
  }
}

// --- Evaluation -------------------------------------------------------------

kernels::Phase to_phase(const circle::CirclePoint& x) {
  if (x.exact()) {
    const auto& f = x.fraction();
    return kernels::Phase::rational(static_cast<std::uint64_t>(f.num), static_cast<std::uint64_t>(f.den));
  }
  return kernels::Phase::approx(x.value());
}

Complex trig_poly(const SupportedFunction& f, const circle::CirclePoint& x) {
  const kernels::Phase phase = to_phase(x);
  Complex out;
  kernels::serial::exp_sum_matrix(f.weights(), f.support(), std::span(&phase, 1), std::span(&out, 1));
  return out;
}

std::vector<Complex> trig_poly_many(const SupportedFunction& f, const std::vector<circle::CirclePoint>& xs,
                                    bool parallel) {
  const auto phases = phases_of(xs);
  std::vector<Complex> out(xs.size());
  if (parallel) {
    kernels::omp::exp_sum_matrix(f.weights(), f.support(), phases, out);
  } else {
    kernels::serial::exp_sum_matrix(f.weights(), f.support(), phases, out);
  }
  return out;
}

std::vector<Complex> trig_poly_all(const SupportedFunction& f, std::uint64_t U, std::uint64_t memory_budget) {
  if (U == 0) throw ArgumentError("modulus U must be positive");
  const std::uint64_t bytes = 2 * U * sizeof(Complex);
  if (bytes > memory_budget || U > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
    throw ResourceError("DFT of length " + std::to_string(U) + " needs " + std::to_string(bytes) +
                        " bytes, budget is " + std::to_string(memory_budget));
  }
  std::vector<Complex> buckets(U, 0.0), out(U);
  const auto u = static_cast<std::int64_t>(U);
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::int64_t r = f.support()[i] % u;
    if (r < 0) r += u;
    buckets[static_cast<std::size_t>(r)] += f.weights()[i];
  }
  // FFTW_BACKWARD computes sum_r b_r exp(+2 pi i r u / U), unnormalized.
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(U), reinterpret_cast<fftw_complex*>(buckets.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

std::vector<Complex> trig_poly_all_direct(const SupportedFunction& f, std::uint64_t U, bool parallel) {
  if (U == 0) throw ArgumentError("modulus U must be positive");
  std::vector<kernels::Phase> phases;
  phases.reserve(U);
  for (std::uint64_t k = 0; k < U; ++k) phases.push_back(kernels::Phase::rational(k, U));
  std::vector<Complex> out(U);
  if (parallel) {
    kernels::omp::exp_sum_matrix(f.weights(), f.support(), phases, out);
  } else {
    kernels::serial::exp_sum_matrix(f.weights(), f.support(), phases, out);
  }
  return out;
}

std::vector<Complex> dual_poly(const std::vector<Complex>& c, const circle::PointSet& x,
                               const std::vector<std::int64_t>& ns, bool parallel) {
  if (c.size() != x.size()) throw ArgumentError("coefficient count does not match |X|");
  const auto phases = phases_of(x.points());
  std::vector<Complex> out(ns.size());
  if (parallel) {
    kernels::omp::exp_sum_transposed(c, phases, ns, out);
  } else {
    kernels::serial::exp_sum_transposed(c, phases, ns, out);
  }
  return out;
}

// --- Spectrum and moments ---------------------------------------------------

bool SpectrumResult::contains(std::uint64_t u) const {
  return std::binary_search(entries.begin(), entries.end(), std::pair{u, 0.0},
                            [](const auto& a, const auto& b) { return a.first < b.first; });
}

SpectrumResult spectrum(const SupportedFunction& f, std::uint64_t U, double A) {
  if (!(A >= 1.0) || !std::isfinite(A)) throw ArgumentError("spectrum needs A >= 1");
  SpectrumResult r;
  r.modulus = U;
  r.threshold = f.norm1() / A;
  const auto values = trig_poly_all(f, U);
  const double t2 = r.threshold * r.threshold * (1.0 - kSpectrumTieTolerance);
  for (std::uint64_t u = 0; u < U; ++u) {
    const double m2 = std::norm(values[u]);
    if (m2 >= t2) r.entries.emplace_back(u, std::sqrt(m2));
  }
  return r;
}

double moment(const SupportedFunction& f, const circle::PointSet& x, double p) {
  require_p(p);
  double s = 0.0;
  for (const Complex& v : trig_poly_many(f, x.points())) s += std::pow(std::abs(v), p);
  return s;
}

double dual_moment(const std::vector<Complex>& c, const circle::PointSet& x, const std::vector<std::int64_t>& ns,
                   double p) {
  require_p(p);
  double s = 0.0;
  for (const Complex& v : dual_poly(c, x, ns)) s += std::pow(std::abs(v), p);
  return s;
}

GroupMoment group_moment(const SupportedFunction& c, std::uint64_t U, double p) {
  require_p(p);
  const auto values = trig_poly_all(c, U);
  double sp = 0.0, s2 = 0.0;
  for (const Complex& v : values) {
    const double a = std::abs(v);
    sp += std::pow(a, p);
    s2 += a * a;
  }
  const double n = static_cast<double>(U);
  GroupMoment g;
  g.lp_norm = std::pow(sp / n, 1.0 / p);
  g.l2_norm = std::sqrt(s2 / n);
  g.ratio = g.l2_norm > 0 ? g.lp_norm / g.l2_norm : 0.0;
  return g;
}

}  // namespace dsieve::expsum

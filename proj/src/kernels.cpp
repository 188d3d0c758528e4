#include "dsieve/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dsieve/errors.hpp"
#include "dsieve/parallel.hpp"

namespace dsieve::kernels {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t bound) {
  std::vector<std::uint64_t> primes;
  if (bound < 2) return primes;
  std::vector<char> composite(bound + 1, 0);
  for (std::uint64_t p = 2; p <= bound; ++p) {
    if (composite[p]) continue;
    primes.push_back(p);
    for (std::uint64_t m = p * p; m <= bound; m += p) composite[m] = 1;
  }
  return primes;
}

// Neumaier's variant of Kahan summation, applied componentwise.
struct CompensatedSum {
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;

  static void add(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  void add(std::complex<double> z) {
    add(re, cre, z.real());
    add(im, cim, z.imag());
  }

  std::complex<double> value() const { return {re + cre, im + cim}; }
};

void sieve_spf_segment(std::uint64_t lo, std::uint64_t hi, std::span<const std::uint64_t> base,
                       std::vector<std::uint32_t>& spf) {
  for (std::uint64_t p : base) {
    if (p * p >= hi) break;
    std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
    for (std::uint64_t m = start; m < hi; m += p) {
      if (spf[m] == 0) spf[m] = static_cast<std::uint32_t>(p);
    }
  }
  for (std::uint64_t m = std::max<std::uint64_t>(lo, 2); m < hi; ++m) {
    if (spf[m] == 0) spf[m] = static_cast<std::uint32_t>(m);
  }
}

std::vector<std::uint32_t> spf_segmented_impl(std::uint64_t limit, std::size_t segment_size, bool parallel) {
  std::vector<std::uint32_t> spf(limit + 1, 0);
  const auto base = primes_up_to(isqrt(limit));
  const std::uint64_t seg = segment_size;
  const auto segments = static_cast<std::int64_t>((limit + 1 + seg - 1) / seg);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t s = 0; s < segments; ++s) {
      const std::uint64_t lo = static_cast<std::uint64_t>(s) * seg;
      sieve_spf_segment(lo, std::min(lo + seg, limit + 1), base, spf);
    }
  } else {
    for (std::int64_t s = 0; s < segments; ++s) {
      const std::uint64_t lo = static_cast<std::uint64_t>(s) * seg;
      sieve_spf_segment(lo, std::min(lo + seg, limit + 1), base, spf);
    }
  }
  return spf;
}

// G/z < best_g/best_z, compared exactly.
bool ratio_less(u128 g, std::uint64_t z, u128 best_g, std::uint64_t best_z) {
  return g * best_z < best_g * z;
}

bool large_z_ok(u128 g, std::uint64_t z) {
  // G >= 0.326 z  <=>  1000 G >= 326 z 2^64
  return g * 1000 >= (u128{326} * z) << kFixedFractionBits;
}

struct SegmentScan {
  u128 min_g = 0;
  std::uint64_t argmin = 0;
  std::uint64_t terms = 0;
  std::uint64_t large_checked = 0;
  bool large_ok = true;
};

// Scans [lo, hi) given G#(lo - 1) = offset. Rows go to `rows` when non-null.
SegmentScan scan_segment(std::uint64_t lo, std::uint64_t hi, u128 offset, std::span<const u128> h,
                         std::vector<GSharpRow>* rows, u128 prior_min, std::uint64_t prior_argmin,
                         std::uint64_t min_from) {
  SegmentScan out;
  out.min_g = prior_min;
  out.argmin = prior_argmin;
  u128 g = offset;
  for (std::uint64_t z = lo; z < hi; ++z) {
    const u128 hz = h[z - lo];
    g += hz;
    out.terms += (hz != 0);
    if (z >= min_from && (out.argmin == 0 || ratio_less(g, z, out.min_g, out.argmin))) {
      out.min_g = g;
      out.argmin = z;
    }
    if (z >= kLargeZThreshold) {
      ++out.large_checked;
      if (!large_z_ok(g, z)) out.large_ok = false;
    }
    if (rows != nullptr) rows->push_back({z, g, out.min_g, out.argmin});
  }
  return out;
}

}  // namespace

double frac_mul(std::int64_t k, const Phase& phase) {
  if (phase.exact) {
    const std::uint64_t den = phase.den;
    std::int64_t km = k % static_cast<std::int64_t>(den);
    if (km < 0) km += static_cast<std::int64_t>(den);
    const auto r = static_cast<std::uint64_t>(static_cast<u128>(km) * phase.num % den);
    return static_cast<double>(r) / static_cast<double>(den);
  }
  const double kd = static_cast<double>(k);
  const double p = kd * phase.real;
  const double err = std::fma(kd, phase.real, -p);
  double f = (p - std::floor(p)) + err;
  f -= std::floor(f);
  return f;
}

std::complex<double> unit(double theta) {
  theta -= std::round(theta);
  const double angle = 2.0 * std::numbers::pi * theta;
  return {std::cos(angle), std::sin(angle)};
}

void h_fixed_segment(std::uint64_t lo, std::uint64_t hi, std::span<const std::uint64_t> base_primes,
                     std::vector<u128>& out) {
  const std::size_t len = hi - lo;
  out.assign(len, 0);
  std::vector<std::uint64_t> rem(len), num(len, 1), den(len, 1);
  std::vector<char> dead(len, 0);
  for (std::size_t i = 0; i < len; ++i) {
    const std::uint64_t n = lo + i;
    rem[i] = n;
    if (n == 0 || n % 2 == 0) dead[i] = 1;
  }
  for (std::uint64_t p : base_primes) {
    if (p == 2) continue;
    const std::uint64_t p2 = p * p;
    for (std::uint64_t m = (lo + p2 - 1) / p2 * p2; m < hi; m += p2) dead[m - lo] = 1;
    for (std::uint64_t m = (lo + p - 1) / p * p; m < hi; m += p) {
      const std::size_t i = m - lo;
      if (dead[i]) continue;
      num[i] *= p - 1;
      den[i] *= p + 1;
      rem[i] /= p;
    }
  }
  for (std::size_t i = 0; i < len; ++i) {
    if (dead[i]) continue;
    if (rem[i] > 1) {
      // Remaining cofactor is a single prime above the base range.
      num[i] *= rem[i] - 1;
      den[i] *= rem[i] + 1;
    }
    out[i] = ((static_cast<u128>(num[i]) << kFixedFractionBits) + den[i] / 2) / den[i];
  }
}

namespace serial {

std::vector<std::uint32_t> spf_linear(std::uint64_t limit) {
  std::vector<std::uint32_t> spf(limit + 1, 0);
  std::vector<std::uint32_t> primes;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf[i] == 0) {
      spf[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : primes) {
      if (p > spf[i] || i * p > limit) break;
      spf[i * p] = p;
    }
  }
  return spf;
}

std::vector<std::uint32_t> spf_segmented(std::uint64_t limit, std::size_t segment_size) {
  return spf_segmented_impl(limit, segment_size, false);
}

GSharpSummary gsharp_scan(std::uint64_t limit, std::size_t segment_size, const GSharpSink& sink,
                          std::uint64_t min_from) {
  GSharpSummary summary;
  summary.limit = limit;
  const auto base = primes_up_to(isqrt(limit));
  std::vector<u128> h;
  std::vector<GSharpRow> rows;
  u128 g = 0;
  for (std::uint64_t lo = 1; lo <= limit; lo += segment_size) {
    const std::uint64_t hi = std::min<std::uint64_t>(lo + segment_size, limit + 1);
    h_fixed_segment(lo, hi, base, h);
    rows.clear();
    const SegmentScan s = scan_segment(lo, hi, g, h, sink ? &rows : nullptr, summary.min_g_fixed, summary.argmin,
                                        min_from);
    for (std::uint64_t z = lo; z < hi; ++z) g += h[z - lo];
    summary.min_g_fixed = s.min_g;
    summary.argmin = s.argmin;
    summary.terms += s.terms;
    summary.large_z_checked += s.large_checked;
    summary.large_z_bound_holds = summary.large_z_bound_holds && s.large_ok;
    if (sink) {
      for (const auto& row : rows) sink(row);
    }
  }
  summary.g_fixed = g;
  return summary;
}

std::vector<std::uint64_t> signed_sums(std::span<const std::uint64_t> residues, std::uint64_t modulus) {
  // Built digit by digit: after processing point i the list holds all
  // patterns of the first i+1 points in lexicographic order.
  std::vector<std::uint64_t> sums{0};
  for (std::uint64_t r : residues) {
    r %= modulus;
    const std::uint64_t neg = (modulus - r) % modulus;
    std::vector<std::uint64_t> next;
    next.reserve(sums.size() * 3);
    for (std::uint64_t s : sums) {
      next.push_back((s + neg) % modulus);
      next.push_back(s);
      next.push_back((s + r) % modulus);
    }
    sums = std::move(next);
  }
  return sums;
}

void exp_sum_matrix(std::span<const std::complex<double>> weights, std::span<const std::int64_t> ints,
                    std::span<const Phase> phases, std::span<std::complex<double>> out) {
  for (std::size_t k = 0; k < phases.size(); ++k) {
    CompensatedSum acc;
    for (std::size_t j = 0; j < ints.size(); ++j) {
      acc.add(weights[j] * unit(frac_mul(ints[j], phases[k])));
    }
    out[k] = acc.value();
  }
}

void exp_sum_transposed(std::span<const std::complex<double>> weights, std::span<const Phase> phases,
                        std::span<const std::int64_t> ints, std::span<std::complex<double>> out) {
  for (std::size_t k = 0; k < ints.size(); ++k) {
    CompensatedSum acc;
    for (std::size_t j = 0; j < phases.size(); ++j) {
      acc.add(weights[j] * unit(frac_mul(ints[k], phases[j])));
    }
    out[k] = acc.value();
  }
}

}  // namespace serial

namespace omp {

std::vector<std::uint32_t> spf_segmented(std::uint64_t limit, std::size_t segment_size) {
  return spf_segmented_impl(limit, segment_size, true);
}

GSharpSummary gsharp_scan(std::uint64_t limit, std::size_t segment_size, const GSharpSink& sink,
                          std::uint64_t min_from) {
  GSharpSummary summary;
  summary.limit = limit;
  const auto base = primes_up_to(isqrt(limit));
  const std::uint64_t seg = segment_size;
  const auto segments = static_cast<std::int64_t>((limit + seg - 1) / seg);
  auto bounds = [&](std::int64_t s) {
    const std::uint64_t lo = 1 + static_cast<std::uint64_t>(s) * seg;
    return std::pair{lo, std::min<std::uint64_t>(lo + seg, limit + 1)};
  };

  // Pass 1: per-segment totals.
  std::vector<u128> totals(segments, 0);
#pragma omp parallel
  {
    std::vector<u128> h;
#pragma omp for schedule(dynamic)
    for (std::int64_t s = 0; s < segments; ++s) {
      const auto [lo, hi] = bounds(s);
      h_fixed_segment(lo, hi, base, h);
      u128 t = 0;
      for (u128 v : h) t += v;
      totals[s] = t;
    }
  }
  std::vector<u128> offsets(segments, 0);
  u128 g = 0;
  for (std::int64_t s = 0; s < segments; ++s) {
    offsets[s] = g;
    g += totals[s];
  }
  summary.g_fixed = g;

  // Pass 2: per-segment minima (and rows), merged in segment order. Each
  // segment starts its minimum search from scratch; merging keeps the first
  // z attaining the global minimum, as the serial scan does.
  std::vector<SegmentScan> scans(segments);
  const std::int64_t batch = sink ? std::max<std::int64_t>(1, 2 * parallel::max_threads()) : segments;
  std::vector<std::vector<GSharpRow>> rows(sink ? static_cast<std::size_t>(batch) : 0);
  for (std::int64_t b0 = 0; b0 < segments; b0 += batch) {
    const std::int64_t b1 = std::min(segments, b0 + batch);
#pragma omp parallel
    {
      std::vector<u128> h;
#pragma omp for schedule(dynamic)
      for (std::int64_t s = b0; s < b1; ++s) {
        const auto [lo, hi] = bounds(s);
        h_fixed_segment(lo, hi, base, h);
        std::vector<GSharpRow>* out = nullptr;
        if (sink) {
          out = &rows[s - b0];
          out->clear();
        }
        scans[s] = scan_segment(lo, hi, offsets[s], h, out, 0, 0, min_from);
      }
    }
    for (std::int64_t s = b0; s < b1; ++s) {
      const SegmentScan& sc = scans[s];
      const bool improves =
          sc.argmin != 0 &&
          (summary.argmin == 0 || ratio_less(sc.min_g, sc.argmin, summary.min_g_fixed, summary.argmin));
      if (sink) {
        // Rows carry a segment-local running minimum; rebase onto the global one.
        for (GSharpRow row : rows[s - b0]) {
          if (summary.argmin != 0 &&
              (row.argmin == 0 ||
               !ratio_less(row.running_min_num, row.argmin, summary.min_g_fixed, summary.argmin))) {
            row.running_min_num = summary.min_g_fixed;
            row.argmin = summary.argmin;
          }
          sink(row);
        }
      }
      if (improves) {
        summary.min_g_fixed = sc.min_g;
        summary.argmin = sc.argmin;
      }
      summary.terms += sc.terms;
      summary.large_z_checked += sc.large_checked;
      summary.large_z_bound_holds = summary.large_z_bound_holds && sc.large_ok;
    }
  }
  return summary;
}

std::vector<std::uint64_t> signed_sums(std::span<const std::uint64_t> residues, std::uint64_t modulus) {
  // Pattern index = prefix index * 3^(n - split) + suffix index, so each
  // output is one modular addition of two serially built tables.
  const std::size_t split = std::min<std::size_t>(residues.size(), 6);
  const auto prefix = serial::signed_sums(residues.first(split), modulus);
  const auto suffix = serial::signed_sums(residues.subspan(split), modulus);
  const auto width = static_cast<std::int64_t>(suffix.size());
  std::vector<std::uint64_t> sums(prefix.size() * suffix.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t a = 0; a < static_cast<std::int64_t>(prefix.size()); ++a) {
    const u128 base = prefix[a];
    for (std::int64_t b = 0; b < width; ++b) {
      sums[a * width + b] = static_cast<std::uint64_t>((base + suffix[b]) % modulus);
    }
  }
  return sums;
}

void exp_sum_matrix(std::span<const std::complex<double>> weights, std::span<const std::int64_t> ints,
                    std::span<const Phase> phases, std::span<std::complex<double>> out) {
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(phases.size()); ++k) {
    CompensatedSum acc;
    for (std::size_t j = 0; j < ints.size(); ++j) {
      acc.add(weights[j] * unit(frac_mul(ints[j], phases[k])));
    }
    out[k] = acc.value();
  }
}

void exp_sum_transposed(std::span<const std::complex<double>> weights, std::span<const Phase> phases,
                        std::span<const std::int64_t> ints, std::span<std::complex<double>> out) {
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(ints.size()); ++k) {
    CompensatedSum acc;
    for (std::size_t j = 0; j < phases.size(); ++j) {
      acc.add(weights[j] * unit(frac_mul(ints[k], phases[j])));
    }
    out[k] = acc.value();
  }
}

}  // namespace omp

namespace {

std::vector<std::vector<std::complex<double>>> root_tables(std::span<const FourierBlock> blocks) {
  std::vector<std::vector<std::complex<double>>> roots(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::uint64_t d = blocks[i].d;
    roots[i].resize(d);
    for (std::uint64_t j = 0; j < d; ++j) {
      roots[i][j] = unit(static_cast<double>(j) / static_cast<double>(d));
    }
  }
  return roots;
}

std::complex<double> fourier_at(std::span<const FourierBlock> blocks,
                                const std::vector<std::vector<std::complex<double>>>& roots, std::uint64_t n) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::uint64_t d = blocks[i].d;
    const std::uint64_t r = n % d;
    std::uint64_t idx = r % d;  // r * b mod d for b = 1
    for (std::uint64_t b = 1; b <= d; ++b) {
      const auto& w = blocks[i].weights[b - 1];
      if (w != std::complex<double>{}) acc.add(w * roots[i][idx]);
      idx += r;
      if (idx >= d) idx -= d;
    }
  }
  return acc.value();
}

}  // namespace

namespace serial {
void fourier_series_eval(std::span<const FourierBlock> blocks, std::uint64_t n_begin,
                         std::span<std::complex<double>> out) {
  const auto roots = root_tables(blocks);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fourier_at(blocks, roots, n_begin + k);
}
}  // namespace serial

namespace omp {
void fourier_series_eval(std::span<const FourierBlock> blocks, std::uint64_t n_begin,
                         std::span<std::complex<double>> out) {
  const auto roots = root_tables(blocks);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(out.size()); ++k) {
    out[k] = fourier_at(blocks, roots, n_begin + static_cast<std::uint64_t>(k));
  }
}
}  // namespace omp

}  // namespace dsieve::kernels

#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp` with identical
// results: reductions are merged in index order so the parallel output is
// bit-for-bit equal to the serial one regardless of thread count.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dsieve::kernels {

using u128 = unsigned __int128;

// Fixed-point scale for G#(z): values are stored as integers times 2^-64.
inline constexpr int kFixedFractionBits = 64;

/// A point of R/Z used as a phase multiplier: either exactly num/den or a
/// double in [0, 1).
struct Phase {
  bool exact = true;
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double real = 0.0;

  static Phase rational(std::uint64_t num, std::uint64_t den) { return {true, num % den, den, 0.0}; }
  static Phase approx(double x) { return {false, 0, 1, x}; }
};

/// Fractional part of k * phase in [0, 1). Exact reduction for rational
/// phases; error-free product (fma) for real phases.
double frac_mul(std::int64_t k, const Phase& phase);

std::complex<double> unit(double theta);

/// One row of the G#(z) scan.
struct GSharpRow {
  std::uint64_t z;
  u128 g_fixed;           // G#(z) * 2^64, rounded per term
  u128 running_min_num;   // G#(argmin) fixed
  std::uint64_t argmin;   // first z >= min_from attaining the running minimum of G#(z)/z; 0 before min_from
};

struct GSharpSummary {
  std::uint64_t limit = 0;
  u128 g_fixed = 0;           // G#(limit)
  u128 min_g_fixed = 0;       // G#(argmin)
  std::uint64_t argmin = 0;
  std::uint64_t terms = 0;    // odd squarefree q <= limit, each rounded once
  bool large_z_bound_holds = true;   // G#(z) >= 0.326 z for all z >= 1e8 scanned
  std::uint64_t large_z_checked = 0;
};

using GSharpSink = std::function<void(const GSharpRow&)>;

/// h(n) * 2^64 rounded to nearest, for n in [lo, hi), computed by sieving
/// the segment with primes up to sqrt(hi). h(1) = 2^64.
void h_fixed_segment(std::uint64_t lo, std::uint64_t hi, std::span<const std::uint64_t> base_primes,
                     std::vector<u128>& out);

// Threshold G#(z) >= 0.326 z is asserted for z at or above this point.
inline constexpr std::uint64_t kLargeZThreshold = 100'000'000;

namespace serial {

std::vector<std::uint32_t> spf_linear(std::uint64_t limit);
std::vector<std::uint32_t> spf_segmented(std::uint64_t limit, std::size_t segment_size);

GSharpSummary gsharp_scan(std::uint64_t limit, std::size_t segment_size, const GSharpSink& sink,
                          std::uint64_t min_from = 1);

/// All 3^n signed sums sum eps_i r_i mod modulus, eps in {-1,0,1}, in
/// lexicographic order of (eps_0, ..., eps_{n-1}) with -1 < 0 < 1.
std::vector<std::uint64_t> signed_sums(std::span<const std::uint64_t> residues, std::uint64_t modulus);

/// out[k] = sum_j weights[j] * e(ints[j] * phases[k]), Neumaier-compensated.
void exp_sum_matrix(std::span<const std::complex<double>> weights, std::span<const std::int64_t> ints,
                    std::span<const Phase> phases, std::span<std::complex<double>> out);

/// Transposed form: out[k] = sum_j weights[j] * e(ints[k] * phases[j]).
void exp_sum_transposed(std::span<const std::complex<double>> weights, std::span<const Phase> phases,
                        std::span<const std::int64_t> ints, std::span<std::complex<double>> out);

}  // namespace serial

namespace omp {

std::vector<std::uint32_t> spf_segmented(std::uint64_t limit, std::size_t segment_size);

GSharpSummary gsharp_scan(std::uint64_t limit, std::size_t segment_size, const GSharpSink& sink,
                          std::uint64_t min_from = 1);

std::vector<std::uint64_t> signed_sums(std::span<const std::uint64_t> residues, std::uint64_t modulus);

void exp_sum_matrix(std::span<const std::complex<double>> weights, std::span<const std::int64_t> ints,
                    std::span<const Phase> phases, std::span<std::complex<double>> out);

void exp_sum_transposed(std::span<const std::complex<double>> weights, std::span<const Phase> phases,
                        std::span<const std::int64_t> ints, std::span<std::complex<double>> out);

}  // namespace omp

/// A periodic block sum_{b=1}^{d} w[b-1] e(n b / d) of a Fourier expansion.
struct FourierBlock {
  std::uint64_t d = 1;
  std::vector<std::complex<double>> weights;  // length d
};

namespace serial {
void fourier_series_eval(std::span<const FourierBlock> blocks, std::uint64_t n_begin,
                         std::span<std::complex<double>> out);
}
namespace omp {
void fourier_series_eval(std::span<const FourierBlock> blocks, std::uint64_t n_begin,
                         std::span<std::complex<double>> out);
}

}  // namespace dsieve::kernels

#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace dsieve::chang {

struct ChangOptions {
  // Skip the window checks (U_i in [N^(1/4), N^(3/4)], U >= N, S inside
  // [N^(1/4), N]); the result is then marked non-conforming.
  bool override_window = false;
};

struct Component {
  std::uint64_t modulus = 1;                  // U_i
  std::vector<std::uint64_t> projection;      // spectrum mod U_i, deduplicated, ascending
  std::vector<std::uint64_t> dissociate;      // D_i, ascending
  std::uint64_t span_size = 0;                // |span(D_i)|
  bool is_dissociate = false;
  bool is_maximal = false;                    // every rejected residue is in span(D_i)
  bool covers_projection = false;             // projection inside span(D_i)
  bool bound_holds = false;                   // |D_i| <= bound_value
  double log_bound = 0.0;                     // log U_i / log 2
  bool log_bound_holds = false;
};

struct ChangDecomposition {
  double N = 0.0;
  std::uint64_t U1 = 0, U2 = 0, U = 0;
  double A = 1.0;
  std::uint64_t support_size = 0;
  double K = 0.0;                             // N / (|S| log N)
  double threshold = 0.0;                     // |S| / A
  std::vector<std::uint64_t> spectrum;        // ascending residues mod U
  std::array<Component, 2> components;
  bool containment_verified = false;          // every u in the spectrum lies in the CRT lift of span(D1) x span(D2)
  double bound_value = 0.0;                   // 30 A^2 log(8K) e^{U/N}
  double contextual_bound = 0.0;              // A^2 K log(2A), no constant; reported only
  bool conforming = true;
  bool bound_asserted = false;                // conforming run with a meaningful bound
};

/// Spectrum of the indicator of S modulo U = U1 U2, greedy dissociate
/// extraction in each CRT component, and the containment check.
ChangDecomposition chang_decompose(const std::vector<std::uint64_t>& S, double N, std::uint64_t U1,
                                   std::uint64_t U2, double A, const ChangOptions& options = {});

/// The unique u mod U1 U2 with u = u1 (mod U1) and u = u2 (mod U2).
std::uint64_t crt_lift(std::uint64_t u1, std::uint64_t U1, std::uint64_t u2, std::uint64_t U2);

}  // namespace dsieve::chang

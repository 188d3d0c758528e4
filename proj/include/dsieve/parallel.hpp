#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dsieve::parallel {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// n <= 0 restores the runtime default.
inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) {
    omp_set_num_threads(n);
  } else {
    omp_set_num_threads(omp_get_num_procs());
  }
#else
  (void)n;
#endif
}

}  // namespace dsieve::parallel

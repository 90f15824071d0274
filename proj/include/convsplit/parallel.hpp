#pragma once

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace convsplit::par {

// Runtime switch between the OpenMP kernels and the serial reference path.
// Every kernel writes disjoint output slots and keeps per-line arithmetic
// sequential, so both paths produce bit-identical results; tests assert this.

bool enabled();
void set_enabled(bool on);

int max_threads();
void set_max_threads(int n);  // n <= 0 restores the OpenMP default

template <class Body>
inline void for_range(int begin, int end, Body&& body) {
#ifdef _OPENMP
  if (enabled() && end - begin > 1) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int i = begin; i < end; ++i) {
      body(i);
    }
    return;
  }
#endif
  for (int i = begin; i < end; ++i) {
    body(i);
  }
}

}  // namespace convsplit::par

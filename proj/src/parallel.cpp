#include "convsplit/parallel.hpp"

#include <atomic>

namespace convsplit::par {

namespace {
std::atomic<bool> g_enabled{true};
std::atomic<int> g_max_threads{0};
}  // namespace

bool enabled() { return g_enabled.load(std::memory_order_relaxed); }

void set_enabled(bool on) { g_enabled.store(on, std::memory_order_relaxed); }

int max_threads() {
  int n = g_max_threads.load(std::memory_order_relaxed);
  if (n > 0) return n;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_max_threads(int n) { g_max_threads.store(n, std::memory_order_relaxed); }

}  // namespace convsplit::par

#include "otkit/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace otkit {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("OTKIT_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (...) {
    }
  }
  return omp_get_max_threads();
}

int& threads_ref() {
  static int threads = initial_threads();
  return threads;
}

}  // namespace

int thread_count() { return threads_ref(); }

void set_thread_count(int threads) {
  if (threads > 0) {
    threads_ref() = threads;
    omp_set_num_threads(threads);
  }
}

double compensated_sum(std::span<const double> values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

}  // namespace otkit

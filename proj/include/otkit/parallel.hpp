#pragma once

#include <cstddef>
#include <span>

namespace otkit {

// Number of OpenMP threads used by the data-parallel kernels. Initialized
// from OTKIT_THREADS when set, otherwise the OpenMP default.
int thread_count();
void set_thread_count(int threads);

// Neumaier-compensated accumulator. Summation order is the caller's order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Compensated sum in index order.
double compensated_sum(std::span<const double> values);

}  // namespace otkit

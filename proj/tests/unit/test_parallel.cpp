#include <doctest.h>

#include <vector>

#include "otkit/fastsum.hpp"
#include "otkit/measures.hpp"
#include "otkit/parallel.hpp"
#include "otkit/rng.hpp"

using namespace otkit;

TEST_SUITE("parallel") {

TEST_CASE("compensated sum recovers cancelled terms") {
  const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(v) == 2.0);
  CompensatedSum s;
  for (int i = 0; i < 10; ++i) s.add(0.1);
  CHECK(s.value() == 1.0);
}

TEST_CASE("thread count is configurable") {
  const int saved = thread_count();
  set_thread_count(3);
  CHECK(thread_count() == 3);
  set_thread_count(saved);
}

TEST_CASE("dense kernels are bitwise identical across thread counts") {
  const DiscreteMeasure a = sample_uniform(700, 2, WeightMode::unbalanced, 31);
  const DiscreteMeasure b = sample_uniform(500, 2, WeightMode::unbalanced, 32);
  const RadialProfile profile = RadialProfile::gibbs(20.0, 2.0);
  const std::vector<double> serial =
      reference_kernel_sum(profile, a.coords(), b.coords(), 2, a.weights());
  const Matrix cost_serial = [&] {
    set_thread_count(1);
    return pairwise_cost(a, b, {});
  }();
  const int saved = thread_count();
  for (int t : {1, 2, 4}) {
    set_thread_count(t);
    CHECK(dense_kernel_sum(profile, a.coords(), b.coords(), 2, a.weights()) == serial);
    const Matrix c = pairwise_cost(a, b, {});
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) same = same && c(i, j) == cost_serial(i, j);
    }
    CHECK(same);
  }
  set_thread_count(saved);
}

}

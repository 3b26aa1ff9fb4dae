#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "otkit/divergences.hpp"
#include "otkit/error.hpp"
#include "otkit/fastsum.hpp"

using namespace otkit;

namespace {

long double oracle_mmd2(const RadialKernel& k, const DiscreteMeasure& a, const DiscreteMeasure& b) {
  auto quad = [&](const DiscreteMeasure& x, const DiscreteMeasure& y) {
    long double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < y.size(); ++j) {
        long double d2 = 0;
        for (int t = 0; t < x.dim(); ++t) {
          const long double d = static_cast<long double>(x.point(i)[t]) - y.point(j)[t];
          d2 += d * d;
        }
        s += static_cast<long double>(x.weight(i)) * y.weight(j) * k(static_cast<double>(std::sqrt(d2)));
      }
    }
    return s;
  };
  return quad(a, a) - 2 * quad(a, b) + quad(b, b);
}

}  // namespace

TEST_SUITE("divergences") {

TEST_CASE("generalized KL closed form") {
  const std::vector<double> nu{0.2, 0.0, 1.5};
  const std::vector<double> mu{0.4, 0.3, 1.0};
  const double expect = 0.2 * std::log(0.5) + 1.5 * std::log(1.5) + 1.7 - 1.7;
  CHECK(kl_divergence(nu, mu) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(kl_divergence(mu, mu) == 0.0);
  CHECK(kl_divergence(std::vector<double>{1.0}, std::vector<double>{0.0}) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("Bregman generators") {
  const DiscreteMeasure mu({0.0, 1.0, 2.0}, {0.5, 1.0, 2.0}, 1);
  const DiscreteMeasure nu = mu.with_weights({1.0, 0.25, 2.5});
  CHECK(bregman_divergence(ConvexGenerator::kullback_leibler(), nu, mu) ==
        doctest::Approx(kl_divergence(nu, mu)).epsilon(1e-14));
  double chi = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    chi += (nu.weight(i) - mu.weight(i)) * (nu.weight(i) - mu.weight(i)) / mu.weight(i);
  }
  CHECK(bregman_divergence(ConvexGenerator::chi_squared(), nu, mu) ==
        doctest::Approx(chi).epsilon(1e-14));
  const DiscreteMeasure other({0.0, 1.0, 3.0}, {0.5, 1.0, 2.0}, 1);
  CHECK_THROWS_AS(bregman_divergence(ConvexGenerator::kullback_leibler(), other, mu), InputError);
}

TEST_CASE("KL of a plan against the product measure") {
  const DiscreteMeasure mu({0.0, 1.0}, {0.5, 1.0}, 1);
  const DiscreteMeasure nu({0.0, 2.0}, {2.0, 0.25}, 1);
  Matrix plan(2, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) plan(i, j) = mu.weight(i) * nu.weight(j);
  }
  CHECK(std::abs(kl_plan_divergence(plan, mu, nu)) < 1e-15);
  plan(0, 1) *= 2.0;
  const double p = plan(0, 1);
  const double q = p / 2.0;
  CHECK(kl_plan_divergence(plan, mu, nu) == doctest::Approx(p * std::log(2.0) - p + q));
}

TEST_CASE("dense MMD matches a long-double oracle") {
  const DiscreteMeasure a = sample_uniform(60, 2, WeightMode::unbalanced, 1);
  const DiscreteMeasure b = sample_uniform(45, 2, WeightMode::unbalanced, 2);
  for (const RadialKernel& k : {RadialKernel::gaussian(0.5), RadialKernel::laplace(0.5),
                                RadialKernel::inverse_multiquadric(1.0)}) {
    const MmdValue v = mmd_squared_dense(k, a, b);
    CHECK(v.raw_squared == doctest::Approx(static_cast<double>(oracle_mmd2(k, a, b))).epsilon(1e-12));
    CHECK(v.value() == doctest::Approx(std::sqrt(v.squared)));
    CHECK(v.squared <= mmd_elementary_bound(k, a, b) * mmd_elementary_bound(k, a, b));
  }
  const DiscreteMeasure pa = normalize(a);
  const DiscreteMeasure pb = normalize(b);
  CHECK(mmd_squared_dense(RadialKernel::energy(), pa, pb).raw_squared ==
        doctest::Approx(static_cast<double>(oracle_mmd2(RadialKernel::energy(), pa, pb))).epsilon(1e-12));
}

TEST_CASE("identical measures have zero MMD") {
  const DiscreteMeasure a = sample_uniform(40, 3, WeightMode::unbalanced, 5);
  const MmdValue v = mmd_squared_dense(RadialKernel::gaussian(1.0), a, a);
  CHECK(v.squared == 0.0);
  CHECK(std::abs(v.raw_squared) < 1e-13);
}

TEST_CASE("energy kernel requires equal masses") {
  const DiscreteMeasure a = sample_uniform(10, 1, WeightMode::unbalanced, 3);
  const DiscreteMeasure b = sample_uniform(10, 1, WeightMode::probability, 4);
  CHECK_THROWS_AS(mmd_squared_dense(RadialKernel::energy(), a, b), InputError);
  CHECK_NOTHROW(mmd_squared_dense(RadialKernel::energy(), a, b, true));
  CHECK_THROWS_AS(mmd_elementary_bound(RadialKernel::energy(), a, b), InputError);
}

TEST_CASE("fast summation MMD agrees with the dense sum") {
  for (int d = 1; d <= 3; ++d) {
    const DiscreteMeasure a = sample_uniform(300, d, WeightMode::probability, 10 + d);
    const DiscreteMeasure b = sample_uniform(250, d, WeightMode::probability, 20 + d);
    for (const RadialKernel& k : {RadialKernel::gaussian(0.5), RadialKernel::laplace(0.5),
                                  RadialKernel::inverse_multiquadric(1.0), RadialKernel::energy()}) {
      CAPTURE(d);
      CAPTURE(k.name());
      const std::vector<double> fast = joint_kernel_sums_nfft(k, a, b, {});
      const std::vector<double> dense = joint_kernel_sums_dense(k, a, b);
      REQUIRE(fast.size() == dense.size());
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < fast.size(); ++i) {
        num += (fast[i] - dense[i]) * (fast[i] - dense[i]);
        den += dense[i] * dense[i];
      }
      // the default d = 3 grid (N = 32) is coarser
      CHECK(std::sqrt(num / den) < (d == 3 ? 1e-3 : 1e-4));
      const double exact = mmd_squared_dense(k, a, b).raw_squared;
      CHECK(mmd_squared_nfft(k, a, b, {}).raw_squared == doctest::Approx(exact).epsilon(1e-3));
    }
  }
}

}

#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "otkit/error.hpp"
#include "otkit/fastsum.hpp"
#include "otkit/rng.hpp"

using namespace otkit;

namespace {

std::vector<double> ball_points(std::size_t n, int dim, double radius, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> x(n * static_cast<std::size_t>(dim));
  for (double& v : x) v = (2.0 * rng.uniform() - 1.0) * radius / std::sqrt(static_cast<double>(dim));
  return x;
}

std::vector<double> direct(const RadialProfile& f, const std::vector<double>& src,
                           const std::vector<double>& tgt, int dim, const std::vector<double>& alpha) {
  std::vector<double> out(tgt.size() / dim, 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      double d2 = 0;
      for (int t = 0; t < dim; ++t) {
        const double d = tgt[i * dim + t] - src[j * dim + t];
        d2 += d * d;
      }
      out[i] += f.value(std::sqrt(d2)) * alpha[j];
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("fastsum") {

TEST_CASE("option defaults") {
  const FastsumOptions o1 = FastsumOptions{}.resolve(1, true);
  CHECK(o1.bandwidth == 256);
  CHECK(o1.eps_boundary == doctest::Approx(8.0 / 256));
  CHECK(o1.eps_interior == 0.0);
  const FastsumOptions o3 = FastsumOptions{}.resolve(3, false);
  CHECK(o3.bandwidth == 32);
  CHECK(o3.eps_boundary == 0.125);
  CHECK(o3.eps_interior == 0.125);
  FastsumOptions bad;
  bad.degree = 0;
  CHECK_THROWS_AS(bad.resolve(2, true), InputError);
  const RadialProfile f = RadialProfile::from_kernel(RadialKernel::gaussian(0.2));
  CHECK_THROWS_AS(RegularizedKernel(f, 1, 64, 4, 0.0, 0.3), InputError);
  CHECK_THROWS_AS(RegularizedKernel(f, 1, 64, 4, 0.45, 0.1), InputError);
  CHECK_THROWS_AS(RegularizedKernel(f, 1, 64, 0, 0.0, 0.1), InputError);
}

TEST_CASE("regularized kernel equals the kernel on the middle band and is continuous") {
  for (const RadialProfile& f : {RadialProfile::from_kernel(RadialKernel::gaussian(0.2)),
                                 RadialProfile::from_kernel(RadialKernel::laplace(0.2)),
                                 RadialProfile::from_kernel(RadialKernel::energy())}) {
    const double eps_i = f.smooth_at_zero() ? 0.0 : 1.0 / 32;
    const RegularizedKernel k(f, 2, 64, 6, eps_i, 1.0 / 16);
    for (double r = eps_i; r <= 0.5 - 1.0 / 16; r += 0.01) CHECK(k.regularized(r) == f.value(r));
    const double rb = 0.5 - 1.0 / 16;
    CHECK(k.regularized(rb + 1e-9) == doctest::Approx(f.value(rb)).epsilon(1e-7));
    CHECK(k.regularized(0.7) == doctest::Approx(k.regularized(0.5)).epsilon(1e-14));
    if (eps_i > 0) {
      CHECK(k.regularized(eps_i - 1e-9) == doctest::Approx(f.value(eps_i)).epsilon(1e-7));
      CHECK(k.near_correction(0.01) == doctest::Approx(f.value(0.01) - k.regularized(0.01)));
    }
    CHECK(k.near_correction(0.3) == 0.0);
  }
}

TEST_CASE("Fourier series approximates the regularized kernel") {
  const RadialProfile f = RadialProfile::from_kernel(RadialKernel::gaussian(0.1));
  const RegularizedKernel k(f, 1, 256, 8, 0.0, 8.0 / 256);
  double err = 0;
  for (double y = -0.5; y < 0.5; y += 0.013) {
    const double yy[1] = {y};
    err = std::max(err, std::abs(k.fourier_series(yy) - k.regularized(std::abs(y))));
  }
  CHECK(err < 1e-8);
  for (const Complex& b : k.coefficients()) CHECK(std::abs(b.imag()) < 1e-12);
}

TEST_CASE("fast summation matches the direct sum") {
  for (int d = 1; d <= 3; ++d) {
    for (const RadialKernel& kern : {RadialKernel::gaussian(0.1), RadialKernel::laplace(0.1),
                                     RadialKernel::inverse_multiquadric(0.2)}) {
      CAPTURE(d);
      CAPTURE(kern.name());
      const RadialProfile f = RadialProfile::from_kernel(kern);
      const FastsumOptions o = FastsumOptions{}.resolve(d, f.smooth_at_zero());
      auto k = std::make_shared<const RegularizedKernel>(f, d, o.bandwidth, o.degree,
                                                         o.eps_interior, o.eps_boundary);
      const double radius = 0.25 - o.eps_boundary / 2;
      const std::vector<double> src = ball_points(400, d, radius, 40 + d);
      const std::vector<double> tgt = ball_points(300, d, radius, 50 + d);
      CounterRng rng(60);
      std::vector<double> alpha(400);
      double l1 = 0;
      for (double& a : alpha) l1 += (a = rng.uniform() - 0.5) < 0 ? -a : a;
      const FastsumPlan plan(k, src, tgt);
      const std::vector<double> got = plan.apply(alpha);
      const std::vector<double> want = direct(f, src, tgt, d, alpha);
      double err = 0;
      for (std::size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got[i] - want[i]));
      CHECK(err / (l1 * f.value(0.0)) < 1e-5);
    }
  }
}

TEST_CASE("dense kernel sum matches the serial reference") {
  const std::vector<double> src = ball_points(300, 3, 1.0, 1);
  const std::vector<double> tgt = ball_points(200, 3, 1.0, 2);
  const std::vector<double> alpha(300, 0.5);
  const RadialProfile f = RadialProfile::from_kernel(RadialKernel::laplace(0.3));
  const std::vector<double> ref = reference_kernel_sum(f, src, tgt, 3, alpha);
  CHECK(dense_kernel_sum(f, src, tgt, 3, alpha) == ref);
  const std::vector<double> want = direct(f, src, tgt, 3, alpha);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(ref[i] == doctest::Approx(want[i]).epsilon(1e-13));
}

}

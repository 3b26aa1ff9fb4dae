#include <doctest.h>

#include <cmath>

#include "otkit/error.hpp"
#include "otkit/kernels.hpp"

using namespace otkit;

TEST_SUITE("kernels") {

TEST_CASE("kernel values") {
  CHECK(RadialKernel::gaussian(0.5)(0.5) == doctest::Approx(std::exp(-1.0)));
  CHECK(RadialKernel::laplace(2.0)(1.0) == doctest::Approx(std::exp(-0.5)));
  CHECK(RadialKernel::inverse_multiquadric(3.0)(4.0) == doctest::Approx(0.2));
  CHECK(RadialKernel::energy()(1.5) == -1.5);
  CHECK_THROWS_AS(RadialKernel::gaussian(1.0)(-1.0), InputError);
  CHECK_THROWS_AS(RadialKernel::gaussian(0.0), InputError);
  CHECK_THROWS_AS(RadialKernel::inverse_multiquadric(-1.0), InputError);
}

TEST_CASE("parse by name") {
  CHECK(parse_kernel("gauss", 1, 1).kind() == KernelKind::gaussian);
  CHECK(parse_kernel("laplace", 1, 1).kind() == KernelKind::laplace);
  CHECK(parse_kernel("imq", 1, 2).parameter() == 2.0);
  CHECK(parse_kernel("energy", 1, 1).name() == "energy");
  CHECK_THROWS_AS(parse_kernel("cauchy", 1, 1), InputError);
}

TEST_CASE("Holder constants bound the kernel pseudo-metric") {
  for (double p : {0.25, 0.5, 1.0, 2.0, 5.0}) {
    for (const RadialKernel& k : {RadialKernel::gaussian(p), RadialKernel::laplace(p),
                                  RadialKernel::inverse_multiquadric(p), RadialKernel::energy()}) {
      const HolderConstants hc = holder_constants(k);
      for (int i = 1; i <= 400; ++i) {
        const double t = 0.01 * i;
        const double lhs = k(0.0) - 2.0 * k(t) + k(0.0);
        CHECK(lhs <= hc.c * hc.c * std::pow(t, 2.0 * hc.alpha) * (1 + 1e-12));
      }
    }
  }
  CHECK(holder_constants(RadialKernel::gaussian(1.0)).c == 2.0);
  CHECK(holder_constants(RadialKernel::laplace(1.0)).c == 2.0);
  CHECK(holder_constants(RadialKernel::energy()).c == std::sqrt(2.0));
}

TEST_CASE("pseudo-metric") {
  CHECK(pseudo_metric(RadialKernel::energy(), 2.0) == 2.0);
  CHECK(pseudo_metric(RadialKernel::gaussian(1.0), 0.0) == 0.0);
}

TEST_CASE("Gibbs entries") {
  for (double t : {0.0, 0.1, 0.7, 2.0}) {
    CHECK(gibbs_entry({Norm::euclidean, 2.0}, 20.0, t) ==
          doctest::Approx(std::exp(-20.0 * t * t)).epsilon(1e-14));
    CHECK(gibbs_entry({Norm::euclidean, 1.0}, 20.0, t) ==
          doctest::Approx(std::exp(-20.0 * t)).epsilon(1e-14));
    CHECK(gibbs_entry({Norm::euclidean, 1.5}, 3.0, t) ==
          doctest::Approx(std::exp(-3.0 * std::pow(t, 1.5))).epsilon(1e-14));
  }
}

TEST_CASE("profiles reproduce the kernels and rescale") {
  for (const RadialKernel& k : {RadialKernel::gaussian(0.7), RadialKernel::laplace(0.7),
                                RadialKernel::inverse_multiquadric(0.7)}) {
    const RadialProfile p = RadialProfile::from_kernel(k);
    for (double t : {0.0, 0.3, 1.1}) {
      CHECK(p.value(t) == doctest::Approx(k(t)).epsilon(1e-14));
      CHECK(p.rescaled(0.25).value(0.25 * t) == doctest::Approx(k(t)).epsilon(1e-14));
    }
  }
  CHECK(RadialProfile::from_kernel(RadialKernel::energy()).value(0.4) == 0.4);
  const RadialProfile g = RadialProfile::gibbs(20.0, 2.0);
  CHECK(g.value(0.3) == doctest::Approx(std::exp(-20.0 * 0.09)));
  const RadialProfile c = RadialProfile::cost_gibbs(20.0, 1.0);
  CHECK(c.value(0.3) == doctest::Approx(0.3 * std::exp(-6.0)));
  CHECK_THROWS_AS(RadialProfile::gibbs(20.0, 1.5), InputError);
  CHECK_THROWS_AS(fastsum_cost_kernel(1.0, {Norm::l1, 1.0}), InputError);
}

TEST_CASE("Taylor coefficients match analytic derivatives") {
  // d^q/dt^q exp(-t^2) at t0 via Hermite polynomials: H_q recursion
  const double t0 = 0.6;
  const Taylor tg = RadialProfile::from_kernel(RadialKernel::gaussian(1.0)).taylor(t0, 6);
  double hm = 1.0, h = 2.0 * t0;  // physicists' H_0, H_1
  CHECK(tg.derivative(0) == doctest::Approx(std::exp(-t0 * t0)));
  CHECK(tg.derivative(1) == doctest::Approx(-h * std::exp(-t0 * t0)));
  for (int q = 2; q <= 6; ++q) {
    const double hn = 2.0 * t0 * h - 2.0 * (q - 1) * hm;
    hm = h;
    h = hn;
    CHECK(tg.derivative(q) == doctest::Approx((q % 2 ? -1.0 : 1.0) * h * std::exp(-t0 * t0)));
  }
  const Taylor tl = RadialProfile::from_kernel(RadialKernel::laplace(0.5)).taylor(t0, 5);
  for (int q = 0; q <= 5; ++q) {
    CHECK(tl.derivative(q) == doctest::Approx(std::pow(-2.0, q) * std::exp(-2.0 * t0)));
  }
  // imq: compare with central differences of the value
  const RadialProfile im = RadialProfile::from_kernel(RadialKernel::inverse_multiquadric(1.0));
  const Taylor ti = im.taylor(t0, 2);
  const double e = 1e-4;
  CHECK(ti.derivative(1) == doctest::Approx((im.value(t0 + e) - im.value(t0 - e)) / (2 * e)).epsilon(1e-7));
  CHECK(ti.derivative(2) ==
        doctest::Approx((im.value(t0 + e) - 2 * im.value(t0) + im.value(t0 - e)) / (e * e)).epsilon(1e-5));
}

}

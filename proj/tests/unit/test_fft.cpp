#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "otkit/error.hpp"
#include "otkit/fft.hpp"
#include "otkit/rng.hpp"

using namespace otkit;

namespace {

std::vector<Complex> random_vector(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<Complex> v(n);
  for (Complex& z : v) z = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  return v;
}

// Naive DFT over a row-major array.
std::vector<Complex> naive(const std::vector<Complex>& x, const std::vector<std::size_t>& shape,
                           int sign) {
  const std::size_t total = x.size();
  std::vector<Complex> out(total);
  std::vector<std::size_t> k(shape.size()), l(shape.size());
  for (std::size_t a = 0; a < total; ++a) {
    std::size_t r = a;
    for (std::size_t t = shape.size(); t-- > 0;) {
      k[t] = r % shape[t];
      r /= shape[t];
    }
    Complex s = 0;
    for (std::size_t b = 0; b < total; ++b) {
      std::size_t q = b;
      double phase = 0;
      for (std::size_t t = shape.size(); t-- > 0;) {
        l[t] = q % shape[t];
        q /= shape[t];
        phase += static_cast<double>((k[t] * l[t]) % shape[t]) / static_cast<double>(shape[t]);
      }
      s += x[b] * std::polar(1.0, sign * 2.0 * std::numbers::pi * phase);
    }
    out[a] = s;
  }
  return out;
}

double max_error(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace

TEST_SUITE("fft") {

TEST_CASE("power of two helpers") {
  CHECK(is_power_of_two(1));
  CHECK(is_power_of_two(64));
  CHECK_FALSE(is_power_of_two(0));
  CHECK_FALSE(is_power_of_two(12));
  CHECK(next_power_of_two(13) == 16);
  CHECK(next_power_of_two(16) == 16);
  CHECK_THROWS(Fft(12));
}

TEST_CASE("1d transform matches the naive DFT") {
  for (std::size_t n : {1u, 2u, 8u, 64u, 256u}) {
    const std::vector<Complex> x = random_vector(n, n);
    for (int sign : {-1, 1}) {
      std::vector<Complex> y = x;
      Fft(n).transform(y, sign);
      CHECK(max_error(y, naive(x, {n}, sign)) < 1e-12 * n);
    }
  }
}

TEST_CASE("round trip scales by n") {
  const std::vector<Complex> x = random_vector(128, 9);
  std::vector<Complex> y = x;
  Fft f(128);
  f.transform(y, -1);
  f.transform(y, 1);
  for (Complex& z : y) z /= 128.0;
  CHECK(max_error(x, y) < 1e-14);
}

TEST_CASE("nd transform matches the naive DFT") {
  for (const std::vector<std::size_t>& shape :
       {std::vector<std::size_t>{4, 8}, std::vector<std::size_t>{8, 2, 4},
        std::vector<std::size_t>{16}}) {
    FftNd f(shape);
    const std::vector<Complex> x = random_vector(f.size(), f.size() + shape.size());
    for (int sign : {-1, 1}) {
      std::vector<Complex> y = x;
      f.transform(y, sign);
      CHECK(max_error(y, naive(x, shape, sign)) < 1e-12);
    }
  }
}

TEST_CASE("pruned transform agrees on the requested support") {
  const std::vector<std::size_t> shape{8, 16, 4};
  FftNd f(shape);
  FftNd::Support in(3), out(3);
  CounterRng rng(77);
  for (std::size_t t = 0; t < 3; ++t) {
    in[t].resize(shape[t]);
    out[t].resize(shape[t]);
    for (std::size_t i = 0; i < shape[t]; ++i) {
      in[t][i] = rng.uniform() < 0.5;
      out[t][i] = rng.uniform() < 0.5;
    }
    in[t][0] = out[t][0] = 1;
  }
  std::vector<Complex> x = random_vector(f.size(), 3);
  for (std::size_t a = 0; a < f.size(); ++a) {
    const std::size_t i = a / 64, j = (a / 4) % 16, k = a % 4;
    if (!in[0][i] || !in[1][j] || !in[2][k]) x[a] = 0;
  }
  for (int sign : {-1, 1}) {
    std::vector<Complex> full = x;
    f.transform(full, sign);
    std::vector<Complex> a = x, b = x, c = x;
    f.transform(a, sign, &in, nullptr);
    f.transform(b, sign, nullptr, &out);
    f.transform(c, sign, &in, &out);
    CHECK(max_error(a, full) < 1e-12);
    double eb = 0, ec = 0;
    for (std::size_t q = 0; q < f.size(); ++q) {
      const std::size_t i = q / 64, j = (q / 4) % 16, k = q % 4;
      if (out[0][i] && out[1][j] && out[2][k]) {
        eb = std::max(eb, std::abs(b[q] - full[q]));
        ec = std::max(ec, std::abs(c[q] - full[q]));
      }
    }
    CHECK(eb < 1e-12);
    CHECK(ec < 1e-12);
  }
}

}

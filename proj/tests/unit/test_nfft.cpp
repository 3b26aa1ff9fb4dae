#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "otkit/nfft.hpp"
#include "otkit/parallel.hpp"
#include "otkit/rng.hpp"

using namespace otkit;

namespace {

struct Case {
  FrequencyGrid grid;
  std::vector<double> nodes;
  std::vector<Complex> coeffs;
  std::vector<Complex> values;
};

Case make_case(int dim, int n, std::size_t nodes, std::uint64_t seed) {
  Case c{FrequencyGrid::cube(dim, n), {}, {}, {}};
  CounterRng rng(seed);
  c.nodes.resize(nodes * static_cast<std::size_t>(dim));
  for (double& x : c.nodes) x = rng.uniform() - 0.5;
  c.coeffs.resize(c.grid.size());
  for (Complex& z : c.coeffs) z = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  c.values.resize(nodes);
  for (Complex& z : c.values) z = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  return c;
}

// Independent double loop for f_j = sum_k c_k exp(2 pi i k.x_j).
std::vector<Complex> oracle_forward(const Case& c) {
  const int d = c.grid.dim();
  const std::size_t m = c.values.size();
  std::vector<Complex> f(m);
  std::vector<int> k(d);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t a = 0; a < c.grid.size(); ++a) {
      c.grid.index(a, k);
      double phase = 0;
      for (int t = 0; t < d; ++t) phase += k[t] * c.nodes[j * d + t];
      f[j] += c.coeffs[a] * std::polar(1.0, 2.0 * std::numbers::pi * phase);
    }
  }
  return f;
}

std::vector<Complex> oracle_adjoint(const Case& c) {
  const int d = c.grid.dim();
  std::vector<Complex> out(c.grid.size());
  std::vector<int> k(d);
  for (std::size_t a = 0; a < c.grid.size(); ++a) {
    c.grid.index(a, k);
    for (std::size_t j = 0; j < c.values.size(); ++j) {
      double phase = 0;
      for (int t = 0; t < d; ++t) phase += k[t] * c.nodes[j * d + t];
      out[a] += c.values[j] * std::polar(1.0, -2.0 * std::numbers::pi * phase);
    }
  }
  return out;
}

double rel_error(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE("nfft") {

TEST_CASE("frequency grid indexing") {
  const FrequencyGrid g({4, 8});
  CHECK(g.size() == 32);
  std::vector<int> k(2);
  g.index(0, k);
  CHECK(k == std::vector<int>{-2, -4});
  g.index(9, k);
  CHECK(k == std::vector<int>{-1, -3});
  CHECK(wrap_torus(0.75) == doctest::Approx(-0.25));
  CHECK(wrap_torus(-0.5) == -0.5);
  CHECK(wrap_torus(0.5) == -0.5);
}

TEST_CASE("small cases against a double loop") {
  for (int d = 1; d <= 3; ++d) {
    CAPTURE(d);
    const Case c = make_case(d, 8, 5, 100 + d);
    const NfftPlan plan(c.grid, c.nodes);
    CHECK(rel_error(ndft_forward(c.grid, c.coeffs, c.nodes), oracle_forward(c)) < 1e-13);
    CHECK(rel_error(ndft_adjoint(c.grid, c.values, c.nodes), oracle_adjoint(c)) < 1e-13);
    CHECK(rel_error(plan.forward(c.coeffs), oracle_forward(c)) < 1e-11);
    CHECK(rel_error(plan.adjoint(c.values), oracle_adjoint(c)) < 1e-11);
  }
}

TEST_CASE("larger transforms against the direct sums") {
  for (int d = 1; d <= 3; ++d) {
    CAPTURE(d);
    const int n = d == 1 ? 64 : (d == 2 ? 16 : 8);
    const Case c = make_case(d, n, 300, 200 + d);
    const NfftPlan plan(c.grid, c.nodes);
    CHECK(rel_error(plan.forward(c.coeffs), ndft_forward(c.grid, c.coeffs, c.nodes)) < 1e-11);
    CHECK(rel_error(plan.adjoint(c.values), ndft_adjoint(c.grid, c.values, c.nodes)) < 1e-11);
  }
}

TEST_CASE("forward and adjoint are adjoint") {
  const Case c = make_case(2, 16, 120, 7);
  const NfftPlan plan(c.grid, c.nodes);
  const std::vector<Complex> f = plan.forward(c.coeffs);
  const std::vector<Complex> g = plan.adjoint(c.values);
  Complex lhs = 0, rhs = 0;
  for (std::size_t j = 0; j < f.size(); ++j) lhs += f[j] * std::conj(c.values[j]);
  for (std::size_t a = 0; a < g.size(); ++a) rhs += c.coeffs[a] * std::conj(g[a]);
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));
}

TEST_CASE("parallel transforms agree with the serial ones") {
  const Case c = make_case(3, 16, 2000, 9);
  const NfftPlan plan(c.grid, c.nodes);
  const int saved = thread_count();
  set_thread_count(1);
  CHECK(plan.forward(c.coeffs) == plan.forward_serial(c.coeffs));
  CHECK(plan.adjoint(c.values) == plan.adjoint_serial(c.values));
  set_thread_count(4);
  CHECK(rel_error(plan.forward(c.coeffs), plan.forward_serial(c.coeffs)) < 1e-14);
  CHECK(rel_error(plan.adjoint(c.values), plan.adjoint_serial(c.values)) < 1e-14);
  set_thread_count(saved);
}

}

#include <doctest.h>

#include <cmath>

#include "otkit/error.hpp"
#include "otkit/measures.hpp"

using namespace otkit;

TEST_SUITE("measures") {

TEST_CASE("distance and cost on hand-computed points") {
  const std::vector<double> a = {0.0, 0.0}, b = {3.0, 4.0};
  CHECK(distance(a, b, Norm::euclidean) == 5.0);
  CHECK(distance(a, b, Norm::l1) == 7.0);
  CHECK(cost_value(a, b, {Norm::euclidean, 1.0}) == 5.0);
  CHECK(cost_value(a, b, {Norm::euclidean, 2.0}) == doctest::Approx(25.0).epsilon(1e-15));
  CHECK(cost_value(a, b, {Norm::l1, 1.5}) == doctest::Approx(std::pow(7.0, 1.5)));
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(DiscreteMeasure({}, {}, 1), InputError);
  CHECK_THROWS_AS(DiscreteMeasure({0.0}, {0.0}, 1), InputError);
  CHECK_THROWS_AS(DiscreteMeasure({0.0}, {-1.0}, 1), InputError);
  CHECK_THROWS_AS(DiscreteMeasure({NAN}, {1.0}, 1), InputError);
  CHECK_THROWS_AS(DiscreteMeasure({0.0, 1.0, 2.0}, {1.0, 1.0}, 2), InputError);
  CHECK_THROWS_AS(validate(CostSpec{Norm::euclidean, 0.5}), InputError);
}

TEST_CASE("pairwise cost agrees with entrywise evaluation") {
  const DiscreteMeasure a = sample_uniform(17, 3, WeightMode::unbalanced, 1);
  const DiscreteMeasure b = sample_uniform(11, 3, WeightMode::unbalanced, 2);
  for (const CostSpec cost : {CostSpec{Norm::euclidean, 1.0}, CostSpec{Norm::euclidean, 2.0},
                              CostSpec{Norm::l1, 1.5}}) {
    const Matrix c = pairwise_cost(a, b, cost);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        double s = 0.0;
        for (int t = 0; t < 3; ++t) {
          const double diff = a.point(i)[t] - b.point(j)[t];
          s += cost.norm == Norm::l1 ? std::abs(diff) : diff * diff;
        }
        const double d = cost.norm == Norm::l1 ? s : std::sqrt(s);
        CHECK(c(i, j) == doctest::Approx(std::pow(d, cost.exponent)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("seeded sampling is reproducible") {
  const DiscreteMeasure a = sample_uniform(100, 2, WeightMode::unbalanced, 42);
  const DiscreteMeasure b = sample_uniform(100, 2, WeightMode::unbalanced, 42);
  const DiscreteMeasure c = sample_uniform(100, 2, WeightMode::unbalanced, 43);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (double x : a.coords()) CHECK((x >= 0.0 && x < 1.0));
  for (double w : a.weights()) CHECK((w > 0.0 && w <= 1.0));
  const DiscreteMeasure p = sample_uniform(1000, 1, WeightMode::probability, 7);
  CHECK(std::abs(total_mass(p) - 1.0) <= 1e-12);
}

TEST_CASE("normalize yields unit mass") {
  const DiscreteMeasure a = sample_uniform(50, 1, WeightMode::unbalanced, 3);
  CHECK(total_mass(normalize(a)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grayscale grid positions and zero dropping") {
  GrayImage img{2, 3, {0.0, 0.5, 1.0, 0.25, 0.0, 0.75}};
  const DiscreteMeasure m = from_grayscale_grid(img);
  REQUIRE(m.size() == 4);
  CHECK(m.point(0)[0] == doctest::Approx(1.5 / 3));
  CHECK(m.point(0)[1] == doctest::Approx(0.25));
  CHECK(m.weight(0) == 0.5);
  CHECK(m.point(3)[0] == doctest::Approx(2.5 / 3));
  CHECK(m.point(3)[1] == doctest::Approx(0.75));
  CHECK_THROWS_AS(from_grayscale_grid(GrayImage{1, 1, {0.0}}), InputError);
  CHECK(from_grayscale_grid(GrayImage{1, 2, {0.0, 1.0}}, true).size() == 1);
}

TEST_CASE("torus embedding is isotropic and fits the half box") {
  const DiscreteMeasure a = sample_uniform(40, 2, WeightMode::unbalanced, 5);
  DiscreteMeasure b = sample_uniform(30, 2, WeightMode::unbalanced, 6);
  std::vector<double> shifted(b.coords().begin(), b.coords().end());
  for (double& x : shifted) x = 3.0 * x - 7.0;
  b = DiscreteMeasure(shifted, std::vector<double>(b.weights().begin(), b.weights().end()), 2);
  const double margin = 0.1;
  const TorusEmbedding e = rescale_pair_to_torus(a, b, margin);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d0 = distance(a.point(i), b.point(j), Norm::euclidean);
      const double d1 = distance(e.first.point(i), e.second.point(j), Norm::euclidean);
      CHECK(d1 == doctest::Approx(d0 * e.scale).epsilon(1e-13));
      worst = std::max(worst, d1);
    }
  }
  CHECK(worst <= 0.5 - margin + 1e-15);
  CHECK(e.period() == doctest::Approx(1.0 / e.scale));
}

TEST_CASE("torus embedding of a single point") {
  const DiscreteMeasure a({0.3}, {1.0}, 1);
  const TorusEmbedding e = rescale_pair_to_torus(a, a);
  CHECK(e.degenerate);
  CHECK(e.first.point(0)[0] == 0.0);
}

}

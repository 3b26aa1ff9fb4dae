#include "otkit/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "otkit/error.hpp"
#include "otkit/parallel.hpp"
#include "otkit/rng.hpp"

namespace otkit {

DiscreteMeasure::DiscreteMeasure(std::vector<double> coords, std::vector<double> weights, int dim)
    : coords_(std::move(coords)), weights_(std::move(weights)), dim_(dim) {
  if (dim_ < 1) throw InputError("measure dimension must be >= 1");
  if (weights_.empty()) throw InputError("empty measure");
  if (coords_.size() != weights_.size() * static_cast<std::size_t>(dim_)) {
    throw InputError("measure has " + std::to_string(coords_.size()) + " coordinates for " +
                     std::to_string(weights_.size()) + " atoms of dimension " +
                     std::to_string(dim_));
  }
  for (double w : weights_) {
    if (!std::isfinite(w) || !(w > 0.0)) throw InputError("measure weights must be finite and > 0");
  }
  for (double x : coords_) {
    if (!std::isfinite(x)) throw InputError("measure coordinates must be finite");
  }
  double mass = 0.0;
  for (double w : weights_) mass += w;
  if (!std::isfinite(mass)) throw InputError("total mass is not finite");
}

DiscreteMeasure DiscreteMeasure::with_weights(std::vector<double> weights) const {
  return DiscreteMeasure(coords_, std::move(weights), dim_);
}

void validate(const CostSpec& cost) {
  if (!(cost.exponent >= 1.0) || !std::isfinite(cost.exponent)) {
    throw InputError("cost exponent r must be >= 1");
  }
}

double total_mass(const DiscreteMeasure& m) {
  double s = 0.0;
  for (double w : m.weights()) s += w;
  return s;
}

DiscreteMeasure normalize(const DiscreteMeasure& m) {
  const double mass = total_mass(m);
  std::vector<double> w(m.weights().begin(), m.weights().end());
  for (double& x : w) x /= mass;
  return m.with_weights(std::move(w));
}

double distance(std::span<const double> x, std::span<const double> y, Norm norm) {
  double s = 0.0;
  if (norm == Norm::l1) {
    for (std::size_t t = 0; t < x.size(); ++t) s += std::abs(x[t] - y[t]);
    return s;
  }
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double d = x[t] - y[t];
    s += d * d;
  }
  return std::sqrt(s);
}

double cost_value(std::span<const double> x, std::span<const double> y, const CostSpec& cost) {
  if (cost.norm == Norm::euclidean && cost.exponent == 2.0) {
    double s = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      const double d = x[t] - y[t];
      s += d * d;
    }
    return s;
  }
  const double d = distance(x, y, cost.norm);
  if (cost.exponent == 1.0) return d;
  if (cost.exponent == 2.0) return d * d;
  return std::pow(d, cost.exponent);
}

Matrix pairwise_cost(const DiscreteMeasure& a, const DiscreteMeasure& b, const CostSpec& cost) {
  if (a.dim() != b.dim()) {
    throw InputError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                     std::to_string(b.dim()));
  }
  validate(cost);
  Matrix c(a.size(), b.size());
  const auto rows = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for num_threads(thread_count()) schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto x = a.point(static_cast<std::size_t>(i));
    auto out = c.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < b.size(); ++j) out[j] = cost_value(x, b.point(j), cost);
  }
  return c;
}

DiscreteMeasure sample_uniform(std::size_t n, int dim, WeightMode mode, std::uint64_t seed) {
  if (n < 1) throw InputError("sample size must be >= 1");
  if (dim < 1 || dim > 3) throw InputError("sample dimension must be 1, 2 or 3");
  CounterRng rng(seed);
  std::vector<double> coords(n * static_cast<std::size_t>(dim));
  for (double& x : coords) x = rng.uniform();
  std::vector<double> weights(n);
  if (mode == WeightMode::probability) {
    std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(n));
  } else {
    for (double& w : weights) w = rng.uniform_positive();
  }
  return DiscreteMeasure(std::move(coords), std::move(weights), dim);
}

DiscreteMeasure from_grayscale_grid(const GrayImage& image, bool drop_zeros) {
  if (image.rows < 1 || image.cols < 1 || image.pixels.size() != image.rows * image.cols) {
    throw InputError("image must have at least one row and column");
  }
  std::vector<double> coords;
  std::vector<double> weights;
  const double r = static_cast<double>(image.rows);
  const double c = static_cast<double>(image.cols);
  for (std::size_t row = 0; row < image.rows; ++row) {
    for (std::size_t col = 0; col < image.cols; ++col) {
      const double v = image.pixels[row * image.cols + col];
      if (!(v >= 0.0 && v <= 1.0)) throw InputError("pixel intensity outside [0, 1]");
      if (v == 0.0) {
        if (drop_zeros) continue;
        throw InputError("zero-intensity pixel; enable dropping of zero pixels");
      }
      coords.push_back((static_cast<double>(col) + 0.5) / c);
      coords.push_back((static_cast<double>(row) + 0.5) / r);
      weights.push_back(v);
    }
  }
  if (weights.empty()) throw InputError("empty measure");
  return DiscreteMeasure(std::move(coords), std::move(weights), 2);
}

TorusEmbedding rescale_pair_to_torus(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                     double margin) {
  if (a.dim() != b.dim()) throw InputError("dimension mismatch in torus embedding");
  if (a.dim() > 3) throw InputError("torus embedding supports d <= 3");
  if (!(margin > 0.0 && margin < 1.0)) throw InputError("torus margin must lie in (0, 1)");
  const int d = a.dim();
  std::vector<double> lo(d, HUGE_VAL);
  std::vector<double> hi(d, -HUGE_VAL);
  for (const DiscreteMeasure* m : {&a, &b}) {
    for (std::size_t i = 0; i < m->size(); ++i) {
      const auto p = m->point(i);
      for (int t = 0; t < d; ++t) {
        lo[t] = std::min(lo[t], p[t]);
        hi[t] = std::max(hi[t], p[t]);
      }
    }
  }
  std::vector<double> center(d);
  for (int t = 0; t < d; ++t) center[t] = 0.5 * (lo[t] + hi[t]);
  double radius = 0.0;
  for (const DiscreteMeasure* m : {&a, &b}) {
    for (std::size_t i = 0; i < m->size(); ++i) {
      radius = std::max(radius, distance(m->point(i), center, Norm::euclidean));
    }
  }
  const double target = 0.25 - 0.5 * margin;
  TorusEmbedding e{a, b, 1.0, center, false};
  if (radius == 0.0) {
    e.degenerate = true;
  } else {
    e.scale = target / radius;
  }
  auto map = [&](const DiscreteMeasure& m) {
    std::vector<double> coords(m.coords().begin(), m.coords().end());
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (int t = 0; t < d; ++t) {
        double& x = coords[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(t)];
        x = (x - center[t]) * e.scale;
      }
    }
    return DiscreteMeasure(std::move(coords),
                           std::vector<double>(m.weights().begin(), m.weights().end()), d);
  };
  e.first = map(a);
  e.second = map(b);
  return e;
}

}  // namespace otkit

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "otkit/matrix.hpp"

namespace otkit {

// Weighted point cloud sum_i w_i delta_{x_i} on R^d. Immutable once built.
class DiscreteMeasure {
 public:
  // Throws InputError unless n >= 1, every weight is finite and > 0 and every
  // coordinate is finite. `coords` is row-major, n * dim entries.
  DiscreteMeasure(std::vector<double> coords, std::vector<double> weights, int dim);

  std::size_t size() const { return weights_.size(); }
  int dim() const { return dim_; }

  std::span<const double> coords() const { return coords_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

  // Same atoms, new weights (validated like the constructor).
  DiscreteMeasure with_weights(std::vector<double> weights) const;

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  std::vector<double> coords_;
  std::vector<double> weights_;
  int dim_ = 1;
};

enum class Norm { euclidean, l1 };

// Ground cost d(x, y)^r.
struct CostSpec {
  Norm norm = Norm::euclidean;
  double exponent = 2.0;
};

void validate(const CostSpec& cost);

double total_mass(const DiscreteMeasure& m);
DiscreteMeasure normalize(const DiscreteMeasure& m);

double distance(std::span<const double> x, std::span<const double> y, Norm norm);
double cost_value(std::span<const double> x, std::span<const double> y, const CostSpec& cost);

// Entry (i, j) = d(a_i, b_j)^r.
Matrix pairwise_cost(const DiscreteMeasure& a, const DiscreteMeasure& b, const CostSpec& cost);

enum class WeightMode { unbalanced, probability };

// Coordinates i.i.d. uniform on [0,1)^d from CounterRng(seed); weights
// uniform on (0,1] (unbalanced) or 1/n (probability).
DiscreteMeasure sample_uniform(std::size_t n, int dim, WeightMode mode, std::uint64_t seed);

// Row-major grayscale image with intensities in [0, 1].
struct GrayImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;
};

// Pixel (row, col), 1-based, sits at ((col - 1/2)/C, (row - 1/2)/R) with weight
// equal to its intensity.
DiscreteMeasure from_grayscale_grid(const GrayImage& image, bool drop_zeros = true);

// Shared isotropic affine map x -> (x - offset) * scale placing both measures
// in the ball of radius 1/4 - margin/2 around the origin, so that every
// difference of mapped points has norm <= 1/2 - margin. The torus period in
// original units is h = 1/scale.
struct TorusEmbedding {
  DiscreteMeasure first;
  DiscreteMeasure second;
  double scale = 1.0;
  std::vector<double> offset;
  bool degenerate = false;

  double period() const { return 1.0 / scale; }
};

inline constexpr double kDefaultTorusMargin = 0.0625;

TorusEmbedding rescale_pair_to_torus(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                     double margin = kDefaultTorusMargin);

}  // namespace otkit

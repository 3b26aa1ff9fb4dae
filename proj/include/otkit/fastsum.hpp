#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "otkit/kernels.hpp"
#include "otkit/nfft.hpp"

namespace otkit {

// Fast-summation parameters. Zero/negative fields mean "use the default for
// this dimension and kernel" (see resolve()).
struct FastsumOptions {
  int bandwidth = 0;        // N per axis
  int degree = 8;           // p, Hermite matching order
  double eps_boundary = -1;  // eps_B
  double eps_interior = -1;  // eps_I
  NfftOptions nfft{};

  // Defaults: N = 256 (d=1), 128 (d=2), 32 (d=3); eps_B = min(p/N, 1/8);
  // eps_I = eps_B for kernels with a kink at 0, otherwise 0.
  FastsumOptions resolve(int dim, bool smooth_at_zero) const;
};

// Periodized radial kernel K~ and its Fourier coefficients on I_N.
//   r in [eps_I, 1/2 - eps_B]: K(r)
//   r in (1/2 - eps_B, 1/2]:   degree-2p polynomial matching K and p derivatives
//                              at 1/2 - eps_B, with vanishing derivatives 1..p at 1/2
//   r > 1/2:                   constant continuation
//   r in [0, eps_I):           even polynomial of degree 2p matching K and p
//                              derivatives at eps_I
class RegularizedKernel {
 public:
  RegularizedKernel(RadialProfile base, int dim, int bandwidth, int degree, double eps_interior,
                    double eps_boundary);

  const RadialProfile& base() const { return base_; }
  int dim() const { return dim_; }
  int bandwidth() const { return bandwidth_; }
  int degree() const { return degree_; }
  double eps_interior() const { return eps_interior_; }
  double eps_boundary() const { return eps_boundary_; }
  const FrequencyGrid& grid() const { return grid_; }

  // K~ at torus radius r >= 0.
  double regularized(double r) const;
  // K(r) - K~(r); nonzero only for r < eps_I.
  double near_correction(double r) const;

  // b_k over I_N (complex; imaginary parts are rounding residue).
  const std::vector<Complex>& coefficients() const { return coeffs_; }
  // K_RK(y) = sum_k b_k exp(2 pi i k.y), evaluated directly.
  double fourier_series(std::span<const double> y) const;

  std::span<const double> boundary_polynomial() const { return boundary_poly_; }
  std::span<const double> interior_polynomial() const { return interior_poly_; }

 private:
  double boundary_value(double r) const;
  double interior_value(double r) const;

  RadialProfile base_;
  int dim_;
  int bandwidth_;
  int degree_;
  double eps_interior_;
  double eps_boundary_;
  FrequencyGrid grid_;
  // Boundary polynomial in u = (r - r_B)/eps_B, interior polynomial in
  // s = (r/eps_I)^2 - 1; ascending coefficients.
  std::vector<double> boundary_poly_;
  std::vector<double> interior_poly_;
  std::vector<Complex> coeffs_;
};

RegularizedKernel regularize_kernel(const RadialProfile& base, int dim, int bandwidth, int degree,
                                    double eps_interior, double eps_boundary);

// s_i = sum_j K(x_i - x~_j) alpha_j for torus nodes (row-major) with
// |x - x~| <= 1/2 - eps_B.
class FastsumPlan {
 public:
  FastsumPlan(std::shared_ptr<const RegularizedKernel> kernel, std::span<const double> sources,
              std::span<const double> targets, const NfftOptions& nfft = {});

  // Shares already-built NFFT plans (e.g. both directions of a Sinkhorn solve).
  FastsumPlan(std::shared_ptr<const RegularizedKernel> kernel,
              std::shared_ptr<const NfftPlan> source_plan, std::span<const double> sources,
              std::shared_ptr<const NfftPlan> target_plan, std::span<const double> targets);

  std::size_t source_count() const { return source_count_; }
  std::size_t target_count() const { return target_count_; }
  bool has_near_field() const { return !cell_start_.empty(); }
  // Set when some near-field bucket holds more than 64 times the mean load.
  bool crowded_buckets() const { return crowded_; }
  const RegularizedKernel& kernel() const { return *kernel_; }

  std::vector<double> apply(std::span<const double> alpha) const;
  std::vector<Complex> apply(std::span<const Complex> alpha) const;

 private:
  void build_near_field();
  template <class T>
  void add_near_field(std::span<const T> alpha, std::span<T> out) const;

  std::shared_ptr<const RegularizedKernel> kernel_;
  std::shared_ptr<const NfftPlan> source_plan_;
  std::shared_ptr<const NfftPlan> target_plan_;
  int dim_;
  std::size_t source_count_;
  std::size_t target_count_;
  std::vector<double> sources_;
  std::vector<double> targets_;
  // Near-field bucket grid over sources (CSR); empty when eps_I == 0.
  int cells_per_axis_ = 0;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> cell_items_;
  bool crowded_ = false;
};

// Dense reference: s_i = sum_j profile(|x_i - y_j|) alpha_j, in original
// coordinates. OpenMP over targets; `reference_kernel_sum` is the serial loop.
std::vector<double> dense_kernel_sum(const RadialProfile& profile, std::span<const double> sources,
                                     std::span<const double> targets, int dim,
                                     std::span<const double> alpha);
std::vector<double> reference_kernel_sum(const RadialProfile& profile,
                                         std::span<const double> sources,
                                         std::span<const double> targets, int dim,
                                         std::span<const double> alpha);

}  // namespace otkit

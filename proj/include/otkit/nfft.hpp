#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "otkit/fft.hpp"

namespace otkit {

// Frequency index set I_N = prod_t {-N_t/2, ..., N_t/2 - 1}, d in {1,2,3},
// stored row-major with the last axis fastest.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(std::vector<int> bandwidth);
  static FrequencyGrid cube(int dim, int n);

  int dim() const { return static_cast<int>(bandwidth_.size()); }
  const std::vector<int>& bandwidth() const { return bandwidth_; }
  std::size_t size() const { return size_; }

  // Multi-index k (entries in [-N_t/2, N_t/2)) of flat position `flat`.
  void index(std::size_t flat, std::span<int> k) const;

 private:
  std::vector<int> bandwidth_;
  std::size_t size_;
};

struct NfftOptions {
  double sigma = 2.0;  // oversampling; grid length rounded up to a power of two
  int cutoff = 8;      // window half-width m
};

// Wrap a coordinate to the half-open torus [-1/2, 1/2).
double wrap_torus(double x);

// Direct evaluation of f_j = sum_k c_k exp(2 pi i k.x_j); nodes row-major.
std::vector<Complex> ndft_forward(const FrequencyGrid& grid, std::span<const Complex> coeffs,
                                  std::span<const double> nodes);
// Direct evaluation of c_k = sum_j f_j exp(-2 pi i k.x_j).
std::vector<Complex> ndft_adjoint(const FrequencyGrid& grid, std::span<const Complex> values,
                                  std::span<const double> nodes);

// Kaiser-Bessel windowed NFFT. Immutable after construction; transforms use
// per-call scratch and may run concurrently.
class NfftPlan {
 public:
  NfftPlan(FrequencyGrid grid, std::span<const double> nodes, NfftOptions opts = {});

  const FrequencyGrid& grid() const { return grid_; }
  std::size_t node_count() const { return node_count_; }
  const std::vector<std::size_t>& oversampled() const { return oversampled_; }
  const NfftOptions& options() const { return opts_; }

  std::vector<Complex> forward(std::span<const Complex> coeffs) const;
  std::vector<Complex> adjoint(std::span<const Complex> values) const;

  // Serial variants of the same algorithm; the parallel ones must agree with
  // these to rounding (bitwise when one thread is used).
  std::vector<Complex> forward_serial(std::span<const Complex> coeffs) const;
  std::vector<Complex> adjoint_serial(std::span<const Complex> values) const;

 private:
  std::vector<Complex> forward_impl(std::span<const Complex> coeffs, bool parallel) const;
  std::vector<Complex> adjoint_impl(std::span<const Complex> values, bool parallel) const;
  void deconvolve_to_grid(std::span<const Complex> coeffs, std::span<Complex> g) const;
  void grid_to_coefficients(std::span<const Complex> g, std::span<Complex> out) const;
  void interpolate(std::span<const Complex> g, std::span<Complex> out, bool parallel) const;
  void spread(std::span<const Complex> values, std::span<Complex> g, bool parallel) const;

  FrequencyGrid grid_;
  NfftOptions opts_;
  std::size_t node_count_;
  std::vector<std::size_t> oversampled_;
  std::size_t oversampled_total_;
  FftNd fft_;
  // Oversampled-grid positions that carry frequencies of I_N, per axis.
  FftNd::Support support_;
  int width_;  // 2m + 2 taps per axis
  // Per node and axis: first grid index (already wrapped) and tap weights.
  std::vector<std::size_t> first_index_;
  std::vector<double> taps_;
  // Per axis: 1 / (n_t * phihat(k_t)) for k_t in [-N_t/2, N_t/2).
  std::vector<std::vector<double>> deconv_;
};

}  // namespace otkit

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace otkit {

using Complex = std::complex<double>;

// Iterative radix-2 FFT of a fixed power-of-two length, computing
// X_k = sum_l x_l exp(sign * 2 pi i k l / n) without normalization.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const { return n_; }
  void transform(std::span<Complex> data, int sign) const;
  // Transforms `width` interleaved sequences at once: element l of sequence b
  // sits at data[l * width + b].
  void transform_batch(Complex* data, std::size_t width, int sign) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<Complex> twiddle_;  // stage with half-length h: exp(-pi i j / h) at h + j
};

// Separable multi-dimensional FFT over a row-major array (last axis fastest).
class FftNd {
 public:
  explicit FftNd(std::vector<std::size_t> shape);

  // Per axis, a flag for every index along that axis.
  using Support = std::vector<std::vector<char>>;

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return total_; }
  void transform(std::span<Complex> data, int sign) const;
  // Pruned transform: the input vanishes outside the product set `input`
  // and only entries inside the product set `output` are needed (either may be
  // null). Entries outside `output` are left unspecified.
  void transform(std::span<Complex> data, int sign, const Support* input,
                 const Support* output) const;

 private:
  std::vector<std::size_t> shape_;
  std::size_t total_;
  std::vector<Fft> axes_;
};

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

}  // namespace otkit

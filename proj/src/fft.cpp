#include "otkit/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "otkit/error.hpp"
#include "otkit/parallel.hpp"

namespace otkit {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Fft::Fft(std::size_t n) : n_(n), bitrev_(n), twiddle_(std::max<std::size_t>(n, 1)) {
  if (!is_power_of_two(n)) throw InputError("FFT length must be a power of two");
  int bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    bitrev_[i] = r;
  }
  for (std::size_t half = 1; half < n; half <<= 1) {
    for (std::size_t j = 0; j < half; ++j) {
      const double a = -std::numbers::pi * static_cast<double>(j) / static_cast<double>(half);
      twiddle_[half + j] = {std::cos(a), std::sin(a)};
    }
  }
}

void Fft::transform(std::span<Complex> data, int sign) const {
  if (data.size() != n_) throw InputError("FFT input length mismatch");
  transform_batch(data.data(), 1, sign);
}

void Fft::transform_batch(Complex* data, std::size_t width, int sign) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t r = bitrev_[i];
    if (i < r) std::swap_ranges(data + i * width, data + (i + 1) * width, data + r * width);
  }
  auto* z = reinterpret_cast<double*>(data);
  const double s = sign > 0 ? -1.0 : 1.0;
  const std::size_t w2 = 2 * width;
  // first stage has unit twiddles
  for (std::size_t start = 0; start + 1 < n_; start += 2) {
    double* u = z + start * w2;
    double* v = u + w2;
    for (std::size_t b = 0; b < w2; ++b) {
      const double t = v[b];
      v[b] = u[b] - t;
      u[b] += t;
    }
  }
  for (std::size_t half = 2; half < n_; half <<= 1) {
    const std::size_t len = 2 * half;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const double wr = twiddle_[half + j].real();
        const double wi = s * twiddle_[half + j].imag();
        double* u = z + (start + j) * w2;
        double* v = z + (start + j + half) * w2;
        for (std::size_t b = 0; b < w2; b += 2) {
          const double vr = v[b] * wr - v[b + 1] * wi;
          const double vi = v[b] * wi + v[b + 1] * wr;
          v[b] = u[b] - vr;
          v[b + 1] = u[b + 1] - vi;
          u[b] += vr;
          u[b + 1] += vi;
        }
      }
    }
  }
}

FftNd::FftNd(std::vector<std::size_t> shape) : shape_(std::move(shape)), total_(1) {
  for (std::size_t s : shape_) {
    axes_.emplace_back(s);
    total_ *= s;
  }
}

void FftNd::transform(std::span<Complex> data, int sign) const {
  transform(data, sign, nullptr, nullptr);
}

void FftNd::transform(std::span<Complex> data, int sign, const Support* input,
                      const Support* output) const {
  if (data.size() != total_) throw InputError("FFT input length mismatch");
  const std::size_t dim = shape_.size();
  for (const Support* s : {input, output}) {
    if (!s) continue;
    if (s->size() != dim) throw InputError("FFT support rank mismatch");
    for (std::size_t t = 0; t < dim; ++t) {
      if ((*s)[t].size() != shape_[t]) throw InputError("FFT support length mismatch");
    }
  }
  // A line along axis a is skipped when an axis before a (not transformed yet)
  // sits outside the input support, or an axis after a (already transformed)
  // sits outside the output support.
  auto needed = [&](std::size_t a, std::size_t hi, std::size_t lo) {
    for (std::size_t t = a; t-- > 0;) {
      const std::size_t i = hi % shape_[t];
      hi /= shape_[t];
      if (input && !(*input)[t][i]) return false;
    }
    for (std::size_t t = dim; t-- > a + 1;) {
      const std::size_t i = lo % shape_[t];
      lo /= shape_[t];
      if (output && !(*output)[t][i]) return false;
    }
    return true;
  };
  constexpr std::size_t kBlock = 16;
  std::size_t stride = 1;
  for (std::size_t a = dim; a-- > 0;) {
    const std::size_t len = shape_[a];
    if (stride == 1) {
      const auto nlines = static_cast<std::ptrdiff_t>(total_ / len);
#pragma omp parallel for num_threads(thread_count()) schedule(static) if (nlines >= 64)
      for (std::ptrdiff_t line = 0; line < nlines; ++line) {
        if (!needed(a, static_cast<std::size_t>(line), 0)) continue;
        axes_[a].transform(data.subspan(static_cast<std::size_t>(line) * len, len), sign);
      }
    } else {
      // lines with consecutive low index are gathered kBlock at a time
      const std::size_t width = std::min(kBlock, stride);
      const std::size_t blocks = total_ / len / width;
      const auto nblocks = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel num_threads(thread_count()) if (nblocks >= 8)
      {
        std::vector<Complex> buf(len * width);
#pragma omp for schedule(static)
        for (std::ptrdiff_t blk = 0; blk < nblocks; ++blk) {
          const std::size_t first = static_cast<std::size_t>(blk) * width;
          const std::size_t lo = first % stride;
          const std::size_t hi = first / stride;
          bool any = false;
          for (std::size_t b = 0; b < width && !any; ++b) any = needed(a, hi, lo + b);
          if (!any) continue;
          const std::size_t base = hi * stride * len + lo;
          for (std::size_t i = 0; i < len; ++i) {
            const Complex* src = data.data() + base + i * stride;
            std::copy(src, src + width, buf.data() + i * width);
          }
          axes_[a].transform_batch(buf.data(), width, sign);
          for (std::size_t i = 0; i < len; ++i) {
            std::copy(buf.data() + i * width, buf.data() + (i + 1) * width,
                      data.data() + base + i * stride);
          }
        }
      }
    }
    stride *= len;
  }
}

}  // namespace otkit

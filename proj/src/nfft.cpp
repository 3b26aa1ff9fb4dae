#include "otkit/nfft.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "otkit/error.hpp"
#include "otkit/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace otkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t wrap_index(long long i, std::size_t n) {
  const auto m = static_cast<long long>(n);
  long long r = i % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

// Kaiser-Bessel window on a grid of length n, support |x| <= m/n.
double kb_window(double x, std::size_t n, int m, double b) {
  const double nx = static_cast<double>(n) * x;
  const double arg = static_cast<double>(m) * m - nx * nx;
  if (arg < 0.0) return 0.0;
  if (arg == 0.0) return b / std::numbers::pi;
  const double s = std::sqrt(arg);
  return std::sinh(b * s) / (std::numbers::pi * s);
}

double kb_hat(long long k, std::size_t n, int m, double b) {
  const double w = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
  return std::cyl_bessel_i(0.0, m * std::sqrt(b * b - w * w)) / static_cast<double>(n);
}

std::vector<Complex> axis_phases(int nt, double x, int sign) {
  std::vector<Complex> e(nt);
  for (int k = 0; k < nt; ++k) {
    const double kk = static_cast<double>(k - nt / 2);
    e[k] = std::polar(1.0, sign * kTwoPi * kk * x);
  }
  return e;
}

void check_nodes(std::span<const double> nodes, int dim) {
  if (nodes.size() % static_cast<std::size_t>(dim) != 0) {
    throw InputError("node array length is not a multiple of the dimension");
  }
}

}  // namespace

FrequencyGrid::FrequencyGrid(std::vector<int> bandwidth) : bandwidth_(std::move(bandwidth)), size_(1) {
  if (bandwidth_.empty() || bandwidth_.size() > 3) throw InputError("frequency grid dimension must be 1, 2 or 3");
  for (int n : bandwidth_) {
    if (n < 2 || n % 2 != 0) throw InputError("bandwidth must be even and >= 2");
    size_ *= static_cast<std::size_t>(n);
  }
}

FrequencyGrid FrequencyGrid::cube(int dim, int n) {
  return FrequencyGrid(std::vector<int>(static_cast<std::size_t>(dim), n));
}

void FrequencyGrid::index(std::size_t flat, std::span<int> k) const {
  for (std::size_t t = bandwidth_.size(); t-- > 0;) {
    const auto n = static_cast<std::size_t>(bandwidth_[t]);
    k[t] = static_cast<int>(flat % n) - bandwidth_[t] / 2;
    flat /= n;
  }
}

double wrap_torus(double x) {
  double y = x - std::floor(x + 0.5);
  if (y >= 0.5) y -= 1.0;
  if (y < -0.5) y = -0.5;
  return y;
}

std::vector<Complex> ndft_forward(const FrequencyGrid& grid, std::span<const Complex> coeffs,
                                  std::span<const double> nodes) {
  if (coeffs.size() != grid.size()) throw InputError("coefficient array size mismatch");
  const int d = grid.dim();
  check_nodes(nodes, d);
  const std::size_t m = nodes.size() / static_cast<std::size_t>(d);
  const auto& bw = grid.bandwidth();
  std::vector<Complex> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::vector<Complex>> e;
    for (int t = 0; t < d; ++t) e.push_back(axis_phases(bw[t], nodes[j * d + t], +1));
    Complex s = 0.0;
    std::size_t flat = 0;
    if (d == 1) {
      for (int a = 0; a < bw[0]; ++a) s += coeffs[flat++] * e[0][a];
    } else if (d == 2) {
      for (int a = 0; a < bw[0]; ++a)
        for (int b = 0; b < bw[1]; ++b) s += coeffs[flat++] * (e[0][a] * e[1][b]);
    } else {
      for (int a = 0; a < bw[0]; ++a)
        for (int b = 0; b < bw[1]; ++b) {
          const Complex eab = e[0][a] * e[1][b];
          for (int c = 0; c < bw[2]; ++c) s += coeffs[flat++] * (eab * e[2][c]);
        }
    }
    out[j] = s;
  }
  return out;
}

std::vector<Complex> ndft_adjoint(const FrequencyGrid& grid, std::span<const Complex> values,
                                  std::span<const double> nodes) {
  const int d = grid.dim();
  check_nodes(nodes, d);
  const std::size_t m = nodes.size() / static_cast<std::size_t>(d);
  if (values.size() != m) throw InputError("value array size mismatch");
  const auto& bw = grid.bandwidth();
  std::vector<Complex> out(grid.size(), 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::vector<Complex>> e;
    for (int t = 0; t < d; ++t) e.push_back(axis_phases(bw[t], nodes[j * d + t], -1));
    std::size_t flat = 0;
    if (d == 1) {
      for (int a = 0; a < bw[0]; ++a) out[flat++] += values[j] * e[0][a];
    } else if (d == 2) {
      for (int a = 0; a < bw[0]; ++a)
        for (int b = 0; b < bw[1]; ++b) out[flat++] += values[j] * (e[0][a] * e[1][b]);
    } else {
      for (int a = 0; a < bw[0]; ++a)
        for (int b = 0; b < bw[1]; ++b) {
          const Complex eab = e[0][a] * e[1][b];
          for (int c = 0; c < bw[2]; ++c) out[flat++] += values[j] * (eab * e[2][c]);
        }
    }
  }
  return out;
}

namespace {

std::vector<std::size_t> oversampled_shape(const FrequencyGrid& grid, const NfftOptions& opts) {
  if (!(opts.sigma >= 2.0)) throw InputError("NFFT oversampling factor must be >= 2");
  if (opts.cutoff < 1) throw InputError("NFFT window cutoff must be >= 1");
  std::vector<std::size_t> shape;
  for (int n : grid.bandwidth()) {
    const auto target = static_cast<std::size_t>(std::ceil(opts.sigma * n));
    std::size_t len = next_power_of_two(target);
    // the window support must fit into the grid
    while (len < static_cast<std::size_t>(2 * opts.cutoff + 2)) len <<= 1;
    shape.push_back(len);
  }
  return shape;
}

}  // namespace

NfftPlan::NfftPlan(FrequencyGrid grid, std::span<const double> nodes, NfftOptions opts)
    : grid_(std::move(grid)),
      opts_(opts),
      node_count_(0),
      oversampled_(oversampled_shape(grid_, opts)),
      oversampled_total_(1),
      fft_(oversampled_),
      width_(2 * opts.cutoff + 2) {
  const int d = grid_.dim();
  check_nodes(nodes, d);
  node_count_ = nodes.size() / static_cast<std::size_t>(d);
  for (std::size_t n : oversampled_) oversampled_total_ *= n;
  const int m = opts_.cutoff;
  first_index_.resize(node_count_ * d);
  taps_.resize(node_count_ * d * width_);
  for (int t = 0; t < d; ++t) {
    const std::size_t n = oversampled_[t];
    const double sigma_eff = static_cast<double>(n) / grid_.bandwidth()[t];
    const double b = std::numbers::pi * (2.0 - 1.0 / sigma_eff);
    for (std::size_t j = 0; j < node_count_; ++j) {
      const double raw = nodes[j * d + t];
      if (!std::isfinite(raw)) throw InputError("NFFT node is not finite");
      const double x = wrap_torus(raw);
      const auto l0 = static_cast<long long>(std::floor(x * static_cast<double>(n))) - m;
      first_index_[j * d + t] = wrap_index(l0, n);
      double* w = &taps_[(j * d + t) * width_];
      for (int s = 0; s < width_; ++s) {
        const double l = static_cast<double>(l0 + s);
        w[s] = kb_window(x - l / static_cast<double>(n), n, m, b);
      }
    }
    std::vector<double> dc(static_cast<std::size_t>(grid_.bandwidth()[t]));
    for (int k = 0; k < grid_.bandwidth()[t]; ++k) {
      const long long kk = k - grid_.bandwidth()[t] / 2;
      dc[k] = 1.0 / (static_cast<double>(n) * kb_hat(kk, n, m, b));
    }
    deconv_.push_back(std::move(dc));
    std::vector<char> on(n, 0);
    for (int k = 0; k < grid_.bandwidth()[t]; ++k) {
      on[wrap_index(k - grid_.bandwidth()[t] / 2, n)] = 1;
    }
    support_.push_back(std::move(on));
  }
}

// g must arrive zeroed.
void NfftPlan::deconvolve_to_grid(std::span<const Complex> coeffs, std::span<Complex> g) const {
  const int d = grid_.dim();
  const auto& bw = grid_.bandwidth();
  std::size_t flat = 0;
  int k[3] = {0, 0, 0};
  for (; flat < grid_.size(); ++flat) {
    grid_.index(flat, k);
    double f = 1.0;
    std::size_t pos = 0;
    for (int t = 0; t < d; ++t) {
      f *= deconv_[t][static_cast<std::size_t>(k[t] + bw[t] / 2)];
      pos = pos * oversampled_[t] + wrap_index(k[t], oversampled_[t]);
    }
    g[pos] = coeffs[flat] * f;
  }
}

void NfftPlan::grid_to_coefficients(std::span<const Complex> g, std::span<Complex> out) const {
  const int d = grid_.dim();
  const auto& bw = grid_.bandwidth();
  int k[3] = {0, 0, 0};
  for (std::size_t flat = 0; flat < grid_.size(); ++flat) {
    grid_.index(flat, k);
    double f = 1.0;
    std::size_t pos = 0;
    for (int t = 0; t < d; ++t) {
      f *= deconv_[t][static_cast<std::size_t>(k[t] + bw[t] / 2)];
      pos = pos * oversampled_[t] + wrap_index(k[t], oversampled_[t]);
    }
    out[flat] = g[pos] * f;
  }
}

void NfftPlan::interpolate(std::span<const Complex> g, std::span<Complex> out, bool parallel) const {
  const int d = grid_.dim();
  const int w = width_;
  const std::size_t n0 = oversampled_[0];
  const std::size_t n1 = d > 1 ? oversampled_[1] : 1;
  const std::size_t n2 = d > 2 ? oversampled_[2] : 1;
  const auto count = static_cast<std::ptrdiff_t>(node_count_);
#pragma omp parallel for num_threads(thread_count()) schedule(static) if (parallel)
  for (std::ptrdiff_t jj = 0; jj < count; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    const std::size_t* first = &first_index_[j * d];
    const double* w0 = &taps_[(j * d) * w];
    Complex s = 0.0;
    if (d == 1) {
      for (int a = 0; a < w; ++a) s += g[(first[0] + a) & (n0 - 1)] * w0[a];
    } else if (d == 2) {
      const double* w1 = w0 + w;
      for (int a = 0; a < w; ++a) {
        const std::size_t row = ((first[0] + a) & (n0 - 1)) * n1;
        Complex r = 0.0;
        for (int b = 0; b < w; ++b) r += g[row + ((first[1] + b) & (n1 - 1))] * w1[b];
        s += r * w0[a];
      }
    } else {
      const double* w1 = w0 + w;
      const double* w2 = w1 + w;
      for (int a = 0; a < w; ++a) {
        const std::size_t pa = ((first[0] + a) & (n0 - 1)) * n1;
        Complex ra = 0.0;
        for (int b = 0; b < w; ++b) {
          const std::size_t pb = (pa + ((first[1] + b) & (n1 - 1))) * n2;
          Complex rb = 0.0;
          for (int c = 0; c < w; ++c) rb += g[pb + ((first[2] + c) & (n2 - 1))] * w2[c];
          ra += rb * w1[b];
        }
        s += ra * w0[a];
      }
    }
    out[j] = s;
  }
}

namespace {

template <class Grid>
void spread_one(std::size_t j, int d, int w, const std::size_t* first, const double* w0,
                std::size_t n0, std::size_t n1, std::size_t n2, Complex v, Grid& g) {
  (void)j;
  if (d == 1) {
    for (int a = 0; a < w; ++a) g[(first[0] + a) & (n0 - 1)] += v * w0[a];
  } else if (d == 2) {
    const double* w1 = w0 + w;
    for (int a = 0; a < w; ++a) {
      const std::size_t row = ((first[0] + a) & (n0 - 1)) * n1;
      const Complex va = v * w0[a];
      for (int b = 0; b < w; ++b) g[row + ((first[1] + b) & (n1 - 1))] += va * w1[b];
    }
  } else {
    const double* w1 = w0 + w;
    const double* w2 = w1 + w;
    for (int a = 0; a < w; ++a) {
      const std::size_t pa = ((first[0] + a) & (n0 - 1)) * n1;
      const Complex va = v * w0[a];
      for (int b = 0; b < w; ++b) {
        const std::size_t pb = (pa + ((first[1] + b) & (n1 - 1))) * n2;
        const Complex vb = va * w1[b];
        for (int c = 0; c < w; ++c) g[pb + ((first[2] + c) & (n2 - 1))] += vb * w2[c];
      }
    }
  }
}

}  // namespace

// g must arrive zeroed.
void NfftPlan::spread(std::span<const Complex> values, std::span<Complex> g, bool parallel) const {
  const int d = grid_.dim();
  const int w = width_;
  const std::size_t n0 = oversampled_[0];
  const std::size_t n1 = d > 1 ? oversampled_[1] : 1;
  const std::size_t n2 = d > 2 ? oversampled_[2] : 1;
  int threads = 1;
#ifdef _OPENMP
  if (parallel) threads = thread_count();
#endif
  if (threads <= 1 || node_count_ < 256) {
    for (std::size_t j = 0; j < node_count_; ++j) {
      spread_one(j, d, w, &first_index_[j * d], &taps_[(j * d) * w], n0, n1, n2, values[j], g);
    }
    return;
  }
  // private grids, reduced in thread order so the result depends only on the
  // thread count
  std::vector<std::vector<Complex>> priv(static_cast<std::size_t>(threads));
  const auto count = static_cast<std::ptrdiff_t>(node_count_);
#pragma omp parallel num_threads(threads)
  {
    int tid = 0;
#ifdef _OPENMP
    tid = omp_get_thread_num();
#endif
    auto& local = priv[static_cast<std::size_t>(tid)];
    local.assign(oversampled_total_, Complex(0.0));
#pragma omp for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < count; ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      spread_one(j, d, w, &first_index_[j * d], &taps_[(j * d) * w], n0, n1, n2, values[j], local);
    }
  }
  const auto total = static_cast<std::ptrdiff_t>(oversampled_total_);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t p = 0; p < total; ++p) {
    Complex s = 0.0;
    for (const auto& local : priv) {
      if (!local.empty()) s += local[static_cast<std::size_t>(p)];
    }
    g[static_cast<std::size_t>(p)] = s;
  }
}

std::vector<Complex> NfftPlan::forward_impl(std::span<const Complex> coeffs, bool parallel) const {
  if (coeffs.size() != grid_.size()) {
    throw InputError("NFFT forward expects " + std::to_string(grid_.size()) + " coefficients");
  }
  std::vector<Complex> g(oversampled_total_);
  deconvolve_to_grid(coeffs, g);
  fft_.transform(g, +1, &support_, nullptr);
  std::vector<Complex> out(node_count_);
  interpolate(g, out, parallel);
  return out;
}

std::vector<Complex> NfftPlan::adjoint_impl(std::span<const Complex> values, bool parallel) const {
  if (values.size() != node_count_) {
    throw InputError("NFFT adjoint expects " + std::to_string(node_count_) + " values");
  }
  std::vector<Complex> g(oversampled_total_);
  spread(values, g, parallel);
  fft_.transform(g, -1, nullptr, &support_);
  std::vector<Complex> out(grid_.size());
  grid_to_coefficients(g, out);
  return out;
}

std::vector<Complex> NfftPlan::forward(std::span<const Complex> coeffs) const {
  return forward_impl(coeffs, true);
}
std::vector<Complex> NfftPlan::adjoint(std::span<const Complex> values) const {
  return adjoint_impl(values, true);
}
std::vector<Complex> NfftPlan::forward_serial(std::span<const Complex> coeffs) const {
  return forward_impl(coeffs, false);
}
std::vector<Complex> NfftPlan::adjoint_serial(std::span<const Complex> values) const {
  return adjoint_impl(values, false);
}

}  // namespace otkit

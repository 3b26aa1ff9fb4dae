#include "otkit/fastsum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "otkit/error.hpp"
#include "otkit/parallel.hpp"

namespace otkit {

FastsumOptions FastsumOptions::resolve(int dim, bool smooth_at_zero) const {
  FastsumOptions o = *this;
  if (o.bandwidth <= 0) o.bandwidth = dim == 1 ? 256 : dim == 2 ? 128 : 32;
  if (o.degree < 1) throw InputError("fast summation degree p must be >= 1");
  // p/N, capped so that the interior and boundary bands stay disjoint on
  // coarse grids (d = 3)
  const double default_eps = std::min(static_cast<double>(o.degree) / o.bandwidth, 0.125);
  if (o.eps_boundary < 0) o.eps_boundary = default_eps;
  if (o.eps_interior < 0) o.eps_interior = smooth_at_zero ? 0.0 : default_eps;
  return o;
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double horner(std::span<const double> c, double x) {
  double s = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) s = s * x + c[i];
  return s;
}

// Degree-2p polynomial on [0,1] with Taylor coefficients f_0..f_p at 0 and
// vanishing derivatives 1..p at 1. Uses P' = (1-u)^p R with R fixed by the
// low-order coefficients of P'.
std::vector<double> two_point_hermite(const std::vector<double>& f, int p) {
  std::vector<double> a(p);
  for (int q = 0; q < p; ++q) a[q] = (q + 1) * f[q + 1];
  std::vector<double> rho(p, 0.0);
  for (int q = 0; q < p; ++q) {
    for (int i = 0; i <= q; ++i) rho[q] += a[i] * binomial(p - 1 + q - i, q - i);
  }
  std::vector<double> one_minus(p + 1);
  for (int j = 0; j <= p; ++j) one_minus[j] = binomial(p, j) * (j % 2 ? -1.0 : 1.0);
  std::vector<double> dp(2 * p, 0.0);
  for (int i = 0; i <= p; ++i)
    for (int j = 0; j < p; ++j) dp[i + j] += one_minus[i] * rho[j];
  std::vector<double> poly(2 * p + 1, 0.0);
  poly[0] = f[0];
  for (int q = 0; q < 2 * p; ++q) poly[q + 1] = dp[q] / (q + 1);
  return poly;
}

}  // namespace

RegularizedKernel::RegularizedKernel(RadialProfile base, int dim, int bandwidth, int degree,
                                     double eps_interior, double eps_boundary)
    : base_(base),
      dim_(dim),
      bandwidth_(bandwidth),
      degree_(degree),
      eps_interior_(eps_interior),
      eps_boundary_(eps_boundary),
      grid_(FrequencyGrid::cube(dim, bandwidth)) {
  if (degree < 1) throw InputError("fast summation degree p must be >= 1");
  if (!(eps_boundary > 0.0 && eps_boundary <= 0.25)) throw InputError("eps_B must lie in (0, 1/4]");
  if (!(eps_interior >= 0.0 && eps_interior < 0.5 - eps_boundary)) {
    throw InputError("eps_I must lie in [0, 1/2 - eps_B)");
  }
  const auto p = static_cast<std::size_t>(degree);
  const double r_b = 0.5 - eps_boundary;
  {
    const Taylor t = base_.taylor(r_b, p);
    std::vector<double> f(p + 1);
    double scale = 1.0;
    for (std::size_t q = 0; q <= p; ++q) {
      f[q] = t[q] * scale;
      scale *= eps_boundary;
    }
    boundary_poly_ = two_point_hermite(f, degree);
  }
  if (eps_interior > 0.0) {
    // K(eps_I sqrt(1 + s)) about s = 0
    const Taylor k = base_.taylor(eps_interior, p);
    Taylor delta = sqrt(Taylor::variable(p, 1.0)) * eps_interior;
    delta[0] = 0.0;
    Taylor acc(p, k[p]);
    for (std::size_t q = p; q-- > 0;) acc = acc * delta + k[q];
    interior_poly_ = acc.coefficients();
  }

  // samples of K~ on {j/N}, j in I_N, stored at position j mod N
  const std::size_t total = grid_.size();
  const auto n = static_cast<std::size_t>(bandwidth);
  std::vector<Complex> samples(total);
  int j[3] = {0, 0, 0};
  for (std::size_t flat = 0; flat < total; ++flat) {
    grid_.index(flat, j);
    double r2 = 0.0;
    std::size_t pos = 0;
    for (int t = 0; t < dim; ++t) {
      const double y = static_cast<double>(j[t]) / bandwidth;
      r2 += y * y;
      pos = pos * n + static_cast<std::size_t>((j[t] + bandwidth) % bandwidth);
    }
    samples[pos] = regularized(std::sqrt(r2));
  }
  std::vector<std::size_t> shape(static_cast<std::size_t>(dim), n);
  FftNd(shape).transform(samples, -1);
  const double norm = 1.0 / static_cast<double>(total);
  coeffs_.resize(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    grid_.index(flat, j);
    std::size_t pos = 0;
    for (int t = 0; t < dim; ++t) pos = pos * n + static_cast<std::size_t>((j[t] + bandwidth) % bandwidth);
    coeffs_[flat] = samples[pos] * norm;
  }
}

double RegularizedKernel::boundary_value(double r) const {
  const double u = std::min(1.0, (r - (0.5 - eps_boundary_)) / eps_boundary_);
  return horner(boundary_poly_, u);
}

double RegularizedKernel::interior_value(double r) const {
  const double v = r / eps_interior_;
  return horner(interior_poly_, v * v - 1.0);
}

double RegularizedKernel::regularized(double r) const {
  if (r < eps_interior_) return interior_value(r);
  if (r <= 0.5 - eps_boundary_) return base_.value(r);
  return boundary_value(r);
}

double RegularizedKernel::near_correction(double r) const {
  if (r >= eps_interior_) return 0.0;
  return base_.value(r) - interior_value(r);
}

double RegularizedKernel::fourier_series(std::span<const double> y) const {
  if (y.size() != static_cast<std::size_t>(dim_)) throw InputError("point dimension mismatch");
  double s = 0.0;
  int k[3] = {0, 0, 0};
  for (std::size_t flat = 0; flat < coeffs_.size(); ++flat) {
    grid_.index(flat, k);
    double phase = 0.0;
    for (int t = 0; t < dim_; ++t) phase += k[t] * y[t];
    const Complex e = std::polar(1.0, 2.0 * std::numbers::pi * phase);
    s += (coeffs_[flat] * e).real();
  }
  return s;
}

RegularizedKernel regularize_kernel(const RadialProfile& base, int dim, int bandwidth, int degree,
                                    double eps_interior, double eps_boundary) {
  return RegularizedKernel(base, dim, bandwidth, degree, eps_interior, eps_boundary);
}

namespace {

void check_box(std::span<const double> nodes, int dim, double eps_boundary) {
  if (nodes.size() % static_cast<std::size_t>(dim) != 0) throw InputError("node array length mismatch");
  const double limit = 0.5 * (0.5 - eps_boundary) + 1e-12;
  for (std::size_t i = 0; i < nodes.size(); i += static_cast<std::size_t>(dim)) {
    double r2 = 0.0;
    for (int t = 0; t < dim; ++t) r2 += nodes[i + t] * nodes[i + t];
    if (!(std::sqrt(r2) <= limit)) throw InputError("fast summation node out of box");
  }
}

}  // namespace

FastsumPlan::FastsumPlan(std::shared_ptr<const RegularizedKernel> kernel,
                         std::span<const double> sources, std::span<const double> targets,
                         const NfftOptions& nfft)
    : FastsumPlan(kernel, std::make_shared<const NfftPlan>(kernel->grid(), sources, nfft), sources,
                  std::make_shared<const NfftPlan>(kernel->grid(), targets, nfft), targets) {}

FastsumPlan::FastsumPlan(std::shared_ptr<const RegularizedKernel> kernel,
                         std::shared_ptr<const NfftPlan> source_plan,
                         std::span<const double> sources,
                         std::shared_ptr<const NfftPlan> target_plan,
                         std::span<const double> targets)
    : kernel_(std::move(kernel)),
      source_plan_(std::move(source_plan)),
      target_plan_(std::move(target_plan)),
      dim_(kernel_->dim()),
      source_count_(sources.size() / static_cast<std::size_t>(kernel_->dim())),
      target_count_(targets.size() / static_cast<std::size_t>(kernel_->dim())),
      sources_(sources.begin(), sources.end()),
      targets_(targets.begin(), targets.end()) {
  check_box(sources, dim_, kernel_->eps_boundary());
  check_box(targets, dim_, kernel_->eps_boundary());
  if (source_plan_->node_count() != source_count_ || target_plan_->node_count() != target_count_) {
    throw InputError("NFFT plan does not match the node set");
  }
  if (kernel_->eps_interior() > 0.0) build_near_field();
}

namespace {

constexpr double kBoxLow = -0.25;

int cell_of(double x, double side, int cells) {
  const int c = static_cast<int>(std::floor((x - kBoxLow) / side));
  return std::clamp(c, 0, cells - 1);
}

}  // namespace

void FastsumPlan::build_near_field() {
  const double eps = kernel_->eps_interior();
  cells_per_axis_ = std::max(1, static_cast<int>(std::floor(0.5 / eps)));
  const double side = 0.5 / cells_per_axis_;
  std::size_t cells = 1;
  for (int t = 0; t < dim_; ++t) cells *= static_cast<std::size_t>(cells_per_axis_);
  std::vector<std::size_t> cell(source_count_);
  std::vector<std::size_t> counts(cells + 1, 0);
  for (std::size_t j = 0; j < source_count_; ++j) {
    std::size_t c = 0;
    for (int t = 0; t < dim_; ++t) {
      c = c * static_cast<std::size_t>(cells_per_axis_) +
          static_cast<std::size_t>(cell_of(sources_[j * dim_ + t], side, cells_per_axis_));
    }
    cell[j] = c;
    ++counts[c + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) counts[c + 1] += counts[c];
  cell_start_ = counts;
  cell_items_.resize(source_count_);
  std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t j = 0; j < source_count_; ++j) cell_items_[fill[cell[j]]++] = j;
  const double mean = static_cast<double>(source_count_) / static_cast<double>(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    if (static_cast<double>(cell_start_[c + 1] - cell_start_[c]) > 64.0 * mean) crowded_ = true;
  }
}

template <class T>
void FastsumPlan::add_near_field(std::span<const T> alpha, std::span<T> out) const {
  const double eps = kernel_->eps_interior();
  const double side = 0.5 / cells_per_axis_;
  const int cpa = cells_per_axis_;
  const auto count = static_cast<std::ptrdiff_t>(target_count_);
#pragma omp parallel for num_threads(thread_count()) schedule(dynamic, 64)
  for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double* x = &targets_[i * dim_];
    int lo[3] = {0, 0, 0};
    int hi[3] = {0, 0, 0};
    for (int t = 0; t < dim_; ++t) {
      const int c = cell_of(x[t], side, cpa);
      lo[t] = std::max(0, c - 1);
      hi[t] = std::min(cpa - 1, c + 1);
    }
    T acc{};
    for (int a = lo[0]; a <= hi[0]; ++a) {
      for (int b = dim_ > 1 ? lo[1] : 0; b <= (dim_ > 1 ? hi[1] : 0); ++b) {
        for (int c = dim_ > 2 ? lo[2] : 0; c <= (dim_ > 2 ? hi[2] : 0); ++c) {
          std::size_t cell = static_cast<std::size_t>(a);
          if (dim_ > 1) cell = cell * cpa + static_cast<std::size_t>(b);
          if (dim_ > 2) cell = cell * cpa + static_cast<std::size_t>(c);
          for (std::size_t q = cell_start_[cell]; q < cell_start_[cell + 1]; ++q) {
            const std::size_t j = cell_items_[q];
            const double* y = &sources_[j * dim_];
            double r2 = 0.0;
            for (int t = 0; t < dim_; ++t) r2 += (x[t] - y[t]) * (x[t] - y[t]);
            const double r = std::sqrt(r2);
            if (r < eps) acc += kernel_->near_correction(r) * alpha[j];
          }
        }
      }
    }
    out[i] += acc;
  }
}

std::vector<Complex> FastsumPlan::apply(std::span<const Complex> alpha) const {
  if (alpha.size() != source_count_) {
    throw InputError("fast summation expects " + std::to_string(source_count_) + " weights");
  }
  std::vector<Complex> c = source_plan_->adjoint(alpha);
  const auto& b = kernel_->coefficients();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= b[k];
  std::vector<Complex> s = target_plan_->forward(c);
  if (has_near_field()) add_near_field<Complex>(alpha, s);
  return s;
}

std::vector<double> FastsumPlan::apply(std::span<const double> alpha) const {
  if (alpha.size() != source_count_) {
    throw InputError("fast summation expects " + std::to_string(source_count_) + " weights");
  }
  std::vector<Complex> a(alpha.begin(), alpha.end());
  std::vector<Complex> c = source_plan_->adjoint(a);
  const auto& b = kernel_->coefficients();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= b[k].real();
  const std::vector<Complex> s = target_plan_->forward(c);
  std::vector<double> out(target_count_);
  for (std::size_t i = 0; i < target_count_; ++i) out[i] = s[i].real();
  if (has_near_field()) add_near_field<double>(alpha, out);
  return out;
}

namespace {

double radius(const double* x, const double* y, int dim) {
  double r2 = 0.0;
  for (int t = 0; t < dim; ++t) r2 += (x[t] - y[t]) * (x[t] - y[t]);
  return std::sqrt(r2);
}

void check_sum_args(std::span<const double> sources, std::span<const double> targets, int dim,
                    std::span<const double> alpha) {
  if (dim < 1) throw InputError("dimension must be >= 1");
  if (sources.size() != alpha.size() * static_cast<std::size_t>(dim) ||
      targets.size() % static_cast<std::size_t>(dim) != 0) {
    throw InputError("kernel sum size mismatch");
  }
}

}  // namespace

std::vector<double> dense_kernel_sum(const RadialProfile& profile, std::span<const double> sources,
                                     std::span<const double> targets, int dim,
                                     std::span<const double> alpha) {
  check_sum_args(sources, targets, dim, alpha);
  const std::size_t m = targets.size() / static_cast<std::size_t>(dim);
  std::vector<double> out(m);
  const auto count = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for num_threads(thread_count()) schedule(static)
  for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double s = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      s += profile.value(radius(&targets[i * dim], &sources[j * dim], dim)) * alpha[j];
    }
    out[i] = s;
  }
  return out;
}

std::vector<double> reference_kernel_sum(const RadialProfile& profile,
                                         std::span<const double> sources,
                                         std::span<const double> targets, int dim,
                                         std::span<const double> alpha) {
  check_sum_args(sources, targets, dim, alpha);
  const std::size_t m = targets.size() / static_cast<std::size_t>(dim);
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      s += profile.value(radius(&targets[i * dim], &sources[j * dim], dim)) * alpha[j];
    }
    out[i] = s;
  }
  return out;
}

}  // namespace otkit

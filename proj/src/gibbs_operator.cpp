#include "gibbs_operator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "otkit/error.hpp"
#include "otkit/parallel.hpp"

namespace otkit::detail {

namespace {

// Kernel matrices up to this many entries are stored; larger problems fall
// back to streaming log-sum-exp.
constexpr std::size_t kMaxStoredEntries = std::size_t{1} << 25;
// Shifted sums below this are redone in the log domain.
constexpr double kTinySum = 1e-280;

double max_of(std::span<const double> v) {
  double m = -HUGE_VAL;
  for (double x : v) m = std::max(m, x);
  return m;
}

void check_finite(std::span<const double> v, double lambda) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericError("non-finite Gibbs sum at lambda = " + std::to_string(lambda) +
                         "; try a lambda schedule");
    }
  }
}

class DenseGibbs final : public GibbsOperator {
 public:
  DenseGibbs(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& cost,
             double lambda)
      : GibbsOperator(lambda), mu_(mu), nu_(nu), cost_(cost) {
    if (mu.size() * nu.size() <= kMaxStoredEntries) {
      kernel_ = Matrix(mu.size(), nu.size());
      const auto n = static_cast<std::ptrdiff_t>(mu.size());
#pragma omp parallel for num_threads(thread_count()) schedule(static)
      for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        auto row = kernel_.row(i);
        for (std::size_t j = 0; j < nu.size(); ++j) {
          row[j] = std::exp(-lambda_ * cost_value(mu.point(i), nu.point(j), cost_));
        }
      }
      stored_ = true;
    }
  }

  void log_rows(std::span<const double> gamma, std::span<double> out) const override {
    const std::size_t n = mu_.size();
    const std::size_t m = nu_.size();
    const double shift = lambda_ * max_of(gamma);
    std::vector<double> u(m);
    for (std::size_t j = 0; j < m; ++j) u[j] = std::exp(lambda_ * gamma[j] - shift) * nu_.weight(j);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for num_threads(thread_count()) schedule(static)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      double s = 0.0;
      if (stored_) {
        const auto row = kernel_.row(i);
        for (std::size_t j = 0; j < m; ++j) s += row[j] * u[j];
      }
      if (stored_ && s > kTinySum && std::isfinite(s)) {
        out[i] = shift + std::log(s);
      } else {
        out[i] = row_lse(i, gamma);
      }
    }
    check_finite(out, lambda_);
  }

  void log_cols(std::span<const double> beta, std::span<double> out) const override {
    const std::size_t n = mu_.size();
    const std::size_t m = nu_.size();
    const double shift = lambda_ * max_of(beta);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::exp(lambda_ * beta[i] - shift) * mu_.weight(i);
    std::vector<double> t(m, 0.0);
    if (stored_) {
      // column blocks; every t_j accumulates in row order
      constexpr std::size_t kBlock = 256;
      const auto blocks = static_cast<std::ptrdiff_t>((m + kBlock - 1) / kBlock);
#pragma omp parallel for num_threads(thread_count()) schedule(static)
      for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        const std::size_t j0 = static_cast<std::size_t>(b) * kBlock;
        const std::size_t j1 = std::min(m, j0 + kBlock);
        for (std::size_t i = 0; i < n; ++i) {
          const double vi = v[i];
          const double* row = kernel_.row(i).data();
          for (std::size_t j = j0; j < j1; ++j) t[j] += row[j] * vi;
        }
      }
    }
    const auto count = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for num_threads(thread_count()) schedule(static)
    for (std::ptrdiff_t jj = 0; jj < count; ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      if (stored_ && t[j] > kTinySum && std::isfinite(t[j])) {
        out[j] = shift + std::log(t[j]);
      } else {
        out[j] = col_lse(j, beta);
      }
    }
    check_finite(out, lambda_);
  }

  double transport(std::span<const double> beta, std::span<const double> gamma) const override {
    std::vector<double> rows(mu_.size());
    const auto count = static_cast<std::ptrdiff_t>(mu_.size());
#pragma omp parallel for num_threads(thread_count()) schedule(static)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      CompensatedSum s;
      for (std::size_t j = 0; j < nu_.size(); ++j) {
        const double c = cost_value(mu_.point(i), nu_.point(j), cost_);
        s.add(std::exp(lambda_ * (beta[i] + gamma[j] - c)) * nu_.weight(j) * c);
      }
      rows[i] = s.value() * mu_.weight(i);
    }
    return compensated_sum(rows);
  }

 private:
  double row_lse(std::size_t i, std::span<const double> gamma) const {
    const std::size_t m = nu_.size();
    std::vector<double> e(m);
    double mx = -HUGE_VAL;
    for (std::size_t j = 0; j < m; ++j) {
      e[j] = lambda_ * (gamma[j] - cost_value(mu_.point(i), nu_.point(j), cost_)) +
             std::log(nu_.weight(j));
      mx = std::max(mx, e[j]);
    }
    double s = 0.0;
    for (double x : e) s += std::exp(x - mx);
    return mx + std::log(s);
  }

  double col_lse(std::size_t j, std::span<const double> beta) const {
    const std::size_t n = mu_.size();
    std::vector<double> e(n);
    double mx = -HUGE_VAL;
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = lambda_ * (beta[i] - cost_value(mu_.point(i), nu_.point(j), cost_)) +
             std::log(mu_.weight(i));
      mx = std::max(mx, e[i]);
    }
    double s = 0.0;
    for (double x : e) s += std::exp(x - mx);
    return mx + std::log(s);
  }

  DiscreteMeasure mu_;
  DiscreteMeasure nu_;
  CostSpec cost_;
  Matrix kernel_;
  bool stored_ = false;
};

class NfftGibbs final : public GibbsOperator {
 public:
  NfftGibbs(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& cost,
            double lambda, const FastsumOptions& opts)
      : GibbsOperator(lambda),
        mu_(mu),
        nu_(nu),
        cost_(cost),
        embedding_(rescale(mu, nu, cost, opts)) {
    const int d = mu.dim();
    const RadialProfile gibbs = RadialProfile::gibbs(lambda, cost.exponent);
    opts_ = opts.resolve(d, gibbs.smooth_at_zero());
    auto kernel = std::make_shared<const RegularizedKernel>(gibbs.rescaled(embedding_.scale), d,
                                                            opts_.bandwidth, opts_.degree,
                                                            opts_.eps_interior, opts_.eps_boundary);
    mu_plan_ = std::make_shared<const NfftPlan>(kernel->grid(), embedding_.first.coords(), opts_.nfft);
    nu_plan_ = std::make_shared<const NfftPlan>(kernel->grid(), embedding_.second.coords(), opts_.nfft);
    rows_ = std::make_unique<FastsumPlan>(kernel, nu_plan_, embedding_.second.coords(), mu_plan_,
                                          embedding_.first.coords());
    cols_ = std::make_unique<FastsumPlan>(kernel, mu_plan_, embedding_.first.coords(), nu_plan_,
                                          embedding_.second.coords());
  }

  void log_rows(std::span<const double> gamma, std::span<double> out) const override {
    apply_log(*rows_, gamma, nu_.weights(), out);
  }

  void log_cols(std::span<const double> beta, std::span<double> out) const override {
    apply_log(*cols_, beta, mu_.weights(), out);
  }

  double transport(std::span<const double> beta, std::span<const double> gamma) const override {
    std::call_once(cost_once_, [this] {
      const RadialProfile prof = fastsum_cost_kernel(lambda_, cost_);
      const FastsumOptions o = opts_.resolve(mu_.dim(), prof.smooth_at_zero());
      FastsumOptions fixed = o;
      fixed.eps_boundary = opts_.eps_boundary;
      auto kernel = std::make_shared<const RegularizedKernel>(
          prof.rescaled(embedding_.scale), mu_.dim(), fixed.bandwidth, fixed.degree,
          fixed.eps_interior, fixed.eps_boundary);
      cost_plan_ = std::make_unique<FastsumPlan>(kernel, nu_plan_, embedding_.second.coords(),
                                                 mu_plan_, embedding_.first.coords());
    });
    const double sb = lambda_ * max_of(beta);
    const double sg = lambda_ * max_of(gamma);
    std::vector<double> alpha(nu_.size());
    for (std::size_t j = 0; j < nu_.size(); ++j) alpha[j] = std::exp(lambda_ * gamma[j] - sg) * nu_.weight(j);
    const std::vector<double> s = cost_plan_->apply(alpha);
    CompensatedSum acc;
    for (std::size_t i = 0; i < mu_.size(); ++i) {
      acc.add(std::exp(lambda_ * beta[i] - sb) * mu_.weight(i) * s[i]);
    }
    return std::exp(sb + sg) * acc.value();
  }

 private:
  static TorusEmbedding rescale(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                const CostSpec& cost, const FastsumOptions& opts) {
    if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
    if (mu.dim() > 3) throw InputError("accelerated backend supports d <= 3");
    if (cost.norm != Norm::euclidean) throw InputError("accelerated backend requires Euclidean cost");
    const FastsumOptions o = opts.resolve(mu.dim(), true);
    return rescale_pair_to_torus(mu, nu, std::max(kDefaultTorusMargin, o.eps_boundary));
  }

  void apply_log(const FastsumPlan& plan, std::span<const double> pot,
                 std::span<const double> weights, std::span<double> out) const {
    const double lo = lambda_ * *std::min_element(pot.begin(), pot.end());
    const double hi = lambda_ * max_of(pot);
    const double limit = 700.0 - std::log(static_cast<double>(pot.size()));
    if (!(hi - lo <= limit)) {
      throw NumericError("lambda * potential spread exceeds " + std::to_string(limit) +
                         " at lambda = " + std::to_string(lambda_) +
                         "; use a lambda schedule or the dense backend");
    }
    std::vector<double> alpha(pot.size());
    for (std::size_t j = 0; j < pot.size(); ++j) alpha[j] = std::exp(lambda_ * pot[j] - hi) * weights[j];
    const std::vector<double> s = plan.apply(alpha);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!(s[i] > 0.0) || !std::isfinite(s[i])) {
        throw NumericError("fast summation returned a non-positive Gibbs sum at lambda = " +
                           std::to_string(lambda_) + "; increase the bandwidth or use the dense backend");
      }
      out[i] = hi + std::log(s[i]);
    }
  }

  DiscreteMeasure mu_;
  DiscreteMeasure nu_;
  CostSpec cost_;
  TorusEmbedding embedding_;
  FastsumOptions opts_;
  std::shared_ptr<const NfftPlan> mu_plan_;
  std::shared_ptr<const NfftPlan> nu_plan_;
  std::unique_ptr<FastsumPlan> rows_;
  std::unique_ptr<FastsumPlan> cols_;
  mutable std::once_flag cost_once_;
  mutable std::unique_ptr<FastsumPlan> cost_plan_;
};

}  // namespace

std::shared_ptr<const GibbsOperator> make_dense_gibbs(const DiscreteMeasure& mu,
                                                      const DiscreteMeasure& nu,
                                                      const CostSpec& cost, double lambda) {
  if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
  return std::make_shared<const DenseGibbs>(mu, nu, cost, lambda);
}

std::shared_ptr<const GibbsOperator> make_nfft_gibbs(const DiscreteMeasure& mu,
                                                     const DiscreteMeasure& nu,
                                                     const CostSpec& cost, double lambda,
                                                     const FastsumOptions& opts) {
  return std::make_shared<const NfftGibbs>(mu, nu, cost, lambda, opts);
}

}  // namespace otkit::detail

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "otkit/fastsum.hpp"
#include "otkit/measures.hpp"

namespace otkit::detail {

// Products with the Gibbs kernel k_ij = exp(-lambda d_ij^r) in the form the
// Sinkhorn updates need.
class GibbsOperator {
 public:
  virtual ~GibbsOperator() = default;

  double lambda() const { return lambda_; }

  // out_i = log sum_j k_ij exp(lambda gamma_j) nu_j
  virtual void log_rows(std::span<const double> gamma, std::span<double> out) const = 0;
  // out_j = log sum_i k_ij exp(lambda beta_i) mu_i
  virtual void log_cols(std::span<const double> beta, std::span<double> out) const = 0;
  // sum_ij exp(lambda beta_i) mu_i k_ij d_ij^r exp(lambda gamma_j) nu_j
  virtual double transport(std::span<const double> beta, std::span<const double> gamma) const = 0;

 protected:
  explicit GibbsOperator(double lambda) : lambda_(lambda) {}
  double lambda_;
};

std::shared_ptr<const GibbsOperator> make_dense_gibbs(const DiscreteMeasure& mu,
                                                      const DiscreteMeasure& nu,
                                                      const CostSpec& cost, double lambda);

std::shared_ptr<const GibbsOperator> make_nfft_gibbs(const DiscreteMeasure& mu,
                                                     const DiscreteMeasure& nu,
                                                     const CostSpec& cost, double lambda,
                                                     const FastsumOptions& opts);

}  // namespace otkit::detail

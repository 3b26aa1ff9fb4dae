#pragma once

#include <functional>
#include <vector>

#include "otkit/kernels.hpp"
#include "otkit/matrix.hpp"
#include "otkit/measures.hpp"

namespace otkit {

// Scalar convex generator phi on (0, inf) inducing the divergence
// sum_i phi(nu_i/mu_i) mu_i + phi'(1)(mu(X) - nu(X)) - phi(1) mu(X).
struct ConvexGenerator {
  std::function<double(double)> phi;
  double phi_at_1 = 0.0;
  double dphi_at_1 = 0.0;
  // lim_{z -> 0} phi(z); used for atoms with nu_i = 0.
  double phi_at_0 = 0.0;

  static ConvexGenerator kullback_leibler();  // z log z
  static ConvexGenerator chi_squared();       // (z - 1)^2
};

// Requires identical atom lists. Throws InputError on mismatch.
double bregman_divergence(const ConvexGenerator& gen, const DiscreteMeasure& nu,
                          const DiscreteMeasure& mu);

// Weight-vector form of the generalized KL divergence
// sum nu_i log(nu_i/mu_i) + sum mu_i - sum nu_i, with 0 log 0 = 0 and +inf when
// nu_i > 0 = mu_i.
double kl_divergence(std::span<const double> nu, std::span<const double> mu);
double kl_divergence(const DiscreteMeasure& nu, const DiscreteMeasure& mu);

// KL(pi || mu (x) nu) for a dense plan.
double kl_plan_divergence(const Matrix& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct MmdValue {
  double squared = 0.0;      // clamped at 0
  double raw_squared = 0.0;  // before clamping
  double value() const;
};

// Dense MMD^2 from the three kernel quadratic forms, compensated and in fixed
// order. The energy kernel is refused for unequal masses unless `force`.
MmdValue mmd_squared_dense(const RadialKernel& k, const DiscreteMeasure& mu,
                           const DiscreteMeasure& nu, bool force = false);

// sqrt(k(0) (mu(X)^2 + nu(X)^2)); bounded kernels only.
double mmd_elementary_bound(const RadialKernel& k, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu);

struct FastsumOptions;

// MMD^2 through one fast summation over the joint point set with weights
// (mu, -nu). Same energy-kernel rule as the dense variant.
MmdValue mmd_squared_nfft(const RadialKernel& k, const DiscreteMeasure& mu,
                          const DiscreteMeasure& nu, const FastsumOptions& opts, bool force = false);

// Kernel sums s_i = sum_j k~(|z_i - z_j|) w_j over the joint nodes z = (x, x~)
// with weights w = (mu, -nu), where k~ is the fast-summation profile of k
// (|y| for the energy kernel). Used to measure the fast-summation error.
std::vector<double> joint_kernel_sums_nfft(const RadialKernel& k, const DiscreteMeasure& mu,
                                           const DiscreteMeasure& nu, const FastsumOptions& opts);
std::vector<double> joint_kernel_sums_dense(const RadialKernel& k, const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu);

}  // namespace otkit

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "otkit/divergences.hpp"
#include "otkit/kernels.hpp"
#include "otkit/sinkhorn.hpp"

namespace otkit {

// Scaled-plan upper bound: the best constant c* for plans c * pi, with the
// restricted objective evaluated at c*/2, c* and 2c*.
struct BoundReport {
  double c_star = 0.0;
  double objective_at_c_star = 0.0;
  double objective_at_half = 0.0;
  double objective_at_double = 0.0;
  double transport_term = 0.0;
  double mass_mu = 0.0;
  double mass_nu = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  std::optional<double> lambda;

  bool local_minimum_certified(double slack = 1e-12) const;
};

// <mu (x) nu, d^r>. Exact O(n d) for Euclidean r = 2, fast summation with |y|
// for Euclidean r = 1 on the nfft backend, dense otherwise.
double product_transport_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              const CostSpec& cost, Backend backend = Backend::dense);

// Restricted objective over plans c * pi with pi a coupling of mu/mu(X) and
// nu/nu(X) and transport term t = <pi, d^r>.
double restricted_objective_uot(double c, double transport_term, double mass_mu, double mass_nu,
                                double eta1, double eta2);
// Restricted regularized objective over plans c * (mu x nu), t = <mu x nu, d^r>.
double restricted_objective_uot_reg(double c, double transport_term, double mass_mu,
                                    double mass_nu, double eta1, double eta2, double lambda);

// c* = exp(-t/(eta1+eta2)) mu(X)^{eta1/(eta1+eta2)} nu(X)^{eta2/(eta1+eta2)}.
// Reference coupling: P (x) Q unless `plan` (n x m, total mass 1) is given.
BoundReport upper_bound_constant_uot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     const CostSpec& cost, double eta1, double eta2,
                                     const Matrix* plan = nullptr,
                                     Backend backend = Backend::dense);

// c* = exp(-t/(mu(X) nu(X) s)) mu(X)^{-eta2/s} nu(X)^{-eta1/s}, s = eta1 + eta2 + 1/lambda.
BoundReport upper_bound_constant_uot_reg(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                         const CostSpec& cost, double eta1, double eta2,
                                         double lambda, Backend backend = Backend::dense);
double c_star_regularized(double transport_term, double mass_mu, double mass_nu, double eta1,
                          double eta2, double lambda);

// Inequality record: rhs - lhs = gap, plus the ingredients.
struct HolderReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double transport_value = 0.0;  // w_r, or the UOT surrogate value
  double plan_mass = 0.0;        // u*
  double mmd_mu_marginal = 0.0;  // MMD(mu, mu*)
  double mmd_nu_marginal = 0.0;  // MMD(nu, nu*)
  double alpha = 0.0;
  double holder_c = 0.0;
};

// Settings for the regularized surrogate of unregularized UOT values.
struct SurrogateSettings {
  double lambda = 200.0;
  std::vector<double> schedule{1.0, 20.0, 200.0};
  double tol = 1e-10;
  int max_iter = 20000;
  Backend backend = Backend::dense;
};

// Unregularized objective <pi, d^r> + eta1 KL(pi_1||mu) + eta2 KL(pi_2||nu) at
// the converged regularized plan; an upper bound for the unregularized value.
double unregularized_uot_estimate(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const CostSpec& cost, double eta1, double eta2,
                                  const SurrogateSettings& surrogate = {});

// Wasserstein-based upper bound for UOT: rhs is
// u w_r(P,Q) + eta1 KL(P||mu) + eta2 KL(Q||nu) with u = mu(X) nu(X); lhs is the
// regularized surrogate. d must be 1 unless `w_r` is supplied.
HolderReport wasserstein_bound_uot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   const CostSpec& cost, double eta1, double eta2,
                                   const SurrogateSettings& surrogate = {},
                                   std::optional<double> w_r = std::nullopt);

// KL(P || mu) for P = mu / mu(X): -log mu(X) + mu(X) - 1.
double normalized_kl(double mass);

// Second assertion for probability measures: w_r(P,Q) * UOT(P,Q) <= ||d^r||_F^2.
struct FrobeniusReport {
  double w_r = 0.0;
  double uot = 0.0;
  double frobenius_squared = 0.0;
  double lhs = 0.0;
  double gap = 0.0;
};
FrobeniusReport frobenius_bound(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                const CostSpec& cost, double eta1, double eta2,
                                const SurrogateSettings& surrogate = {});

// MMD_k(P,Q) <= c W_{2 alpha}(P,Q)^alpha = c w_{2 alpha}(P,Q)^{1/2}, exact 1-D w.
HolderReport holder_check_balanced(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                   const RadialKernel& k);

// MMD_k(mu,nu) <= c sqrt(u* UOT) + MMD_k(mu,mu*) + MMD_k(nu,nu*) with UOT the
// surrogate for UOT_{2 alpha; eta/c^2} and mu*, nu*, u* taken from its plan.
HolderReport holder_check_unbalanced(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     const RadialKernel& k, double eta,
                                     const SurrogateSettings& surrogate = {});

struct SweepRow {
  double eta = 0.0;
  double sd = 0.0;
  double mmd_energy = 0.0;   // MMD_{k^e}(P, P~)
  double limit = 0.0;        // MMD_{k^e}^2 / 2, the small-lambda limit of sd
  double difference = 0.0;   // |sd - limit|
};

// Debiased UOT with r = 1 against the energy distance, one row per eta.
std::vector<SweepRow> convergence_sweep_energy(const DiscreteMeasure& p,
                                               const DiscreteMeasure& ptilde, double lambda,
                                               const std::vector<double>& etas,
                                               Backend backend = Backend::dense,
                                               double tol = 1e-12, int max_iter = 100000);

// Summary of repeated Holder checks on seeded uniform samples on [0,1].
struct HolderTrialSummary {
  std::size_t trials = 0;
  double mean_gap = 0.0;
  double min_gap = 0.0;
  double max_gap = 0.0;
  std::size_t violations = 0;
  std::vector<double> gaps;
};

// balanced: probability samples of size n;
// unbalanced: uniform weights in (0,1].
HolderTrialSummary holder_trials(const RadialKernel& k, std::size_t n, std::size_t trials,
                                 std::uint64_t seed, bool unbalanced, double eta,
                                 double violation_tol, const SurrogateSettings& surrogate = {});

}  // namespace otkit

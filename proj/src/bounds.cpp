#include "otkit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>

#include "otkit/error.hpp"
#include "otkit/fastsum.hpp"
#include "otkit/parallel.hpp"
#include "otkit/rng.hpp"

namespace otkit {

bool BoundReport::local_minimum_certified(double slack) const {
  const double tol = slack * std::max(1.0, std::abs(objective_at_c_star));
  return objective_at_c_star <= objective_at_half + tol &&
         objective_at_c_star <= objective_at_double + tol;
}

double product_transport_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              const CostSpec& cost, Backend backend) {
  if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
  validate(cost);
  const int d = mu.dim();
  const double mass_mu = total_mass(mu);
  const double mass_nu = total_mass(nu);
  if (cost.norm == Norm::euclidean && cost.exponent == 2.0) {
    // expand around the mu-barycentre, where the cross term vanishes
    std::vector<double> bar(static_cast<std::size_t>(d), 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (int t = 0; t < d; ++t) bar[t] += mu.weight(i) * mu.point(i)[t];
    for (double& b : bar) b /= mass_mu;
    CompensatedSum a;
    CompensatedSum b;
    for (std::size_t i = 0; i < mu.size(); ++i) a.add(mu.weight(i) * cost_value(mu.point(i), bar, cost));
    for (std::size_t j = 0; j < nu.size(); ++j) b.add(nu.weight(j) * cost_value(nu.point(j), bar, cost));
    return mass_nu * a.value() + mass_mu * b.value();
  }
  if (backend == Backend::nfft && cost.norm == Norm::euclidean && cost.exponent == 1.0 && d <= 3) {
    const RadialProfile prof = RadialProfile::from_kernel(RadialKernel::energy());
    const FastsumOptions o = FastsumOptions{}.resolve(d, false);
    const TorusEmbedding emb = rescale_pair_to_torus(mu, nu, std::max(kDefaultTorusMargin, o.eps_boundary));
    auto kernel = std::make_shared<const RegularizedKernel>(prof.rescaled(emb.scale), d, o.bandwidth,
                                                            o.degree, o.eps_interior, o.eps_boundary);
    const FastsumPlan plan(kernel, emb.second.coords(), emb.first.coords(), o.nfft);
    const std::vector<double> s = plan.apply(nu.weights());
    CompensatedSum acc;
    for (std::size_t i = 0; i < mu.size(); ++i) acc.add(mu.weight(i) * s[i]);
    return acc.value();
  }
  std::vector<double> rows(mu.size());
  const auto n = static_cast<std::ptrdiff_t>(mu.size());
#pragma omp parallel for num_threads(thread_count()) schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    CompensatedSum s;
    for (std::size_t j = 0; j < nu.size(); ++j) s.add(nu.weight(j) * cost_value(mu.point(i), nu.point(j), cost));
    rows[i] = mu.weight(i) * s.value();
  }
  return compensated_sum(rows);
}

double restricted_objective_uot(double c, double transport_term, double mass_mu, double mass_nu,
                                double eta1, double eta2) {
  if (!(c >= 0.0)) throw InputError("scale c must be >= 0");
  const auto xlogx = [](double c, double m) { return c > 0.0 ? c * std::log(c / m) : 0.0; };
  return c * transport_term + eta1 * (xlogx(c, mass_mu) + mass_mu - c) +
         eta2 * (xlogx(c, mass_nu) + mass_nu - c);
}

double restricted_objective_uot_reg(double c, double transport_term, double mass_mu,
                                    double mass_nu, double eta1, double eta2, double lambda) {
  if (!(c >= 0.0)) throw InputError("scale c must be >= 0");
  const double u = mass_mu * mass_nu;
  const double clogc = c > 0.0 ? c * std::log(c) : 0.0;
  const auto kl = [&](double other) { return c > 0.0 ? c * u * std::log(c * other) : 0.0; };
  return c * transport_term + u / lambda * (clogc - c + 1.0) +
         eta1 * (kl(mass_nu) + mass_mu - c * u) + eta2 * (kl(mass_mu) + mass_nu - c * u);
}

BoundReport upper_bound_constant_uot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     const CostSpec& cost, double eta1, double eta2,
                                     const Matrix* plan, Backend backend) {
  if (!(eta1 >= 0.0 && eta2 >= 0.0 && eta1 + eta2 > 0.0)) throw InputError("need eta1 + eta2 > 0");
  BoundReport rep;
  rep.mass_mu = total_mass(mu);
  rep.mass_nu = total_mass(nu);
  rep.eta1 = eta1;
  rep.eta2 = eta2;
  if (plan) {
    if (plan->rows() != mu.size() || plan->cols() != nu.size()) throw InputError("plan shape mismatch");
    CompensatedSum s;
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = 0; j < nu.size(); ++j) s.add((*plan)(i, j) * cost_value(mu.point(i), nu.point(j), cost));
    rep.transport_term = s.value();
  } else {
    rep.transport_term = product_transport_cost(mu, nu, cost, backend) / (rep.mass_mu * rep.mass_nu);
  }
  const double e = eta1 + eta2;
  rep.c_star = std::exp(-rep.transport_term / e + eta1 / e * std::log(rep.mass_mu) +
                        eta2 / e * std::log(rep.mass_nu));
  auto f = [&](double c) {
    return restricted_objective_uot(c, rep.transport_term, rep.mass_mu, rep.mass_nu, eta1, eta2);
  };
  rep.objective_at_c_star = f(rep.c_star);
  rep.objective_at_half = f(0.5 * rep.c_star);
  rep.objective_at_double = f(2.0 * rep.c_star);
  return rep;
}

double c_star_regularized(double transport_term, double mass_mu, double mass_nu, double eta1,
                          double eta2, double lambda) {
  const double s = eta1 + eta2 + 1.0 / lambda;
  return std::exp(-transport_term / (mass_mu * mass_nu * s) - eta2 / s * std::log(mass_mu) -
                  eta1 / s * std::log(mass_nu));
}

BoundReport upper_bound_constant_uot_reg(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                         const CostSpec& cost, double eta1, double eta2,
                                         double lambda, Backend backend) {
  if (!(lambda > 0.0)) throw InputError("lambda must be > 0");
  if (!(eta1 >= 0.0 && eta2 >= 0.0)) throw InputError("eta must be >= 0");
  BoundReport rep;
  rep.mass_mu = total_mass(mu);
  rep.mass_nu = total_mass(nu);
  rep.eta1 = eta1;
  rep.eta2 = eta2;
  rep.lambda = lambda;
  rep.transport_term = product_transport_cost(mu, nu, cost, backend);
  rep.c_star = c_star_regularized(rep.transport_term, rep.mass_mu, rep.mass_nu, eta1, eta2, lambda);
  auto f = [&](double c) {
    return restricted_objective_uot_reg(c, rep.transport_term, rep.mass_mu, rep.mass_nu, eta1, eta2,
                                        lambda);
  };
  rep.objective_at_c_star = f(rep.c_star);
  rep.objective_at_half = f(0.5 * rep.c_star);
  rep.objective_at_double = f(2.0 * rep.c_star);
  return rep;
}

double normalized_kl(double mass) {
  if (!(mass > 0.0)) throw InputError("mass must be > 0");
  return -std::log(mass) + mass - 1.0;
}

namespace {

// Unregularized objective <pi, d^r> + eta1 KL(pi_1||mu) + eta2 KL(pi_2||nu) at
// the plan of a regularized solve; an upper bound for the unregularized value.
struct Surrogate {
  double value = 0.0;
  double transport = 0.0;
  PlanMarginals marginals;
};

Surrogate surrogate_uot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& cost,
                        double eta1, double eta2, const SurrogateSettings& s) {
  SinkhornConfig cfg;
  cfg.r = cost.exponent;
  cfg.lambda = s.lambda;
  cfg.eta1 = eta1;
  cfg.eta2 = eta2;
  cfg.tol = s.tol;
  cfg.max_iter = s.max_iter;
  cfg.lambda_schedule = s.schedule;
  if (!cfg.lambda_schedule.empty() && cfg.lambda_schedule.back() != cfg.lambda) {
    throw InputError("surrogate schedule must end at its lambda");
  }
  const UotProblem prob(mu, nu, cost, s.backend);
  const SinkhornResult res = prob.solve(cfg);
  if (!res.stats.converged) throw NumericError("surrogate UOT solve did not converge");
  Surrogate out;
  out.marginals = prob.marginals(res.potentials, cfg.lambda);
  out.transport = prob.transport_cost(res.potentials, cfg.lambda);
  out.value = out.transport + eta1 * kl_divergence(out.marginals.first, mu.weights()) +
              eta2 * kl_divergence(out.marginals.second, nu.weights());
  return out;
}

}  // namespace

double unregularized_uot_estimate(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const CostSpec& cost, double eta1, double eta2,
                                  const SurrogateSettings& surrogate) {
  return surrogate_uot(mu, nu, cost, eta1, eta2, surrogate).value;
}

HolderReport wasserstein_bound_uot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   const CostSpec& cost, double eta1, double eta2,
                                   const SurrogateSettings& surrogate, std::optional<double> w_r) {
  HolderReport rep;
  const double mass_mu = total_mass(mu);
  const double mass_nu = total_mass(nu);
  if (!w_r) w_r = exact_wasserstein_1d(normalize(mu), normalize(nu), cost.exponent);
  const double u = mass_mu * mass_nu;
  rep.rhs = u * *w_r + eta1 * normalized_kl(mass_mu) + eta2 * normalized_kl(mass_nu);
  rep.lhs = surrogate_uot(mu, nu, cost, eta1, eta2, surrogate).value;
  rep.gap = rep.rhs - rep.lhs;
  rep.transport_value = *w_r;
  rep.plan_mass = u;
  return rep;
}

FrobeniusReport frobenius_bound(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                const CostSpec& cost, double eta1, double eta2,
                                const SurrogateSettings& surrogate) {
  FrobeniusReport rep;
  rep.w_r = exact_wasserstein_1d(p, q, cost.exponent);
  rep.uot = surrogate_uot(p, q, cost, eta1, eta2, surrogate).value;
  const Matrix c = pairwise_cost(p, q, cost);
  CompensatedSum f;
  for (double x : c.data()) f.add(x * x);
  rep.frobenius_squared = f.value();
  rep.lhs = rep.w_r * rep.uot;
  rep.gap = rep.frobenius_squared - rep.lhs;
  return rep;
}

HolderReport holder_check_balanced(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                   const RadialKernel& k) {
  const HolderConstants hc = holder_constants(k);
  HolderReport rep;
  rep.alpha = hc.alpha;
  rep.holder_c = hc.c;
  rep.lhs = mmd_squared_dense(k, p, q).value();
  rep.transport_value = exact_wasserstein_1d(p, q, 2.0 * hc.alpha);
  rep.plan_mass = total_mass(p);
  rep.rhs = hc.c * std::sqrt(rep.transport_value);
  rep.gap = rep.rhs - rep.lhs;
  return rep;
}

HolderReport holder_check_unbalanced(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     const RadialKernel& k, double eta,
                                     const SurrogateSettings& surrogate) {
  if (k.kind() == KernelKind::energy) {
    throw InputError("the unbalanced Holder check needs a positive definite kernel");
  }
  if (!(eta > 0.0)) throw InputError("eta must be > 0");
  const HolderConstants hc = holder_constants(k);
  const double eta_scaled = eta / (hc.c * hc.c);
  const CostSpec cost{Norm::euclidean, 2.0 * hc.alpha};
  const Surrogate s = surrogate_uot(mu, nu, cost, eta_scaled, eta_scaled, surrogate);
  const DiscreteMeasure mu_star = mu.with_weights(s.marginals.first);
  const DiscreteMeasure nu_star = nu.with_weights(s.marginals.second);
  HolderReport rep;
  rep.alpha = hc.alpha;
  rep.holder_c = hc.c;
  rep.transport_value = s.value;
  rep.plan_mass = std::sqrt(s.marginals.mass_first() * s.marginals.mass_second());
  rep.mmd_mu_marginal = mmd_squared_dense(k, mu, mu_star).value();
  rep.mmd_nu_marginal = mmd_squared_dense(k, nu, nu_star).value();
  rep.lhs = mmd_squared_dense(k, mu, nu).value();
  rep.rhs = hc.c * std::sqrt(rep.plan_mass * s.value) + rep.mmd_mu_marginal + rep.mmd_nu_marginal;
  rep.gap = rep.rhs - rep.lhs;
  return rep;
}

std::vector<SweepRow> convergence_sweep_energy(const DiscreteMeasure& p,
                                               const DiscreteMeasure& ptilde, double lambda,
                                               const std::vector<double>& etas, Backend backend,
                                               double tol, int max_iter) {
  if (p.dim() != ptilde.dim()) throw InputError("dimension mismatch");
  for (std::size_t i = 1; i < etas.size(); ++i) {
    if (!(etas[i] > etas[i - 1])) throw InputError("eta list must be strictly increasing");
  }
  const MmdValue mmd = mmd_squared_dense(RadialKernel::energy(), p, ptilde, true);
  const CostSpec cost{Norm::euclidean, 1.0};
  std::vector<SweepRow> rows;
  for (double eta : etas) {
    SinkhornConfig cfg;
    cfg.r = 1.0;
    cfg.lambda = lambda;
    cfg.eta1 = eta;
    cfg.eta2 = eta;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    SweepRow row;
    row.eta = eta;
    row.sd = sinkhorn_divergence(p, ptilde, cost, cfg, backend);
    row.mmd_energy = mmd.value();
    row.limit = 0.5 * mmd.squared;
    row.difference = std::abs(row.sd - row.limit);
    rows.push_back(row);
  }
  return rows;
}

HolderTrialSummary holder_trials(const RadialKernel& k, std::size_t n, std::size_t trials,
                                 std::uint64_t seed, bool unbalanced, double eta,
                                 double violation_tol, const SurrogateSettings& surrogate) {
  HolderTrialSummary sum;
  sum.trials = trials;
  sum.gaps.assign(trials, 0.0);
  std::vector<std::exception_ptr> errors(trials);
  const auto count = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for num_threads(thread_count()) schedule(dynamic)
  for (std::ptrdiff_t tt = 0; tt < count; ++tt) {
    const auto t = static_cast<std::size_t>(tt);
    try {
      const std::uint64_t s = CounterRng::derive(seed, t);
      const WeightMode mode = unbalanced ? WeightMode::unbalanced : WeightMode::probability;
      const DiscreteMeasure a = sample_uniform(n, 1, mode, CounterRng::derive(s, 0));
      const DiscreteMeasure b = sample_uniform(n, 1, mode, CounterRng::derive(s, 1));
      sum.gaps[t] = unbalanced ? holder_check_unbalanced(a, b, k, eta, surrogate).gap
                               : holder_check_balanced(a, b, k).gap;
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  if (trials > 0) {
    sum.mean_gap = compensated_sum(sum.gaps) / static_cast<double>(trials);
    sum.min_gap = *std::min_element(sum.gaps.begin(), sum.gaps.end());
    sum.max_gap = *std::max_element(sum.gaps.begin(), sum.gaps.end());
  }
  for (double g : sum.gaps) {
    if (g < -violation_tol) ++sum.violations;
  }
  return sum;
}

}  // namespace otkit

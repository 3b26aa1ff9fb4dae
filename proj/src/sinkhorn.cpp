#include "otkit/sinkhorn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "gibbs_operator.hpp"
#include "otkit/bounds.hpp"
#include "otkit/divergences.hpp"
#include "otkit/error.hpp"
#include "otkit/parallel.hpp"

namespace otkit {

std::string to_string(Backend b) { return b == Backend::dense ? "dense" : "nfft"; }

Backend parse_backend(const std::string& name) {
  if (name == "dense") return Backend::dense;
  if (name == "nfft") return Backend::nfft;
  throw InputError("unknown backend '" + name + "' (dense, nfft)");
}

void validate(const SinkhornConfig& cfg, const CostSpec& cost, Backend backend) {
  validate(cost);
  if (cfg.r != cost.exponent) throw InputError("config order r differs from the cost exponent");
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) throw InputError("lambda must be > 0");
  if (!(cfg.eta1 > 0.0) || !(cfg.eta2 > 0.0) || !std::isfinite(cfg.eta1) || !std::isfinite(cfg.eta2)) {
    throw InputError("eta1 and eta2 must be > 0");
  }
  if (!(cfg.tol > 0.0)) throw InputError("tol must be > 0");
  if (cfg.max_iter < 0) throw InputError("max_iter must be >= 0");
  const auto& s = cfg.lambda_schedule;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0) || (i > 0 && !(s[i] > s[i - 1]))) {
      throw InputError("lambda schedule must be positive and strictly increasing");
    }
  }
  if (!s.empty() && s.back() != cfg.lambda) throw InputError("lambda schedule must end at lambda");
  if (backend == Backend::nfft) {
    if (cost.norm != Norm::euclidean) throw InputError("nfft backend requires the Euclidean norm");
    if (cost.exponent != 1.0 && cost.exponent != 2.0) throw InputError("nfft backend supports r = 1 or 2");
    if (cfg.lambda > kMaxAcceleratedLambda) throw InputError("nfft backend supports lambda <= 200");
  }
}

double PlanMarginals::mass_first() const { return compensated_sum(first); }
double PlanMarginals::mass_second() const { return compensated_sum(second); }

UotProblem::UotProblem(DiscreteMeasure mu, DiscreteMeasure nu, CostSpec cost, Backend backend,
                       FastsumOptions fastsum)
    : mu_(std::move(mu)), nu_(std::move(nu)), cost_(cost), backend_(backend), fastsum_(fastsum) {
  validate(cost_);
  if (mu_.dim() != nu_.dim()) throw InputError("dimension mismatch between mu and nu");
  if (backend_ == Backend::nfft) {
    if (mu_.dim() > 3) throw InputError("nfft backend supports d <= 3");
    if (cost_.norm != Norm::euclidean) throw InputError("nfft backend requires the Euclidean norm");
    if (cost_.exponent != 1.0 && cost_.exponent != 2.0) throw InputError("nfft backend supports r = 1 or 2");
  }
}

UotProblem::~UotProblem() = default;

UotProblem::UotProblem(UotProblem&& o) noexcept
    : mu_(std::move(o.mu_)),
      nu_(std::move(o.nu_)),
      cost_(o.cost_),
      backend_(o.backend_),
      fastsum_(o.fastsum_),
      cache_(std::move(o.cache_)) {}

UotProblem& UotProblem::operator=(UotProblem&& o) noexcept {
  if (this != &o) {
    mu_ = std::move(o.mu_);
    nu_ = std::move(o.nu_);
    cost_ = o.cost_;
    backend_ = o.backend_;
    fastsum_ = o.fastsum_;
    std::scoped_lock lock(mutex_);
    cache_ = std::move(o.cache_);
  }
  return *this;
}

const detail::GibbsOperator& UotProblem::gibbs(double lambda) const {
  std::scoped_lock lock(mutex_);
  auto it = cache_.find(lambda);
  if (it == cache_.end()) {
    auto op = backend_ == Backend::dense ? detail::make_dense_gibbs(mu_, nu_, cost_, lambda)
                                         : detail::make_nfft_gibbs(mu_, nu_, cost_, lambda, fastsum_);
    it = cache_.emplace(lambda, std::move(op)).first;
  }
  return *it->second;
}

namespace {

double sup_change(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void update_beta(const detail::GibbsOperator& op, double eta1, const std::vector<double>& gamma,
                 std::vector<double>& beta) {
  op.log_rows(gamma, beta);
  const double f = -eta1 / (1.0 + eta1 * op.lambda());
  for (double& b : beta) b *= f;
}

void update_gamma(const detail::GibbsOperator& op, double eta2, const std::vector<double>& beta,
                  std::vector<double>& gamma) {
  op.log_cols(beta, gamma);
  const double f = -eta2 / (1.0 + eta2 * op.lambda());
  for (double& g : gamma) g *= f;
}

}  // namespace

SolveStats UotProblem::run_stage(const SinkhornConfig& cfg, double lambda, DualPotentials& pots) const {
  const detail::GibbsOperator& op = gibbs(lambda);
  SinkhornConfig at = cfg;
  at.lambda = lambda;
  SolveStats st;
  st.backend = backend_;
  if (cfg.record_dual_trace) st.dual_trace.push_back(dual_objective(pots, at));
  std::vector<double> beta(mu_.size());
  std::vector<double> gamma(nu_.size());
  for (int it = 0; it < cfg.max_iter; ++it) {
    update_beta(op, cfg.eta1, pots.gamma, beta);
    if (cfg.record_dual_trace) st.dual_trace.push_back(dual_objective({beta, pots.gamma}, at));
    update_gamma(op, cfg.eta2, beta, gamma);
    const double change = std::max(sup_change(beta, pots.beta), sup_change(gamma, pots.gamma));
    pots.beta.swap(beta);
    pots.gamma.swap(gamma);
    if (cfg.record_dual_trace) st.dual_trace.push_back(dual_objective(pots, at));
    st.iterations = it + 1;
    st.final_change = change;
    if (!std::isfinite(change)) {
      throw NumericError("non-finite potentials at lambda = " + std::to_string(lambda));
    }
    if (change < cfg.tol) {
      st.converged = true;
      break;
    }
  }
  return st;
}

SinkhornResult UotProblem::solve(const SinkhornConfig& cfg, const DualPotentials* warm_start) const {
  validate(cfg, cost_, backend_);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> stages = cfg.lambda_schedule;
  if (stages.empty()) stages.push_back(cfg.lambda);
  if (backend_ == Backend::nfft) {
    for (double l : stages) {
      if (l > kMaxAcceleratedLambda) throw InputError("nfft backend supports lambda <= 200");
    }
  }
  SinkhornResult res;
  DualPotentials& pots = res.potentials;
  if (warm_start) {
    if (warm_start->beta.size() != mu_.size() || warm_start->gamma.size() != nu_.size()) {
      throw InputError("warm start has the wrong length");
    }
    pots = *warm_start;
  } else {
    pots.beta.assign(mu_.size(), 0.0);
    double g0 = 0.0;
    if (cfg.init == Init::upper_bound) {
      const double t = product_transport_cost(mu_, nu_, cost_, backend_);
      g0 = c_star_regularized(t, total_mass(mu_), total_mass(nu_), cfg.eta1, cfg.eta2, stages.front());
    }
    pots.gamma.assign(nu_.size(), g0);
  }
  res.stats.backend = backend_;
  for (double lambda : stages) {
    SolveStats st = run_stage(cfg, lambda, pots);
    res.stats.iterations += st.iterations;
    res.stats.final_change = st.final_change;
    res.stats.converged = st.converged || cfg.max_iter == 0;
    res.stats.stage_lambdas.push_back(lambda);
    res.stats.stage_iterations.push_back(st.iterations);
    res.stats.dual_trace.insert(res.stats.dual_trace.end(), st.dual_trace.begin(), st.dual_trace.end());
  }
  res.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

PlanMarginals UotProblem::marginals(const DualPotentials& pots, double lambda) const {
  const detail::GibbsOperator& op = gibbs(lambda);
  PlanMarginals m;
  m.first.resize(mu_.size());
  m.second.resize(nu_.size());
  op.log_rows(pots.gamma, m.first);
  op.log_cols(pots.beta, m.second);
  for (std::size_t i = 0; i < mu_.size(); ++i) {
    m.first[i] = mu_.weight(i) * std::exp(lambda * pots.beta[i] + m.first[i]);
  }
  for (std::size_t j = 0; j < nu_.size(); ++j) {
    m.second[j] = nu_.weight(j) * std::exp(lambda * pots.gamma[j] + m.second[j]);
  }
  return m;
}

double UotProblem::dual_objective(const DualPotentials& pots, const SinkhornConfig& cfg) const {
  const detail::GibbsOperator& op = gibbs(cfg.lambda);
  std::vector<double> lr(mu_.size());
  op.log_rows(pots.gamma, lr);
  const double mass_mu = total_mass(mu_);
  const double mass_nu = total_mass(nu_);
  CompensatedSum s;
  CompensatedSum plan_mass;
  for (std::size_t i = 0; i < mu_.size(); ++i) {
    s.add(-cfg.eta1 * std::exp(-pots.beta[i] / cfg.eta1) * mu_.weight(i));
    plan_mass.add(mu_.weight(i) * std::exp(cfg.lambda * pots.beta[i] + lr[i]));
  }
  for (std::size_t j = 0; j < nu_.size(); ++j) {
    s.add(-cfg.eta2 * std::exp(-pots.gamma[j] / cfg.eta2) * nu_.weight(j));
  }
  s.add(cfg.eta1 * mass_mu);
  s.add(cfg.eta2 * mass_nu);
  s.add(-(plan_mass.value() - mass_mu * mass_nu) / cfg.lambda);
  return s.value();
}

double UotProblem::primal_objective(const DualPotentials& pots, const SinkhornConfig& cfg) const {
  // with log(pi_ij / (mu_i nu_j)) = lambda (beta_i + gamma_j - d_ij^r) the
  // transport term cancels against the entropy
  const PlanMarginals m = marginals(pots, cfg.lambda);
  const double mass = m.mass_first();
  CompensatedSum s;
  for (std::size_t i = 0; i < mu_.size(); ++i) s.add(m.first[i] * pots.beta[i]);
  for (std::size_t j = 0; j < nu_.size(); ++j) s.add(m.second[j] * pots.gamma[j]);
  s.add((total_mass(mu_) * total_mass(nu_) - mass) / cfg.lambda);
  s.add(cfg.eta1 * kl_divergence(m.first, mu_.weights()));
  s.add(cfg.eta2 * kl_divergence(m.second, nu_.weights()));
  return s.value();
}

double UotProblem::transport_cost(const DualPotentials& pots, double lambda) const {
  return gibbs(lambda).transport(pots.beta, pots.gamma);
}

DualPotentials UotProblem::sweep(const DualPotentials& pots, const SinkhornConfig& cfg) const {
  const detail::GibbsOperator& op = gibbs(cfg.lambda);
  DualPotentials out{std::vector<double>(mu_.size()), std::vector<double>(nu_.size())};
  update_beta(op, cfg.eta1, pots.gamma, out.beta);
  update_gamma(op, cfg.eta2, out.beta, out.gamma);
  return out;
}

SinkhornResult sinkhorn_uot_dense(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const CostSpec& cost, const SinkhornConfig& cfg) {
  return UotProblem(mu, nu, cost, Backend::dense, cfg.fastsum).solve(cfg);
}

SinkhornResult sinkhorn_uot_nfft(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const CostSpec& cost, const SinkhornConfig& cfg) {
  return UotProblem(mu, nu, cost, Backend::nfft, cfg.fastsum).solve(cfg);
}

SinkhornResult sinkhorn_uot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            const CostSpec& cost, const SinkhornConfig& cfg, Backend backend) {
  return UotProblem(mu, nu, cost, backend, cfg.fastsum).solve(cfg);
}

SinkhornResult lambda_scaled_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   const CostSpec& cost, const SinkhornConfig& cfg,
                                   Backend backend) {
  if (cfg.lambda_schedule.empty()) throw InputError("lambda scaling needs a schedule");
  return sinkhorn_uot(mu, nu, cost, cfg, backend);
}

TransportPlan recover_plan_dense(const DualPotentials& pots, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, const CostSpec& cost,
                                 const SinkhornConfig& cfg) {
  if (pots.beta.size() != mu.size() || pots.gamma.size() != nu.size()) {
    throw InputError("potentials do not match the measures");
  }
  TransportPlan plan{Matrix(mu.size(), nu.size())};
  const double lambda = cfg.lambda;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const double c = cost_value(mu.point(i), nu.point(j), cost);
      const double v =
          std::exp(lambda * (pots.beta[i] + pots.gamma[j] - c)) * mu.weight(i) * nu.weight(j);
      if (!std::isfinite(v)) {
        throw NumericError("plan entry overflows at lambda = " + std::to_string(lambda));
      }
      plan.pi(i, j) = v;
    }
  }
  return plan;
}

PlanMarginals marginals(const TransportPlan& plan) {
  PlanMarginals m;
  m.first.assign(plan.pi.rows(), 0.0);
  m.second.assign(plan.pi.cols(), 0.0);
  for (std::size_t i = 0; i < plan.pi.rows(); ++i) {
    CompensatedSum s;
    for (std::size_t j = 0; j < plan.pi.cols(); ++j) {
      s.add(plan.pi(i, j));
      m.second[j] += plan.pi(i, j);
    }
    m.first[i] = s.value();
  }
  return m;
}

PlanMarginals marginals(const DualPotentials& pots, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, const CostSpec& cost,
                        const SinkhornConfig& cfg, Backend backend) {
  return UotProblem(mu, nu, cost, backend, cfg.fastsum).marginals(pots, cfg.lambda);
}

double primal_objective(const TransportPlan& plan, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, const CostSpec& cost,
                        const SinkhornConfig& cfg) {
  const PlanMarginals m = marginals(plan);
  CompensatedSum s;
  s.add(transport_cost(plan, mu, nu, cost));
  s.add(kl_plan_divergence(plan.pi, mu, nu) / cfg.lambda);
  s.add(cfg.eta1 * kl_divergence(m.first, mu.weights()));
  s.add(cfg.eta2 * kl_divergence(m.second, nu.weights()));
  return s.value();
}

double dual_objective(const DualPotentials& pots, const DiscreteMeasure& mu,
                      const DiscreteMeasure& nu, const CostSpec& cost, const SinkhornConfig& cfg,
                      Backend backend) {
  return UotProblem(mu, nu, cost, backend, cfg.fastsum).dual_objective(pots, cfg);
}

double transport_cost(const TransportPlan& plan, const DiscreteMeasure& mu,
                      const DiscreteMeasure& nu, const CostSpec& cost) {
  if (plan.pi.rows() != mu.size() || plan.pi.cols() != nu.size()) throw InputError("plan shape mismatch");
  CompensatedSum s;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      s.add(plan.pi(i, j) * cost_value(mu.point(i), nu.point(j), cost));
    }
  }
  return s.value();
}

double transport_cost(const DualPotentials& pots, const DiscreteMeasure& mu,
                      const DiscreteMeasure& nu, const CostSpec& cost, const SinkhornConfig& cfg,
                      Backend backend) {
  return UotProblem(mu, nu, cost, backend, cfg.fastsum).transport_cost(pots, cfg.lambda);
}

double uot_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& cost,
                 const SinkhornConfig& cfg, Backend backend) {
  const UotProblem prob(mu, nu, cost, backend, cfg.fastsum);
  const SinkhornResult res = prob.solve(cfg);
  return prob.primal_objective(res.potentials, cfg);
}

double sinkhorn_divergence(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           const CostSpec& cost, const SinkhornConfig& cfg, Backend backend) {
  const double uv = uot_value(mu, nu, cost, cfg, backend);
  const double uu = uot_value(mu, mu, cost, cfg, backend);
  const double vv = uot_value(nu, nu, cost, cfg, backend);
  const double dm = total_mass(mu) - total_mass(nu);
  return uv - 0.5 * uu - 0.5 * vv + dm * dm / (2.0 * cfg.lambda);
}

double residual_dual(const DualPotentials& reference, const DualPotentials& test) {
  if (reference.beta.size() != test.beta.size() || reference.gamma.size() != test.gamma.size()) {
    throw InputError("potential lengths differ");
  }
  auto rel = [](const std::vector<double>& ref, const std::vector<double>& t) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      num += (t[i] - ref[i]) * (t[i] - ref[i]);
      den += ref[i] * ref[i];
    }
    if (den == 0.0) throw InputError("reference potential has zero norm");
    return std::sqrt(num / den);
  };
  return rel(reference.beta, test.beta) + rel(reference.gamma, test.gamma);
}

double exact_wasserstein_1d(const DiscreteMeasure& p, const DiscreteMeasure& q, double r) {
  if (p.dim() != 1 || q.dim() != 1) throw InputError("exact Wasserstein distance needs d = 1");
  if (!(r >= 1.0)) throw InputError("r must be >= 1");
  const double mp = total_mass(p);
  const double mq = total_mass(q);
  if (std::abs(mp - mq) > 1e-12 * std::max(1.0, std::max(mp, mq))) {
    throw InputError("exact Wasserstein distance needs equal masses");
  }
  auto sorted = [](const DiscreteMeasure& m) {
    std::vector<std::size_t> idx(m.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return m.coords()[a] < m.coords()[b]; });
    return idx;
  };
  const auto ip = sorted(p);
  const auto iq = sorted(q);
  std::size_t a = 0;
  std::size_t b = 0;
  double ra = p.weight(ip[0]);
  double rb = q.weight(iq[0]);
  CompensatedSum total;
  while (a < ip.size() && b < iq.size()) {
    const double t = std::min(ra, rb);
    const double d = std::abs(p.coords()[ip[a]] - q.coords()[iq[b]]);
    total.add(t * (r == 1.0 ? d : r == 2.0 ? d * d : std::pow(d, r)));
    ra -= t;
    rb -= t;
    // the smaller remainder is exhausted; ties advance both
    if (ra <= rb) {
      if (++a < ip.size()) ra = p.weight(ip[a]);
      if (rb <= 0.0 && ++b < iq.size()) rb = q.weight(iq[b]);
    } else {
      if (++b < iq.size()) rb = q.weight(iq[b]);
    }
  }
  return total.value();
}

}  // namespace otkit

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "otkit/fastsum.hpp"
#include "otkit/matrix.hpp"
#include "otkit/measures.hpp"

namespace otkit {

enum class Backend { dense, nfft };
enum class Init { zeros, upper_bound };

std::string to_string(Backend b);
Backend parse_backend(const std::string& name);

// Parameters of the entropy-regularized UOT problem
//   <pi, d^r> + (1/lambda) KL(pi || mu x nu) + eta1 KL(pi_1 || mu) + eta2 KL(pi_2 || nu)
// and of its Sinkhorn solver.
struct SinkhornConfig {
  double r = 2.0;
  double lambda = 20.0;
  double eta1 = 1.0;
  double eta2 = 1.0;
  double tol = 1e-10;  // sup-norm change of both potentials
  int max_iter = 10000;
  Init init = Init::zeros;
  // Increasing, ending at lambda; empty means a single stage.
  std::vector<double> lambda_schedule;
  bool record_dual_trace = false;
  FastsumOptions fastsum{};
};

inline constexpr double kMaxAcceleratedLambda = 200.0;

// Throws InputError when the configuration is invalid for `backend`.
void validate(const SinkhornConfig& cfg, const CostSpec& cost, Backend backend);

struct DualPotentials {
  std::vector<double> beta;
  std::vector<double> gamma;
};

struct TransportPlan {
  Matrix pi;
};

struct SolveStats {
  int iterations = 0;
  double final_change = 0.0;
  bool converged = false;
  Backend backend = Backend::dense;
  double wall_seconds = 0.0;
  std::vector<double> stage_lambdas;
  std::vector<int> stage_iterations;
  // Dual objective after the initial point and after every half-step
  // (only when record_dual_trace).
  std::vector<double> dual_trace;
};

struct SinkhornResult {
  DualPotentials potentials;
  SolveStats stats;
};

// Row and column sums of a plan, on the atoms of mu and nu.
struct PlanMarginals {
  std::vector<double> first;
  std::vector<double> second;
  double mass_first() const;
  double mass_second() const;
};

namespace detail {
class GibbsOperator;
}

// One UOT instance (mu, nu, cost) on one backend. Caches the Gibbs operator
// per lambda, so repeated evaluations and lambda-schedules reuse kernels.
// Thread-safe; distinct instances are independent.
class UotProblem {
 public:
  UotProblem(DiscreteMeasure mu, DiscreteMeasure nu, CostSpec cost, Backend backend,
             FastsumOptions fastsum = {});
  ~UotProblem();
  UotProblem(UotProblem&&) noexcept;
  UotProblem& operator=(UotProblem&&) noexcept;

  const DiscreteMeasure& mu() const { return mu_; }
  const DiscreteMeasure& nu() const { return nu_; }
  const CostSpec& cost() const { return cost_; }
  Backend backend() const { return backend_; }

  // Alternating updates
  //   beta  <- -eta1/(1+eta1 lambda) log(k e^{lambda gamma} nu)
  //   gamma <- -eta2/(1+eta2 lambda) log(k^T e^{lambda beta} mu)
  // from gamma^0 (warm start, zeros or c* 1). Runs every stage of the schedule.
  SinkhornResult solve(const SinkhornConfig& cfg, const DualPotentials* warm_start = nullptr) const;

  PlanMarginals marginals(const DualPotentials& pots, double lambda) const;
  double dual_objective(const DualPotentials& pots, const SinkhornConfig& cfg) const;
  // Primal objective of the plan induced by the potentials.
  double primal_objective(const DualPotentials& pots, const SinkhornConfig& cfg) const;
  double transport_cost(const DualPotentials& pots, double lambda) const;

  // One beta update followed by one gamma update.
  DualPotentials sweep(const DualPotentials& pots, const SinkhornConfig& cfg) const;

 private:
  const detail::GibbsOperator& gibbs(double lambda) const;
  SolveStats run_stage(const SinkhornConfig& cfg, double lambda, DualPotentials& pots) const;

  DiscreteMeasure mu_;
  DiscreteMeasure nu_;
  CostSpec cost_;
  Backend backend_;
  FastsumOptions fastsum_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const detail::GibbsOperator>> cache_;
};

// Dense backend (log-sum-exp stabilized).
SinkhornResult sinkhorn_uot_dense(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const CostSpec& cost, const SinkhornConfig& cfg);
// NFFT fast-summation backend; d <= 3, r in {1, 2}, Euclidean cost.
SinkhornResult sinkhorn_uot_nfft(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const CostSpec& cost, const SinkhornConfig& cfg);
SinkhornResult sinkhorn_uot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            const CostSpec& cost, const SinkhornConfig& cfg, Backend backend);

// Solves at each lambda of the schedule in turn, warm-starting from the
// previous stage. A schedule of length one is a direct solve.
SinkhornResult lambda_scaled_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   const CostSpec& cost, const SinkhornConfig& cfg,
                                   Backend backend);

// pi_ij = e^{lambda beta_i} e^{-lambda d_ij^r} e^{lambda gamma_j} mu_i nu_j.
TransportPlan recover_plan_dense(const DualPotentials& pots, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, const CostSpec& cost,
                                 const SinkhornConfig& cfg);

PlanMarginals marginals(const TransportPlan& plan);
PlanMarginals marginals(const DualPotentials& pots, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, const CostSpec& cost,
                        const SinkhornConfig& cfg, Backend backend);

// <pi, d^r> + (1/lambda) KL(pi || mu x nu) + eta1 KL(pi_1 || mu) + eta2 KL(pi_2 || nu).
double primal_objective(const TransportPlan& plan, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, const CostSpec& cost,
                        const SinkhornConfig& cfg);

double dual_objective(const DualPotentials& pots, const DiscreteMeasure& mu,
                      const DiscreteMeasure& nu, const CostSpec& cost, const SinkhornConfig& cfg,
                      Backend backend);

double transport_cost(const TransportPlan& plan, const DiscreteMeasure& mu,
                      const DiscreteMeasure& nu, const CostSpec& cost);
double transport_cost(const DualPotentials& pots, const DiscreteMeasure& mu,
                      const DiscreteMeasure& nu, const CostSpec& cost, const SinkhornConfig& cfg,
                      Backend backend);

// Converged primal value of the regularized problem (schedule honored).
double uot_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& cost,
                 const SinkhornConfig& cfg, Backend backend);

// UOT(mu,nu) - UOT(mu,mu)/2 - UOT(nu,nu)/2 + (mu(X) - nu(X))^2 / (2 lambda).
double sinkhorn_divergence(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           const CostSpec& cost, const SinkhornConfig& cfg, Backend backend);

// |beta_t - beta_r| / |beta_r| + |gamma_t - gamma_r| / |gamma_r| (Euclidean).
double residual_dual(const DualPotentials& reference, const DualPotentials& test);

// Un-rooted w_r between 1-D measures of equal mass via the monotone coupling.
double exact_wasserstein_1d(const DiscreteMeasure& p, const DiscreteMeasure& q, double r);

}  // namespace otkit

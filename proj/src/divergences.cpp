#include "otkit/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "otkit/error.hpp"
#include "otkit/fastsum.hpp"
#include "otkit/parallel.hpp"

namespace otkit {

ConvexGenerator ConvexGenerator::kullback_leibler() {
  return {[](double z) { return z > 0.0 ? z * std::log(z) : 0.0; }, 0.0, 1.0, 0.0};
}

ConvexGenerator ConvexGenerator::chi_squared() {
  return {[](double z) { return (z - 1.0) * (z - 1.0); }, 0.0, 0.0, 1.0};
}

namespace {

void require_same_atoms(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim() != b.dim() || a.size() != b.size() ||
      !std::equal(a.coords().begin(), a.coords().end(), b.coords().begin())) {
    throw InputError("divergence requires identical atom lists");
  }
}

}  // namespace

double bregman_divergence(const ConvexGenerator& gen, const DiscreteMeasure& nu,
                          const DiscreteMeasure& mu) {
  require_same_atoms(nu, mu);
  CompensatedSum s;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double m = mu.weight(i);
    const double v = nu.weight(i);
    s.add((v > 0.0 ? gen.phi(v / m) : gen.phi_at_0) * m);
  }
  const double mass_mu = total_mass(mu);
  s.add(gen.dphi_at_1 * (mass_mu - total_mass(nu)));
  s.add(-gen.phi_at_1 * mass_mu);
  return s.value();
}

double kl_divergence(std::span<const double> nu, std::span<const double> mu) {
  if (nu.size() != mu.size()) throw InputError("divergence requires identical atom lists");
  CompensatedSum s;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] < 0.0 || nu[i] < 0.0) throw InputError("negative weight in divergence");
    if (nu[i] > 0.0) {
      if (mu[i] == 0.0) return std::numeric_limits<double>::infinity();
      s.add(nu[i] * std::log(nu[i] / mu[i]));
    }
    s.add(mu[i]);
    s.add(-nu[i]);
  }
  return s.value();
}

double kl_divergence(const DiscreteMeasure& nu, const DiscreteMeasure& mu) {
  require_same_atoms(nu, mu);
  return kl_divergence(nu.weights(), mu.weights());
}

double kl_plan_divergence(const Matrix& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (plan.rows() != mu.size() || plan.cols() != nu.size()) throw InputError("plan shape mismatch");
  for (double p : plan.data()) {
    if (!(p >= 0.0)) throw NumericError("negative or NaN plan entry");
  }
  std::vector<double> rows(plan.rows());
  const auto n = static_cast<std::ptrdiff_t>(plan.rows());
#pragma omp parallel for num_threads(thread_count()) schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    CompensatedSum s;
    for (std::size_t j = 0; j < plan.cols(); ++j) {
      const double p = plan(i, j);
      const double q = mu.weight(i) * nu.weight(j);
      if (p > 0.0) s.add(p * std::log(p / q));
      s.add(q - p);
    }
    rows[i] = s.value();
  }
  return compensated_sum(rows);
}

double MmdValue::value() const { return std::sqrt(squared); }

namespace {

void check_energy(const RadialKernel& k, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                  bool force) {
  if (k.kind() != KernelKind::energy || force) return;
  const double a = total_mass(mu);
  const double b = total_mass(nu);
  if (std::abs(a - b) > 1e-12 * std::max(a, b)) {
    throw InputError("energy kernel MMD is not a distance for unequal masses (" + std::to_string(a) +
                     " vs " + std::to_string(b) + "); use --force for a diagnostic value");
  }
}

// sum_ij a_i b_j k(|x_i - y_j|), rows summed in index order.
double quadratic_form(const RadialKernel& k, const DiscreteMeasure& a, const DiscreteMeasure& b) {
  std::vector<double> rows(a.size());
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for num_threads(thread_count()) schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    CompensatedSum s;
    const auto x = a.point(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      s.add(b.weight(j) * k.evaluate(distance(x, b.point(j), Norm::euclidean)));
    }
    rows[i] = a.weight(i) * s.value();
  }
  return compensated_sum(rows);
}

bool canonical_first(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  const auto ca = a.coords();
  const auto cb = b.coords();
  if (!std::equal(ca.begin(), ca.end(), cb.begin())) {
    return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
  }
  const auto wa = a.weights();
  const auto wb = b.weights();
  return !std::lexicographical_compare(wb.begin(), wb.end(), wa.begin(), wa.end());
}

}  // namespace

MmdValue mmd_squared_dense(const RadialKernel& k, const DiscreteMeasure& mu,
                           const DiscreteMeasure& nu, bool force) {
  if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
  check_energy(k, mu, nu, force);
  const double aa = quadratic_form(k, mu, mu);
  const double bb = quadratic_form(k, nu, nu);
  const double ab = canonical_first(mu, nu) ? quadratic_form(k, mu, nu) : quadratic_form(k, nu, mu);
  MmdValue v;
  v.raw_squared = (aa + bb) - 2.0 * ab;
  v.squared = std::max(0.0, v.raw_squared);
  return v;
}

double mmd_elementary_bound(const RadialKernel& k, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu) {
  if (!k.bounded()) throw InputError("elementary MMD bound needs a bounded kernel");
  const double a = total_mass(mu);
  const double b = total_mass(nu);
  return std::sqrt(k.evaluate(0.0) * (a * a + b * b));
}

namespace {

struct JointNodes {
  std::vector<double> nodes;
  std::vector<double> weights;
};

JointNodes joint_nodes(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  JointNodes j;
  j.nodes.assign(a.coords().begin(), a.coords().end());
  j.nodes.insert(j.nodes.end(), b.coords().begin(), b.coords().end());
  j.weights.assign(mu.weights().begin(), mu.weights().end());
  for (double x : nu.weights()) j.weights.push_back(-x);
  return j;
}

MmdValue from_sums(const RadialKernel& k, std::span<const double> w, std::span<const double> s) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < w.size(); ++i) acc.add(w[i] * s[i]);
  MmdValue v;
  // the fast kernel for the energy distance is |y| = -k^e
  v.raw_squared = k.kind() == KernelKind::energy ? -acc.value() : acc.value();
  v.squared = std::max(0.0, v.raw_squared);
  return v;
}

}  // namespace

std::vector<double> joint_kernel_sums_nfft(const RadialKernel& k, const DiscreteMeasure& mu,
                                           const DiscreteMeasure& nu, const FastsumOptions& opts) {
  if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
  if (mu.dim() > 3) throw InputError("accelerated MMD supports d <= 3");
  const int d = mu.dim();
  const RadialProfile profile = RadialProfile::from_kernel(k);
  const FastsumOptions o = opts.resolve(d, profile.smooth_at_zero());
  const TorusEmbedding emb =
      rescale_pair_to_torus(mu, nu, std::max(kDefaultTorusMargin, o.eps_boundary));
  const JointNodes j = joint_nodes(emb.first, emb.second, mu, nu);
  auto kernel = std::make_shared<const RegularizedKernel>(
      profile.rescaled(emb.scale), d, o.bandwidth, o.degree, o.eps_interior, o.eps_boundary);
  auto plan = std::make_shared<const NfftPlan>(kernel->grid(), j.nodes, o.nfft);
  const FastsumPlan fs(kernel, plan, j.nodes, plan, j.nodes);
  return fs.apply(j.weights);
}

std::vector<double> joint_kernel_sums_dense(const RadialKernel& k, const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) throw InputError("dimension mismatch");
  const JointNodes j = joint_nodes(mu, nu, mu, nu);
  return dense_kernel_sum(RadialProfile::from_kernel(k), j.nodes, j.nodes, mu.dim(), j.weights);
}

MmdValue mmd_squared_nfft(const RadialKernel& k, const DiscreteMeasure& mu,
                          const DiscreteMeasure& nu, const FastsumOptions& opts, bool force) {
  check_energy(k, mu, nu, force);
  const std::vector<double> s = joint_kernel_sums_nfft(k, mu, nu, opts);
  std::vector<double> w(mu.weights().begin(), mu.weights().end());
  for (double x : nu.weights()) w.push_back(-x);
  return from_sums(k, w, s);
}

}  // namespace otkit

#include "otkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "otkit/error.hpp"

namespace otkit {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(what) + " must be > 0");
}

}  // namespace

RadialKernel RadialKernel::gaussian(double length_scale) {
  require_positive(length_scale, "length scale");
  return {KernelKind::gaussian, length_scale};
}

RadialKernel RadialKernel::laplace(double length_scale) {
  require_positive(length_scale, "length scale");
  return {KernelKind::laplace, length_scale};
}

RadialKernel RadialKernel::inverse_multiquadric(double c) {
  require_positive(c, "imq parameter c");
  return {KernelKind::inverse_multiquadric, c};
}

RadialKernel RadialKernel::energy() { return {KernelKind::energy, 0.0}; }

double RadialKernel::evaluate(double t) const {
  if (!(t >= 0.0)) throw InputError("kernel argument must be >= 0");
  switch (kind_) {
    case KernelKind::gaussian: {
      const double u = t / param_;
      return std::exp(-u * u);
    }
    case KernelKind::laplace:
      return std::exp(-t / param_);
    case KernelKind::inverse_multiquadric:
      return 1.0 / std::sqrt(t * t + param_ * param_);
    case KernelKind::energy:
      return -t;
  }
  return 0.0;
}

std::string RadialKernel::name() const {
  switch (kind_) {
    case KernelKind::gaussian:
      return "gauss";
    case KernelKind::laplace:
      return "laplace";
    case KernelKind::inverse_multiquadric:
      return "imq";
    case KernelKind::energy:
      return "energy";
  }
  return "";
}

RadialKernel parse_kernel(std::string_view name, double length_scale, double imq_c) {
  if (name == "gauss" || name == "gaussian") return RadialKernel::gaussian(length_scale);
  if (name == "laplace") return RadialKernel::laplace(length_scale);
  if (name == "imq") return RadialKernel::inverse_multiquadric(imq_c);
  if (name == "energy") return RadialKernel::energy();
  throw InputError("unknown kernel '" + std::string(name) + "' (gauss, laplace, imq, energy)");
}

HolderConstants holder_constants(const RadialKernel& k) {
  const double p = k.parameter();
  // tabulated constant, raised to the sharp one where the table falls short
  switch (k.kind()) {
    case KernelKind::gaussian:
      return {1.0, std::max(2.0 / (p * p), std::sqrt(2.0) / p)};
    case KernelKind::laplace:
      return {0.5, std::max(2.0 / p, std::sqrt(2.0 / p))};
    case KernelKind::inverse_multiquadric:
      return {1.0, std::max(2.0 / (p * p * p * p), std::sqrt(1.0 / (p * p * p)))};
    case KernelKind::energy:
      return {0.5, std::sqrt(2.0)};
  }
  return {1.0, 1.0};
}

double gibbs_entry(const CostSpec& cost, double lambda, double t) {
  if (cost.exponent == 2.0) {
    // same expression as the Gaussian kernel with l = lambda^(-1/2)
    const double u = t / (1.0 / std::sqrt(lambda));
    return std::exp(-u * u);
  }
  if (cost.exponent == 1.0) return std::exp(-t / (1.0 / lambda));
  return std::exp(-lambda * std::pow(t, cost.exponent));
}

double pseudo_metric(const RadialKernel& k, double t) {
  const double rad = 2.0 * k.evaluate(0.0) - 2.0 * k.evaluate(t);
  if (rad < 0.0) {
    if (rad < -1e-14) throw NumericError("negative pseudo-metric radicand; kernel not positive definite");
    return 0.0;
  }
  return std::sqrt(rad);
}

RadialProfile RadialProfile::from_kernel(const RadialKernel& k) {
  switch (k.kind()) {
    case KernelKind::gaussian:
      return {Shape::gaussian, 1.0, 1.0 / k.parameter(), 2.0};
    case KernelKind::laplace:
      return {Shape::laplace, 1.0, 1.0 / k.parameter(), 1.0};
    case KernelKind::inverse_multiquadric:
      return {Shape::imq, 1.0 / k.parameter(), 1.0 / k.parameter(), 2.0};
    case KernelKind::energy:
      return {Shape::abs, 1.0, 1.0, 1.0};
  }
  throw InputError("unsupported kernel");
}

RadialProfile RadialProfile::gibbs(double lambda, double r) {
  require_positive(lambda, "lambda");
  if (r == 2.0) return {Shape::gaussian, 1.0, std::sqrt(lambda), 2.0};
  if (r == 1.0) return {Shape::laplace, 1.0, lambda, 1.0};
  throw InputError("accelerated backend supports r = 1 or r = 2 only");
}

RadialProfile RadialProfile::cost_gibbs(double lambda, double r) {
  require_positive(lambda, "lambda");
  if (r != 1.0 && r != 2.0) throw InputError("accelerated backend supports r = 1 or r = 2 only");
  return {Shape::cost_gibbs, 1.0 / lambda, std::pow(lambda, 1.0 / r), r};
}

bool RadialProfile::smooth_at_zero() const {
  switch (shape_) {
    case Shape::gaussian:
    case Shape::imq:
      return true;
    case Shape::laplace:
    case Shape::abs:
      return false;
    case Shape::cost_gibbs:
      return exponent_ == 2.0;
  }
  return false;
}

template <class T>
T RadialProfile::eval(const T& t) const {
  using std::exp;
  using std::pow;
  const T u = t * inv_length_;
  switch (shape_) {
    case Shape::gaussian:
      return exp(-(u * u)) * amplitude_;
    case Shape::laplace:
      return exp(-u) * amplitude_;
    case Shape::imq:
      return pow(u * u + 1.0, -0.5) * amplitude_;
    case Shape::abs:
      return u * amplitude_;
    case Shape::cost_gibbs: {
      const T w = exponent_ == 1.0 ? u : u * u;
      return w * exp(-w) * amplitude_;
    }
  }
  return u;
}

double RadialProfile::value(double t) const { return eval(t); }

Taylor RadialProfile::taylor(double t0, std::size_t order) const {
  return eval(Taylor::variable(order, t0));
}

RadialProfile RadialProfile::rescaled(double scale) const {
  require_positive(scale, "scale");
  return {shape_, amplitude_, inv_length_ / scale, exponent_};
}

RadialProfile fastsum_cost_kernel(double lambda, const CostSpec& cost) {
  if (cost.norm != Norm::euclidean) throw InputError("accelerated backend requires Euclidean cost");
  return RadialProfile::cost_gibbs(lambda, cost.exponent);
}

}  // namespace otkit

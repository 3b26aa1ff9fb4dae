#pragma once

#include <string>
#include <string_view>

#include "otkit/measures.hpp"
#include "otkit/taylor.hpp"

namespace otkit {

enum class KernelKind { gaussian, laplace, inverse_multiquadric, energy };

// Radial kernel k(x, y) = k(|x - y|) used for MMD.
class RadialKernel {
 public:
  static RadialKernel gaussian(double length_scale);
  static RadialKernel laplace(double length_scale);
  static RadialKernel inverse_multiquadric(double c);
  static RadialKernel energy();

  KernelKind kind() const { return kind_; }
  // Length scale for Gaussian/Laplace, c for IMQ, unused for energy.
  double parameter() const { return param_; }

  bool smooth_at_zero() const {
    return kind_ == KernelKind::gaussian || kind_ == KernelKind::inverse_multiquadric;
  }
  bool bounded() const { return kind_ != KernelKind::energy; }

  // k(t); the energy kernel is -t. Throws InputError for t < 0.
  double evaluate(double t) const;
  double operator()(double t) const { return evaluate(t); }

  std::string name() const;

 private:
  RadialKernel(KernelKind kind, double param) : kind_(kind), param_(param) {}
  KernelKind kind_;
  double param_;
};

// Kernel by CLI name: gauss, laplace, imq, energy.
RadialKernel parse_kernel(std::string_view name, double length_scale, double imq_c);

// Exponent alpha and constant c with k(x,x) - 2k(x,y) + k(y,y) <= c^2 d^(2 alpha).
struct HolderConstants {
  double alpha;
  double c;
};

// Gaussian (1, 2/l^2), Laplace (1/2, 2/l), IMQ (1, 2/c^4), energy (1/2, sqrt 2);
// c is raised to sqrt(2)/l, sqrt(2/l) and c^(-3/2) respectively when those are
// larger, so the inequality holds for every parameter.
HolderConstants holder_constants(const RadialKernel& k);

// Gibbs kernel entry exp(-lambda t^r).
double gibbs_entry(const CostSpec& cost, double lambda, double t);

// sqrt(2 k(0) - 2 k(t)); radicands in [-1e-14, 0) are clamped to 0, anything
// more negative throws NumericError.
double pseudo_metric(const RadialKernel& k, double t);

// Radial profile t -> amplitude * g(t * inv_length) fed to the fast summation.
// g is one of: gaussian exp(-u^2), laplace exp(-u), imq 1/sqrt(u^2+1),
// abs u, or cost_gibbs u^r exp(-u^r).
class RadialProfile {
 public:
  enum class Shape { gaussian, laplace, imq, abs, cost_gibbs };

  // Fast-summation kernel for k: the energy kernel maps to |y| (sign flipped).
  static RadialProfile from_kernel(const RadialKernel& k);
  // Gibbs kernel exp(-lambda t^r); r must be 1 or 2.
  static RadialProfile gibbs(double lambda, double r);
  // t^r exp(-lambda t^r) for evaluating <pi, d^r>; r must be 1 or 2.
  static RadialProfile cost_gibbs(double lambda, double r);

  Shape shape() const { return shape_; }
  double amplitude() const { return amplitude_; }
  double inv_length() const { return inv_length_; }
  double exponent() const { return exponent_; }

  bool smooth_at_zero() const;

  double value(double t) const;
  // Taylor expansion about t0 > 0 up to the given order.
  Taylor taylor(double t0, std::size_t order) const;

  // Profile in coordinates x' = x * scale, i.e. t' -> f(t' / scale).
  RadialProfile rescaled(double scale) const;

 private:
  RadialProfile(Shape shape, double amplitude, double inv_length, double exponent)
      : shape_(shape), amplitude_(amplitude), inv_length_(inv_length), exponent_(exponent) {}

  template <class T>
  T eval(const T& t) const;

  Shape shape_;
  double amplitude_;
  double inv_length_;
  double exponent_;
};

// The auxiliary kernel t^r exp(-lambda t^r) for accelerated transport costs.
RadialProfile fastsum_cost_kernel(double lambda, const CostSpec& cost);

}  // namespace otkit

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace otkit {

// Truncated Taylor series c_0 + c_1 s + ... + c_p s^p about a point; c_q is
// f^(q)/q!. Used to obtain kernel derivatives for the Hermite regularization.
class Taylor {
 public:
  Taylor(std::size_t order, double value) : c_(order + 1, 0.0) { c_[0] = value; }

  // The independent variable t0 + s.
  static Taylor variable(std::size_t order, double t0) {
    Taylor t(order, t0);
    if (order >= 1) t.c_[1] = 1.0;
    return t;
  }

  std::size_t order() const { return c_.size() - 1; }
  double operator[](std::size_t q) const { return c_[q]; }
  double& operator[](std::size_t q) { return c_[q]; }
  const std::vector<double>& coefficients() const { return c_; }

  // q-th derivative at the expansion point.
  double derivative(std::size_t q) const {
    double f = 1.0;
    for (std::size_t i = 2; i <= q; ++i) f *= static_cast<double>(i);
    return c_[q] * f;
  }

  Taylor& operator+=(const Taylor& o) {
    for (std::size_t q = 0; q < c_.size(); ++q) c_[q] += o.c_[q];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    for (std::size_t q = 0; q < c_.size(); ++q) c_[q] -= o.c_[q];
    return *this;
  }
  Taylor& operator*=(double a) {
    for (double& x : c_) x *= a;
    return *this;
  }

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator*(Taylor a, double s) { return a *= s; }
  friend Taylor operator*(double s, Taylor a) { return a *= s; }
  friend Taylor operator+(Taylor a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Taylor operator-(Taylor a) { return a *= -1.0; }

  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r(a.order(), 0.0);
    for (std::size_t q = 0; q < r.c_.size(); ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i <= q; ++i) s += a.c_[i] * b.c_[q - i];
      r.c_[q] = s;
    }
    return r;
  }

  friend Taylor exp(const Taylor& a) {
    // r' = a' r
    Taylor r(a.order(), std::exp(a.c_[0]));
    for (std::size_t q = 1; q < r.c_.size(); ++q) {
      double s = 0.0;
      for (std::size_t k = 1; k <= q; ++k) s += static_cast<double>(k) * a.c_[k] * r.c_[q - k];
      r.c_[q] = s / static_cast<double>(q);
    }
    return r;
  }

  // a^e for a_0 > 0:  a r' = e a' r
  friend Taylor pow(const Taylor& a, double e) {
    Taylor r(a.order(), std::pow(a.c_[0], e));
    for (std::size_t q = 1; q < r.c_.size(); ++q) {
      double s = 0.0;
      for (std::size_t k = 1; k <= q; ++k) {
        s += (e * static_cast<double>(k) - static_cast<double>(q - k)) * a.c_[k] * r.c_[q - k];
      }
      r.c_[q] = s / (static_cast<double>(q) * a.c_[0]);
    }
    return r;
  }

  friend Taylor sqrt(const Taylor& a) { return pow(a, 0.5); }

 private:
  std::vector<double> c_;
};

}  // namespace otkit

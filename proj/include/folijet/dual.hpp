#pragma once

#include <vector>

#include "folijet/error.hpp"
#include "folijet/scalar.hpp"

namespace folijet {

/// Value, gradient and Hessian with respect to a fixed set of nvars inputs.
/// The Hessian is stored dense and kept symmetric by every operation.
class DualQuadScalar {
 public:
  DualQuadScalar() = default;
  /// A constant with no declared variables.
  DualQuadScalar(double value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  DualQuadScalar(double value, int nvars);

  int nvars() const { return n_; }
  double value() const { return value_; }
  const std::vector<double>& grad() const { return grad_; }
  double grad(int i) const { return grad_[i]; }
  double hess(int i, int j) const { return hess_[i * n_ + j]; }
  /// Row-major n×n.
  const std::vector<double>& hess() const { return hess_; }

  DualQuadScalar operator-() const;
  DualQuadScalar& operator+=(const DualQuadScalar& b);
  DualQuadScalar& operator-=(const DualQuadScalar& b);
  DualQuadScalar& operator*=(double b);

  friend DualQuadScalar operator+(DualQuadScalar a, const DualQuadScalar& b) { return a += b; }
  friend DualQuadScalar operator-(DualQuadScalar a, const DualQuadScalar& b) { return a -= b; }
  friend DualQuadScalar operator+(DualQuadScalar a, double b) {
    a.value_ += b;
    return a;
  }
  friend DualQuadScalar operator+(double a, DualQuadScalar b) { return b + a; }
  friend DualQuadScalar operator-(DualQuadScalar a, double b) { return a + (-b); }
  friend DualQuadScalar operator-(double a, const DualQuadScalar& b) { return (-b) + a; }
  friend DualQuadScalar operator*(DualQuadScalar a, double b) { return a *= b; }
  friend DualQuadScalar operator*(double a, DualQuadScalar b) { return b *= a; }
  friend DualQuadScalar operator/(DualQuadScalar a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a *= 1.0 / b;
  }
  friend DualQuadScalar operator*(const DualQuadScalar& a, const DualQuadScalar& b);
  friend DualQuadScalar operator/(const DualQuadScalar& a, const DualQuadScalar& b);
  friend DualQuadScalar operator/(double a, const DualQuadScalar& b);

  /// Chain rule for a scalar function with known f(v), f'(v), f''(v).
  DualQuadScalar chain(double f0, double f1, double f2) const;

 private:
  friend DualQuadScalar seed_variable(int index, double value, int nvars);
  void check_same(const DualQuadScalar& b) const;

  int n_ = 0;
  double value_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

/// value at `value`, gradient e_index, zero Hessian.
DualQuadScalar seed_variable(int index, double value, int nvars);

inline double value_of(const DualQuadScalar& a) { return a.value(); }
inline DualQuadScalar zero_like(const DualQuadScalar& a) { return DualQuadScalar(0.0, a.nvars()); }
inline DualQuadScalar constant_like(const DualQuadScalar& a, double c) {
  return DualQuadScalar(c, a.nvars());
}

DualQuadScalar apply(Func f, const DualQuadScalar& a);
DualQuadScalar power(const DualQuadScalar& a, double c);

inline DualQuadScalar exp(const DualQuadScalar& a) { return apply(Func::exp, a); }
inline DualQuadScalar log(const DualQuadScalar& a) { return apply(Func::log, a); }
inline DualQuadScalar sin(const DualQuadScalar& a) { return apply(Func::sin, a); }
inline DualQuadScalar cos(const DualQuadScalar& a) { return apply(Func::cos, a); }
inline DualQuadScalar tan(const DualQuadScalar& a) { return apply(Func::tan, a); }
inline DualQuadScalar sqrt(const DualQuadScalar& a) { return apply(Func::sqrt, a); }
inline DualQuadScalar atan(const DualQuadScalar& a) { return apply(Func::atan, a); }

}  // namespace folijet

#include "folijet/dual.hpp"

#include <cmath>
#include <string>

namespace folijet {

DualQuadScalar::DualQuadScalar(double value, int nvars)
    : n_(nvars), value_(value), grad_(nvars, 0.0), hess_(static_cast<size_t>(nvars) * nvars, 0.0) {
  if (nvars < 0) throw IndexOutOfRange("negative variable count");
}

DualQuadScalar seed_variable(int index, double value, int nvars) {
  if (index < 0 || index >= nvars)
    throw IndexOutOfRange("seed index " + std::to_string(index) + " outside [0, " +
                          std::to_string(nvars) + ")");
  DualQuadScalar d(value, nvars);
  d.grad_[index] = 1.0;
  return d;
}

// A constant with nvars == 0 combines with anything; other counts must agree.
void DualQuadScalar::check_same(const DualQuadScalar& b) const {
  if (n_ != b.n_ && n_ != 0 && b.n_ != 0)
    throw VarCountMismatch("dual variable counts differ: " + std::to_string(n_) + " vs " +
                           std::to_string(b.n_));
}

DualQuadScalar DualQuadScalar::operator-() const {
  DualQuadScalar out = *this;
  out.value_ = -value_;
  for (auto& g : out.grad_) g = -g;
  for (auto& h : out.hess_) h = -h;
  return out;
}

DualQuadScalar& DualQuadScalar::operator+=(const DualQuadScalar& b) {
  check_same(b);
  if (n_ == 0 && b.n_ != 0) {
    const double v = value_;
    *this = b;
    value_ += v;
    return *this;
  }
  value_ += b.value_;
  if (b.n_ != 0) {
    for (int i = 0; i < n_; ++i) grad_[i] += b.grad_[i];
    for (size_t i = 0; i < hess_.size(); ++i) hess_[i] += b.hess_[i];
  }
  return *this;
}

DualQuadScalar& DualQuadScalar::operator-=(const DualQuadScalar& b) { return *this += -b; }

DualQuadScalar& DualQuadScalar::operator*=(double b) {
  value_ *= b;
  for (auto& g : grad_) g *= b;
  for (auto& h : hess_) h *= b;
  return *this;
}

DualQuadScalar operator*(const DualQuadScalar& a, const DualQuadScalar& b) {
  a.check_same(b);
  if (a.n_ == 0) return b * a.value_;
  if (b.n_ == 0) return a * b.value_;
  const int n = a.n_;
  DualQuadScalar out(a.value_ * b.value_, n);
  for (int i = 0; i < n; ++i) out.grad_[i] = a.value_ * b.grad_[i] + b.value_ * a.grad_[i];
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double h = a.value_ * b.hess_[i * n + j] + b.value_ * a.hess_[i * n + j] +
                       a.grad_[i] * b.grad_[j] + b.grad_[i] * a.grad_[j];
      out.hess_[i * n + j] = h;
      out.hess_[j * n + i] = h;
    }
  }
  return out;
}

DualQuadScalar DualQuadScalar::chain(double f0, double f1, double f2) const {
  const int n = n_;
  DualQuadScalar out(f0, n);
  for (int i = 0; i < n; ++i) out.grad_[i] = f1 * grad_[i];
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double h = f1 * hess_[i * n + j] + f2 * grad_[i] * grad_[j];
      out.hess_[i * n + j] = h;
      out.hess_[j * n + i] = h;
    }
  }
  return out;
}

DualQuadScalar operator/(double a, const DualQuadScalar& b) {
  const double v = b.value_;
  if (v == 0.0) throw DomainError("division by a dual with zero value");
  return b.chain(a / v, -a / (v * v), 2.0 * a / (v * v * v));
}

DualQuadScalar operator/(const DualQuadScalar& a, const DualQuadScalar& b) { return a * (1.0 / b); }

DualQuadScalar apply(Func f, const DualQuadScalar& a) {
  const double x = a.value();
  check_domain(f, x);
  switch (f) {
    case Func::exp: {
      const double e = std::exp(x);
      return a.chain(e, e, e);
    }
    case Func::log:
      return a.chain(std::log(x), 1.0 / x, -1.0 / (x * x));
    case Func::sin:
      return a.chain(std::sin(x), std::cos(x), -std::sin(x));
    case Func::cos:
      return a.chain(std::cos(x), -std::sin(x), -std::cos(x));
    case Func::tan: {
      const double t = std::tan(x);
      const double s = 1.0 + t * t;
      return a.chain(t, s, 2.0 * t * s);
    }
    case Func::sqrt: {
      const double r = std::sqrt(x);
      return a.chain(r, 0.5 / r, -0.25 / (r * x));
    }
    case Func::atan: {
      const double d = 1.0 / (1.0 + x * x);
      return a.chain(std::atan(x), d, -2.0 * x * d * d);
    }
  }
  return a;
}

DualQuadScalar power(const DualQuadScalar& a, double c) {
  if (is_small_integer(c)) return ipower(a, static_cast<int>(c));
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("non-integer power of nonpositive base");
  return a.chain(std::pow(x, c), c * std::pow(x, c - 1.0), c * (c - 1.0) * std::pow(x, c - 2.0));
}

}  // namespace folijet

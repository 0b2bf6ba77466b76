#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "folijet/error.hpp"
#include "folijet/scalar.hpp"

namespace folijet {

/// Truncated Taylor polynomial c0 + c1 t + ... + cN t^N in one parameter.
/// coeffs[j] is the j-th Taylor coefficient, (1/j!) d^j/dt^j.
/// T is the coefficient ring: double, or DualQuadScalar when we want
/// partials of the coefficients with respect to the seed data.
template <class T>
class Taylor {
 public:
  Taylor() : c_(1, T{}) {}
  explicit Taylor(std::vector<T> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw OrderMismatch("Taylor series needs at least one coefficient");
  }

  static Taylor constant(int order, const T& c) {
    std::vector<T> v(order + 1, zero_like(c));
    v[0] = c;
    return Taylor(std::move(v));
  }

  /// The curve value + t.
  static Taylor variable(int order, const T& value) {
    Taylor out = constant(order, value);
    if (order >= 1) out.c_[1] = constant_like(value, 1.0);
    return out;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<T>& coeffs() const { return c_; }
  const T& operator[](int j) const { return c_[j]; }
  T& operator[](int j) { return c_[j]; }

  Taylor operator-() const {
    Taylor out = *this;
    for (auto& x : out.c_) x = -x;
    return out;
  }

  Taylor& operator+=(const Taylor& b) {
    same_order(b);
    for (size_t j = 0; j < c_.size(); ++j) c_[j] = c_[j] + b.c_[j];
    return *this;
  }
  Taylor& operator-=(const Taylor& b) {
    same_order(b);
    for (size_t j = 0; j < c_.size(); ++j) c_[j] = c_[j] - b.c_[j];
    return *this;
  }
  Taylor& operator+=(double b) {
    c_[0] = c_[0] + b;
    return *this;
  }
  Taylor& operator*=(double b) {
    for (auto& x : c_) x = x * b;
    return *this;
  }

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator+(Taylor a, double b) { return a += b; }
  friend Taylor operator+(double a, Taylor b) { return b += a; }
  friend Taylor operator-(Taylor a, double b) { return a += -b; }
  friend Taylor operator-(double a, const Taylor& b) { return (-b) += a; }
  friend Taylor operator*(Taylor a, double b) { return a *= b; }
  friend Taylor operator*(double a, Taylor b) { return b *= a; }
  friend Taylor operator/(Taylor a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a *= 1.0 / b;
  }

  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    a.same_order(b);
    const int n = a.order();
    Taylor out = constant(n, zero_like(a.c_[0]));
    for (int k = 0; k <= n; ++k) {
      T s = a.c_[0] * b.c_[k];
      for (int j = 1; j <= k; ++j) s = s + a.c_[j] * b.c_[k - j];
      out.c_[k] = s;
    }
    return out;
  }

  friend Taylor operator/(const Taylor& a, const Taylor& b) {
    a.same_order(b);
    if (value_of(b.c_[0]) == 0.0) throw DomainError("division by a series with zero constant term");
    const int n = a.order();
    Taylor q = constant(n, zero_like(a.c_[0]));
    for (int k = 0; k <= n; ++k) {
      T s = a.c_[k];
      for (int j = 0; j < k; ++j) s = s - q.c_[j] * b.c_[k - j];
      q.c_[k] = s / b.c_[0];
    }
    return q;
  }
  friend Taylor operator/(double a, const Taylor& b) {
    return constant(b.order(), constant_like(b.c_[0], a)) / b;
  }

 private:
  void same_order(const Taylor& b) const {
    if (b.order() != order())
      throw OrderMismatch("Taylor orders differ: " + std::to_string(order()) + " vs " +
                          std::to_string(b.order()));
  }

  std::vector<T> c_;
};

using TaylorScalar = Taylor<double>;

template <class T>
double value_of(const Taylor<T>& a) {
  return value_of(a[0]);
}
template <class T>
Taylor<T> zero_like(const Taylor<T>& a) {
  return Taylor<T>::constant(a.order(), zero_like(a[0]));
}
template <class T>
Taylor<T> constant_like(const Taylor<T>& a, double c) {
  return Taylor<T>::constant(a.order(), constant_like(a[0], c));
}

namespace detail {

// sin and cos share one recurrence.
template <class T>
std::pair<Taylor<T>, Taylor<T>> sin_cos(const Taylor<T>& a) {
  const int n = a.order();
  Taylor<T> s = Taylor<T>::constant(n, apply(Func::sin, a[0]));
  Taylor<T> c = Taylor<T>::constant(n, apply(Func::cos, a[0]));
  for (int k = 1; k <= n; ++k) {
    T ss = zero_like(a[0]);
    T cc = zero_like(a[0]);
    for (int j = 1; j <= k; ++j) {
      ss = ss + (a[j] * c[k - j]) * static_cast<double>(j);
      cc = cc - (a[j] * s[k - j]) * static_cast<double>(j);
    }
    s[k] = ss * (1.0 / k);
    c[k] = cc * (1.0 / k);
  }
  return {s, c};
}

// Shift-down derivative d/dt, keeping the same order (top coefficient zero).
template <class T>
Taylor<T> dt(const Taylor<T>& a) {
  Taylor<T> out = zero_like(a);
  for (int k = 0; k < a.order(); ++k) out[k] = a[k + 1] * static_cast<double>(k + 1);
  return out;
}

// Inverse of dt with a given constant term.
template <class T>
Taylor<T> integrate(const Taylor<T>& d, const T& c0) {
  Taylor<T> out = zero_like(d);
  out[0] = c0;
  for (int k = 1; k <= d.order(); ++k) out[k] = d[k - 1] * (1.0 / k);
  return out;
}

}  // namespace detail

template <class T>
Taylor<T> apply(Func f, const Taylor<T>& a) {
  const int n = a.order();
  check_domain(f, value_of(a[0]));
  switch (f) {
    case Func::exp: {
      Taylor<T> b = Taylor<T>::constant(n, apply(Func::exp, a[0]));
      for (int k = 1; k <= n; ++k) {
        T s = zero_like(a[0]);
        for (int j = 1; j <= k; ++j) s = s + (a[j] * b[k - j]) * static_cast<double>(j);
        b[k] = s * (1.0 / k);
      }
      return b;
    }
    case Func::log: {
      Taylor<T> b = Taylor<T>::constant(n, apply(Func::log, a[0]));
      for (int k = 1; k <= n; ++k) {
        T s = a[k];
        for (int j = 1; j < k; ++j) s = s - (b[j] * a[k - j]) * (static_cast<double>(j) / k);
        b[k] = s / a[0];
      }
      return b;
    }
    case Func::sin:
    case Func::cos: {
      auto [s, c] = detail::sin_cos(a);
      return f == Func::sin ? s : c;
    }
    case Func::tan: {
      auto [s, c] = detail::sin_cos(a);
      return s / c;
    }
    case Func::sqrt: {
      Taylor<T> b = Taylor<T>::constant(n, apply(Func::sqrt, a[0]));
      for (int k = 1; k <= n; ++k) {
        T s = a[k];
        for (int j = 1; j < k; ++j) s = s - b[j] * b[k - j];
        b[k] = s / (b[0] * 2.0);
      }
      return b;
    }
    case Func::atan: {
      // atan(a)' = a' / (1 + a^2)
      Taylor<T> d = detail::dt(a) / (a * a + 1.0);
      return detail::integrate(d, apply(Func::atan, a[0]));
    }
  }
  return a;
}

/// a^c for real c. Small integer exponents multiply out; others need a0 > 0.
template <class T>
Taylor<T> power(const Taylor<T>& a, double c) {
  if (is_small_integer(c)) return ipower(a, static_cast<int>(c));
  const double a0v = value_of(a[0]);
  if (!(a0v > 0.0)) throw DomainError("non-integer power of a series with nonpositive constant term");
  const int n = a.order();
  Taylor<T> b = Taylor<T>::constant(n, power(a[0], c));
  for (int k = 1; k <= n; ++k) {
    T s = zero_like(a[0]);
    for (int j = 1; j <= k; ++j) s = s + (a[j] * b[k - j]) * (c * j - (k - j));
    b[k] = s / (a[0] * static_cast<double>(k));
  }
  return b;
}

template <class T> Taylor<T> exp(const Taylor<T>& a) { return apply(Func::exp, a); }
template <class T> Taylor<T> log(const Taylor<T>& a) { return apply(Func::log, a); }
template <class T> Taylor<T> sin(const Taylor<T>& a) { return apply(Func::sin, a); }
template <class T> Taylor<T> cos(const Taylor<T>& a) { return apply(Func::cos, a); }
template <class T> Taylor<T> tan(const Taylor<T>& a) { return apply(Func::tan, a); }
template <class T> Taylor<T> sqrt(const Taylor<T>& a) { return apply(Func::sqrt, a); }
template <class T> Taylor<T> atan(const Taylor<T>& a) { return apply(Func::atan, a); }

}  // namespace folijet

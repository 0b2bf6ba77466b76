#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "folijet/error.hpp"

namespace folijet {

/// Elementary functions every scalar kind must support.
enum class Func { exp, log, sin, cos, tan, sqrt, atan };

std::string_view func_name(Func f);
std::optional<Func> func_from_name(std::string_view name);

/// Throws DomainError if `f` is not analytic at `x`.
void check_domain(Func f, double x);

inline double apply(Func f, double x) {
  check_domain(f, x);
  switch (f) {
    case Func::exp: return std::exp(x);
    case Func::log: return std::log(x);
    case Func::sin: return std::sin(x);
    case Func::cos: return std::cos(x);
    case Func::tan: return std::tan(x);
    case Func::sqrt: return std::sqrt(x);
    case Func::atan: return std::atan(x);
  }
  return 0.0;
}

inline double value_of(double x) { return x; }
inline double zero_like(double) { return 0.0; }
inline double constant_like(double, double c) { return c; }

double checked_div(double a, double b);

/// Real power; integral exponents accept any base, others need base > 0.
double power(double base, double exponent);

/// True if `c` is an integer small enough for repeated multiplication.
inline bool is_small_integer(double c) {
  return std::isfinite(c) && c == std::nearbyint(c) && std::fabs(c) <= 64.0;
}

/// Binary exponentiation; negative exponents go through the reciprocal.
template <class T>
T ipower(const T& base, int n) {
  if (n < 0) return 1.0 / ipower(base, -n);
  T result = constant_like(base, 1.0);
  T square = base;
  while (n > 0) {
    if (n & 1) result = result * square;
    n >>= 1;
    if (n > 0) square = square * square;
  }
  return result;
}

}  // namespace folijet

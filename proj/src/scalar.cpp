#include "folijet/scalar.hpp"

#include <array>
#include <utility>

namespace folijet {

namespace {
constexpr std::array<std::pair<Func, std::string_view>, 7> kNames{{
    {Func::exp, "exp"},
    {Func::log, "log"},
    {Func::sin, "sin"},
    {Func::cos, "cos"},
    {Func::tan, "tan"},
    {Func::sqrt, "sqrt"},
    {Func::atan, "atan"},
}};
}  // namespace

std::string_view func_name(Func f) {
  for (const auto& [g, name] : kNames)
    if (g == f) return name;
  return "?";
}

std::optional<Func> func_from_name(std::string_view name) {
  for (const auto& [g, n] : kNames)
    if (n == name) return g;
  return std::nullopt;
}

void check_domain(Func f, double x) {
  if (!std::isfinite(x)) throw DomainError(std::string(func_name(f)) + " of a non-finite value");
  switch (f) {
    case Func::log:
      if (!(x > 0.0)) throw DomainError("log of nonpositive value " + std::to_string(x));
      break;
    case Func::sqrt:
      // sqrt is not differentiable at 0, so jets through it need x > 0.
      if (!(x > 0.0)) throw DomainError("sqrt of nonpositive value " + std::to_string(x));
      break;
    case Func::tan:
      if (std::fabs(std::cos(x)) < 1e-15) throw DomainError("tan at a pole");
      break;
    default:
      break;
  }
}

double checked_div(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return a / b;
}

double power(double base, double exponent) {
  if (is_small_integer(exponent)) {
    if (base == 0.0 && exponent < 0) throw DomainError("negative power of zero");
    return std::pow(base, exponent);
  }
  if (!(base > 0.0)) throw DomainError("non-integer power of nonpositive base");
  return std::pow(base, exponent);
}

}  // namespace folijet

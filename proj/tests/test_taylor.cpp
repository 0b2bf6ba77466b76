#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "folijet/dual.hpp"
#include "folijet/series.hpp"
#include "folijet/taylor.hpp"

using namespace folijet;

namespace {

TaylorScalar poly(std::vector<double> c) { return TaylorScalar(std::move(c)); }

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

// Smooth test function used in both dual and finite-difference form.
template <class T>
T smooth(const T& x, const T& y) {
  return exp(x * 0.3) * sin(y) + log(x * x + 1.5) / (y * y + 2.0) + atan(x - y) * sqrt(x + 3.0);
}

}  // namespace

TEST_CASE("taylor mul expands (1+t)^2") {
  auto a = poly({1, 1, 0});
  auto p = a * a;
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 2.0);
  CHECK(p[2] == 1.0);
}

TEST_CASE("taylor mul by zero series") {
  auto a = poly({3, -2, 7});
  auto z = poly({0, 0, 0});
  auto p = a * z;
  for (double c : p.coeffs()) CHECK(c == 0.0);
}

TEST_CASE("taylor exp of t") {
  auto e = exp(TaylorScalar::variable(2, 0.0));
  CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e[2] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("taylor errors") {
  CHECK_THROWS_AS(poly({1, 1}) + poly({1, 1, 1}), OrderMismatch);
  CHECK_THROWS_AS(poly({1, 1}) / poly({0, 1}), DomainError);
  CHECK_THROWS_AS(log(poly({-1, 1})), DomainError);
  CHECK_THROWS_AS(sqrt(poly({0, 1})), DomainError);
  CHECK_THROWS_AS(power(poly({-2, 1}), 0.5), DomainError);
}

TEST_CASE("taylor elementary functions against closed forms") {
  // sin(1 + t): coefficients sin(1), cos(1), -sin(1)/2, -cos(1)/6
  auto s = sin(TaylorScalar::variable(3, 1.0));
  CHECK(s[2] == doctest::Approx(-std::sin(1.0) / 2));
  CHECK(s[3] == doctest::Approx(-std::cos(1.0) / 6));
  // tan(t) = t + t^3/3 + 2 t^5/15
  auto t = tan(TaylorScalar::variable(5, 0.0));
  CHECK(t[3] == doctest::Approx(1.0 / 3));
  CHECK(t[5] == doctest::Approx(2.0 / 15));
  // atan(t) = t - t^3/3 + t^5/5
  auto a = atan(TaylorScalar::variable(5, 0.0));
  CHECK(a[3] == doctest::Approx(-1.0 / 3));
  CHECK(a[5] == doctest::Approx(1.0 / 5));
  // (1+t)^(1/2) binomial series
  auto r = power(TaylorScalar::variable(3, 1.0), 0.5);
  CHECK(r[2] == doctest::Approx(-1.0 / 8));
  CHECK(r[3] == doctest::Approx(1.0 / 16));
  // sqrt agrees with pow 1/2
  auto q = sqrt(TaylorScalar::variable(3, 1.0));
  for (int k = 0; k <= 3; ++k) CHECK(q[k] == doctest::Approx(r[k]).epsilon(1e-14));
  // negative integer power with negative base
  auto inv = power(TaylorScalar::variable(2, -2.0), -1.0);
  CHECK(inv[0] == doctest::Approx(-0.5));
  CHECK(inv[1] == doctest::Approx(-0.25));
  CHECK(inv[2] == doctest::Approx(-0.125));
}

TEST_CASE("property: product equals exact convolution") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 7;
    std::vector<double> p(n + 1), q(n + 1);
    for (auto& x : p) x = U(rng);
    for (auto& x : q) x = U(rng);
    auto prod = TaylorScalar(p) * TaylorScalar(q);
    for (int k = 0; k <= n; ++k) {
      long double s = 0;
      for (int j = 0; j <= k; ++j) s += static_cast<long double>(p[j]) * q[k - j];
      CHECK(rel(prod[k], static_cast<double>(s)) <= 1e-12);
    }
  }
}

TEST_CASE("property: exp(log(a)) round trip") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = trial % 7;
    std::vector<double> c(n + 1);
    for (auto& x : c) x = U(rng);
    c[0] = 0.5 + std::fabs(c[0]) * 3;
    auto a = TaylorScalar(c);
    auto b = exp(log(a));
    for (int k = 0; k <= n; ++k) CHECK(std::fabs(b[k] - a[k]) <= 1e-10 * std::max(1.0, std::fabs(a[k])));
  }
}

TEST_CASE("dual product x*y") {
  auto x = seed_variable(0, 3.0, 2);
  auto y = seed_variable(1, 5.0, 2);
  auto f = x * y;
  CHECK(f.value() == 15.0);
  CHECK(f.grad(0) == 5.0);
  CHECK(f.grad(1) == 3.0);
  CHECK(f.hess(0, 0) == 0.0);
  CHECK(f.hess(0, 1) == 1.0);
  CHECK(f.hess(1, 0) == 1.0);
  CHECK(f.hess(1, 1) == 0.0);
}

TEST_CASE("dual constant and seeding") {
  DualQuadScalar c(4.0, 3);
  for (double g : c.grad()) CHECK(g == 0.0);
  for (double h : c.hess()) CHECK(h == 0.0);
  auto s = seed_variable(0, 2.0, 1);
  CHECK(s.value() == 2.0);
  CHECK(s.grad(0) == 1.0);
  CHECK(s.hess(0, 0) == 0.0);
  auto t = seed_variable(1, -1.0, 3);
  CHECK(t.grad() == std::vector<double>{0, 1, 0});
  CHECK_THROWS_AS(seed_variable(3, 0.0, 3), IndexOutOfRange);
  CHECK_THROWS_AS(seed_variable(-1, 0.0, 3), IndexOutOfRange);
  CHECK_THROWS_AS(seed_variable(0, 1.0, 2) + seed_variable(0, 1.0, 3), VarCountMismatch);
}

TEST_CASE("dual sin at zero matches central differences") {
  auto x = seed_variable(0, 0.0, 1);
  auto f = sin(x);
  const double h1 = 1e-5, h2 = 1e-4;
  const double fd1 = (std::sin(h1) - std::sin(-h1)) / (2 * h1);
  const double fd2 = (std::sin(h2) - 2 * std::sin(0.0) + std::sin(-h2)) / (h2 * h2);
  CHECK(f.value() == 0.0);
  CHECK(f.grad(0) == doctest::Approx(fd1).epsilon(1e-9));
  CHECK(std::fabs(f.hess(0, 0) - fd2) < 1e-6);
}

TEST_CASE("dual x^2 y hessian") {
  auto x = seed_variable(0, 2.0, 2);
  auto y = seed_variable(1, 3.0, 2);
  auto f = power(x, 2.0) * y;
  CHECK(f.hess(0, 0) == 6.0);
  CHECK(f.hess(0, 1) == 4.0);
  CHECK(f.hess(1, 1) == 0.0);
}

TEST_CASE("property: dual derivatives match central differences") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const double x0 = U(rng), y0 = U(rng);
    auto f = smooth(seed_variable(0, x0, 2), seed_variable(1, y0, 2));
    auto F = [](double x, double y) { return smooth(x, y); };
    const double h = 1e-5, H = 1e-4;
    const double gx = (F(x0 + h, y0) - F(x0 - h, y0)) / (2 * h);
    const double gy = (F(x0, y0 + h) - F(x0, y0 - h)) / (2 * h);
    const double hxx = (F(x0 + H, y0) - 2 * F(x0, y0) + F(x0 - H, y0)) / (H * H);
    const double hyy = (F(x0, y0 + H) - 2 * F(x0, y0) + F(x0, y0 - H)) / (H * H);
    const double hxy =
        (F(x0 + H, y0 + H) - F(x0 + H, y0 - H) - F(x0 - H, y0 + H) + F(x0 - H, y0 - H)) / (4 * H * H);
    CHECK(f.value() == doctest::Approx(F(x0, y0)).epsilon(1e-14));
    CHECK(rel(f.grad(0), gx) <= 1e-5);
    CHECK(rel(f.grad(1), gy) <= 1e-5);
    CHECK(rel(f.hess(0, 0), hxx) <= 1e-5);
    CHECK(rel(f.hess(1, 1), hyy) <= 1e-5);
    CHECK(rel(f.hess(0, 1), hxy) <= 1e-5);
    CHECK(f.hess(0, 1) == f.hess(1, 0));
  }
}

TEST_CASE("taylor over duals differentiates coefficients") {
  // c2 of exp(a + b t) is b^2 e^a / 2; check d/da and d/db.
  auto a = seed_variable(0, 0.3, 2);
  auto b = seed_variable(1, 0.7, 2);
  Taylor<DualQuadScalar> s(std::vector<DualQuadScalar>{a, b, zero_like(a)});
  auto e = exp(s);
  const double ea = std::exp(0.3);
  CHECK(e[2].value() == doctest::Approx(0.49 * ea / 2));
  CHECK(e[2].grad(0) == doctest::Approx(0.49 * ea / 2));
  CHECK(e[2].grad(1) == doctest::Approx(0.7 * ea));
  CHECK(e[2].hess(1, 1) == doctest::Approx(ea));
}

TEST_CASE("power series agrees with Taylor along lines") {
  auto table = MonomialTable::get(3, 5);
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> U(-1, 1);
  const std::vector<double> x0{0.4, -0.2, 0.9};
  std::vector<PowerSeries> v;
  for (int i = 0; i < 3; ++i) v.push_back(PowerSeries::variable(table, i, x0[i]));
  auto f = exp(v[0] * v[1]) / (v[2] * v[2] + 1.0) + power(v[2] + 2.0, 1.5) * atan(v[0] - v[1]) +
           tan(v[1]) * log(v[2]);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> d{U(rng), U(rng), U(rng)};
    std::vector<TaylorScalar> w;
    for (int i = 0; i < 3; ++i) w.push_back(TaylorScalar({x0[i], d[i], 0, 0, 0, 0}));
    auto g = exp(w[0] * w[1]) / (w[2] * w[2] + 1.0) + power(w[2] + 2.0, 1.5) * atan(w[0] - w[1]) +
             tan(w[1]) * log(w[2]);
    std::vector<double> by_degree(6, 0.0);
    for (int m = 0; m < table->size(); ++m) {
      double term = f.coeff(m);
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < table->exponents(m)[i]; ++k) term *= d[i];
      by_degree[table->degree(m)] += term;
    }
    for (int k = 0; k <= 5; ++k) CHECK(std::fabs(by_degree[k] - g[k]) <= 1e-11 * std::max(1.0, std::fabs(g[k])));
  }
}

TEST_CASE("power series derivative, remap and substitute") {
  auto t2 = MonomialTable::get(2, 4);
  auto x = PowerSeries::variable(t2, 0, 0.0);
  auto y = PowerSeries::variable(t2, 1, 0.0);
  auto f = x * x * y + y * y * y * 3.0 + x;
  auto fx = derivative(f, 0);  // 2xy + 1
  CHECK(fx.order() == 3);
  CHECK(fx.constant_term() == 1.0);
  CHECK(fx.coeff({1, 1}) == 2.0);
  CHECK(f.second(1, 1) == 0.0);
  CHECK(f.linear(0) == 1.0);

  // restrict to y = 0 -> x
  auto t1 = MonomialTable::get(1, 4);
  auto r = remap(f, t1, {0, -1});
  CHECK(r.coeff({1}) == 1.0);
  CHECK(r.coeff({3}) == 0.0);

  // substitute x = s + s^2, y = 2 s in one variable s
  auto s = PowerSeries::variable(t1, 0, 0.0);
  auto g = substitute(f, {s + s * s, s * 2.0});
  // f = (s+s^2)^2 (2s) + 24 s^3 + s + s^2 = s + s^2 + 26 s^3 + 4 s^4 + ...
  CHECK(g.coeff({1}) == doctest::Approx(1.0));
  CHECK(g.coeff({2}) == doctest::Approx(1.0));
  CHECK(g.coeff({3}) == doctest::Approx(26.0));
  CHECK(g.coeff({4}) == doctest::Approx(4.0));
  CHECK_THROWS_AS(substitute(f, {s + 1.0, s}), InvariantViolation);
  CHECK_THROWS_AS(derivative(derivative(derivative(derivative(derivative(f, 0), 0), 0), 0), 0),
                  OrderError);
}

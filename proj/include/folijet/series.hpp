#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "folijet/error.hpp"
#include "folijet/scalar.hpp"

namespace folijet {

/// Graded list of monomials in nvars variables up to total degree maxorder,
/// with the product and derivative index tables precomputed.
class MonomialTable {
 public:
  /// Shared, cached instance.
  static std::shared_ptr<const MonomialTable> get(int nvars, int maxorder);

  MonomialTable(int nvars, int maxorder);

  int nvars() const { return nvars_; }
  int maxorder() const { return maxorder_; }
  int size() const { return static_cast<int>(degree_.size()); }
  int degree(int m) const { return degree_[m]; }
  /// Number of monomials of degree <= d.
  int count_upto(int d) const { return offsets_[d + 1]; }
  const int* exponents(int m) const { return &exps_[static_cast<size_t>(m) * nvars_]; }
  /// -1 if the exponent vector is out of range.
  int index_of(const std::vector<int>& e) const;

  /// Partners of monomial i: pairs (j, k) with m_i * m_j = m_k, j ascending.
  struct Pair {
    int j;
    int k;
  };
  const Pair* pairs_begin(int i) const { return pairs_.data() + pair_offsets_[i]; }
  const Pair* pairs_end(int i) const { return pairs_.data() + pair_offsets_[i + 1]; }

  /// Index of m / x_v, or -1 when x_v does not divide m.
  int lower(int m, int v) const { return lower_[static_cast<size_t>(m) * nvars_ + v]; }

 private:
  int nvars_;
  int maxorder_;
  std::vector<int> exps_;
  std::vector<int> degree_;
  std::vector<int> offsets_;
  std::vector<Pair> pairs_;
  std::vector<int> pair_offsets_;
  std::vector<int> lower_;
  std::unordered_map<uint64_t, int> index_;
};

/// Truncated multivariate power series about the origin of its variables.
/// order() is the degree through which the coefficients are exact; it can be
/// lower than the table's maxorder after differentiation.
class PowerSeries {
 public:
  PowerSeries() = default;
  explicit PowerSeries(std::shared_ptr<const MonomialTable> table);

  static PowerSeries constant(std::shared_ptr<const MonomialTable> table, double c);
  /// value + (variable v).
  static PowerSeries variable(std::shared_ptr<const MonomialTable> table, int v, double value);

  const std::shared_ptr<const MonomialTable>& table() const { return t_; }
  int nvars() const { return t_ ? t_->nvars() : 0; }
  int order() const { return order_; }
  void set_order(int order);
  double constant_term() const { return c_.empty() ? 0.0 : c_[0]; }
  double coeff(int m) const { return c_[m]; }
  double coeff(const std::vector<int>& exponents) const;
  void set_coeff(int m, double v) { c_[m] = v; }
  const std::vector<double>& coeffs() const { return c_; }

  /// Coefficient of the linear term in variable v (= first partial at 0).
  double linear(int v) const;
  /// Second partial ∂²/∂v∂w at 0.
  double second(int v, int w) const;

  /// Sum of the terms of degree <= order() at `delta`.
  double evaluate(const std::vector<double>& delta) const;

  PowerSeries operator-() const;
  PowerSeries& operator+=(const PowerSeries& b);
  PowerSeries& operator-=(const PowerSeries& b);
  PowerSeries& operator+=(double b);
  PowerSeries& operator*=(double b);

  friend PowerSeries operator+(PowerSeries a, const PowerSeries& b) { return a += b; }
  friend PowerSeries operator-(PowerSeries a, const PowerSeries& b) { return a -= b; }
  friend PowerSeries operator+(PowerSeries a, double b) { return a += b; }
  friend PowerSeries operator+(double a, PowerSeries b) { return b += a; }
  friend PowerSeries operator-(PowerSeries a, double b) { return a += -b; }
  friend PowerSeries operator-(double a, const PowerSeries& b) { return (-b) += a; }
  friend PowerSeries operator*(PowerSeries a, double b) { return a *= b; }
  friend PowerSeries operator*(double a, PowerSeries b) { return b *= a; }
  friend PowerSeries operator/(PowerSeries a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a *= 1.0 / b;
  }
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator/(const PowerSeries& a, const PowerSeries& b);
  friend PowerSeries operator/(double a, const PowerSeries& b);

 private:
  friend PowerSeries derivative(const PowerSeries& a, int v);
  void check_same(const PowerSeries& b) const;

  std::shared_ptr<const MonomialTable> t_;
  std::vector<double> c_;
  int order_ = 0;
};

inline double value_of(const PowerSeries& a) { return a.constant_term(); }
PowerSeries zero_like(const PowerSeries& a);
PowerSeries constant_like(const PowerSeries& a, double c);

/// ∂a/∂x_v; the result is exact one degree lower.
PowerSeries derivative(const PowerSeries& a, int v);

/// Γ-style directional derivative Σ_v w_v ∂a/∂x_v with series weights.
PowerSeries directional(const PowerSeries& a, const std::vector<PowerSeries>& weights);

/// Move a into `table`, sending variable v to map[v] (or setting it to zero if
/// map[v] < 0). Used both to restrict to a subspace and to embed.
PowerSeries remap(const PowerSeries& a, std::shared_ptr<const MonomialTable> table,
                  const std::vector<int>& map);

/// f(args[0], ..., args[n-1]) with args living in a common table. Arguments
/// must have zero constant term so that truncation stays consistent.
PowerSeries substitute(const PowerSeries& f, const std::vector<PowerSeries>& args);

/// Solves A x = b over series (Gaussian elimination, pivoting on constant
/// terms). Throws DomainError if the constant part of A is singular.
std::vector<PowerSeries> solve(std::vector<std::vector<PowerSeries>> A, std::vector<PowerSeries> b);

PowerSeries apply(Func f, const PowerSeries& a);
PowerSeries power(const PowerSeries& a, double c);

inline PowerSeries exp(const PowerSeries& a) { return apply(Func::exp, a); }
inline PowerSeries log(const PowerSeries& a) { return apply(Func::log, a); }
inline PowerSeries sin(const PowerSeries& a) { return apply(Func::sin, a); }
inline PowerSeries cos(const PowerSeries& a) { return apply(Func::cos, a); }
inline PowerSeries sqrt(const PowerSeries& a) { return apply(Func::sqrt, a); }
inline PowerSeries tan(const PowerSeries& a) { return apply(Func::tan, a); }
inline PowerSeries atan(const PowerSeries& a) { return apply(Func::atan, a); }

}  // namespace folijet

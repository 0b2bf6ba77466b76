#include "folijet/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>

#include "folijet/taylor.hpp"

namespace folijet {

namespace {

void enumerate(int nvars, int degree, std::vector<int>& cur, int pos, std::vector<int>& out) {
  if (pos == nvars - 1) {
    cur[pos] = degree;
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur[pos] = e;
    enumerate(nvars, degree - e, cur, pos + 1, out);
  }
}

uint64_t encode(const int* e, int nvars, int base) {
  uint64_t key = 0;
  for (int v = 0; v < nvars; ++v) key = key * static_cast<uint64_t>(base) + static_cast<uint64_t>(e[v]);
  return key;
}

}  // namespace

MonomialTable::MonomialTable(int nvars, int maxorder) : nvars_(nvars), maxorder_(maxorder) {
  if (nvars < 0 || maxorder < 0) throw OrderError("monomial table needs nvars >= 0 and order >= 0");
  offsets_.push_back(0);
  std::vector<int> cur(nvars, 0);
  for (int d = 0; d <= maxorder; ++d) {
    if (nvars == 0) {
      if (d == 0) degree_.push_back(0);
    } else {
      const size_t before = exps_.size();
      enumerate(nvars, d, cur, 0, exps_);
      degree_.insert(degree_.end(), (exps_.size() - before) / nvars, d);
    }
    offsets_.push_back(static_cast<int>(degree_.size()));
  }

  index_.reserve(degree_.size() * 2);
  for (int m = 0; m < size(); ++m) index_[encode(exponents(m), nvars_, maxorder_ + 1)] = m;

  std::vector<int> e(nvars_);
  auto lookup = [&](const std::vector<int>& ex) { return index_of(ex); };

  pair_offsets_.push_back(0);
  for (int i = 0; i < size(); ++i) {
    const int room = maxorder_ - degree_[i];
    for (int j = 0; j < count_upto(room); ++j) {
      for (int v = 0; v < nvars_; ++v) e[v] = exponents(i)[v] + exponents(j)[v];
      pairs_.push_back({j, lookup(e)});
    }
    pair_offsets_.push_back(static_cast<int>(pairs_.size()));
  }

  lower_.assign(static_cast<size_t>(size()) * nvars_, -1);
  for (int m = 0; m < size(); ++m) {
    for (int v = 0; v < nvars_; ++v) {
      if (exponents(m)[v] == 0) continue;
      for (int w = 0; w < nvars_; ++w) e[w] = exponents(m)[w];
      e[v] -= 1;
      lower_[static_cast<size_t>(m) * nvars_ + v] = lookup(e);
    }
  }
}

std::shared_ptr<const MonomialTable> MonomialTable::get(int nvars, int maxorder) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nvars, maxorder}];
  if (!slot) slot = std::make_shared<const MonomialTable>(nvars, maxorder);
  return slot;
}

int MonomialTable::index_of(const std::vector<int>& e) const {
  if (static_cast<int>(e.size()) != nvars_) return -1;
  int deg = 0;
  for (int x : e) {
    if (x < 0) return -1;
    deg += x;
  }
  if (deg > maxorder_) return -1;
  auto it = index_.find(encode(e.data(), nvars_, maxorder_ + 1));
  return it == index_.end() ? -1 : it->second;
}

PowerSeries::PowerSeries(std::shared_ptr<const MonomialTable> table)
    : t_(std::move(table)), c_(t_->size(), 0.0), order_(t_->maxorder()) {}

PowerSeries PowerSeries::constant(std::shared_ptr<const MonomialTable> table, double c) {
  PowerSeries s(std::move(table));
  s.c_[0] = c;
  return s;
}

PowerSeries PowerSeries::variable(std::shared_ptr<const MonomialTable> table, int v, double value) {
  if (v < 0 || v >= table->nvars()) throw IndexOutOfRange("series variable index out of range");
  PowerSeries s = constant(std::move(table), value);
  if (s.t_->maxorder() >= 1) s.c_[1 + v] = 1.0;
  return s;
}

void PowerSeries::set_order(int order) {
  order_ = std::clamp(order, 0, t_->maxorder());
  std::fill(c_.begin() + t_->count_upto(order_), c_.end(), 0.0);
}

double PowerSeries::coeff(const std::vector<int>& exponents) const {
  const int m = t_->index_of(exponents);
  if (m < 0) throw IndexOutOfRange("monomial outside the series table");
  return c_[m];
}

double PowerSeries::linear(int v) const {
  if (order_ < 1) throw OrderError("series has no exact linear part");
  return c_[1 + v];
}

double PowerSeries::second(int v, int w) const {
  if (order_ < 2) throw OrderError("series has no exact quadratic part");
  std::vector<int> e(t_->nvars(), 0);
  e[v] += 1;
  e[w] += 1;
  return c_[t_->index_of(e)] * (v == w ? 2.0 : 1.0);
}

double PowerSeries::evaluate(const std::vector<double>& delta) const {
  if (static_cast<int>(delta.size()) != nvars()) throw VarCountMismatch("evaluate: wrong point size");
  double sum = 0.0;
  for (int m = 0; m < t_->count_upto(order_); ++m) {
    if (c_[m] == 0.0) continue;
    double term = c_[m];
    const int* e = t_->exponents(m);
    for (int v = 0; v < nvars(); ++v)
      for (int k = 0; k < e[v]; ++k) term *= delta[v];
    sum += term;
  }
  return sum;
}

void PowerSeries::check_same(const PowerSeries& b) const {
  if (t_ != b.t_) {
    if (!t_ || !b.t_ || t_->nvars() != b.t_->nvars())
      throw VarCountMismatch("power series over different variable sets");
    throw OrderMismatch("power series over different truncation tables");
  }
}

PowerSeries PowerSeries::operator-() const {
  PowerSeries out = *this;
  for (auto& x : out.c_) x = -x;
  return out;
}

PowerSeries& PowerSeries::operator+=(const PowerSeries& b) {
  check_same(b);
  for (size_t m = 0; m < c_.size(); ++m) c_[m] += b.c_[m];
  if (b.order_ < order_) set_order(b.order_);
  return *this;
}

PowerSeries& PowerSeries::operator-=(const PowerSeries& b) {
  check_same(b);
  for (size_t m = 0; m < c_.size(); ++m) c_[m] -= b.c_[m];
  if (b.order_ < order_) set_order(b.order_);
  return *this;
}

PowerSeries& PowerSeries::operator+=(double b) {
  c_[0] += b;
  return *this;
}

PowerSeries& PowerSeries::operator*=(double b) {
  for (auto& x : c_) x *= b;
  return *this;
}

PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
  a.check_same(b);
  const MonomialTable& t = *a.t_;
  const int order = std::min(a.order_, b.order_);
  PowerSeries out(a.t_);
  out.order_ = order;
  for (int i = 0; i < t.count_upto(order); ++i) {
    const double ai = a.c_[i];
    if (ai == 0.0) continue;
    const int jmax = t.count_upto(order - t.degree(i));
    for (const auto* p = t.pairs_begin(i); p != t.pairs_end(i) && p->j < jmax; ++p) {
      const double bj = b.c_[p->j];
      if (bj != 0.0) out.c_[p->k] += ai * bj;
    }
  }
  return out;
}

namespace {

// f(a) as Σ_k u_k (a - a0)^k with u the univariate expansion of f about a0.
PowerSeries horner(const TaylorScalar& u, const PowerSeries& a) {
  PowerSeries tail = a;
  tail.set_coeff(0, 0.0);
  const int n = a.order();
  PowerSeries r = constant_like(a, u[n]);
  r.set_order(n);
  for (int k = n - 1; k >= 0; --k) r = r * tail + u[k];
  return r;
}

}  // namespace

PowerSeries operator/(double a, const PowerSeries& b) {
  const double b0 = b.constant_term();
  if (b0 == 0.0) throw DomainError("division by a series with zero constant term");
  const TaylorScalar u = a / TaylorScalar::variable(b.order(), b0);
  return horner(u, b);
}

PowerSeries operator/(const PowerSeries& a, const PowerSeries& b) { return a * (1.0 / b); }

PowerSeries zero_like(const PowerSeries& a) {
  PowerSeries out(a.table());
  out.set_order(a.order());
  return out;
}

PowerSeries constant_like(const PowerSeries& a, double c) {
  return PowerSeries::constant(a.table(), c);
}

PowerSeries derivative(const PowerSeries& a, int v) {
  if (v < 0 || v >= a.nvars()) throw IndexOutOfRange("derivative variable out of range");
  if (a.order_ < 1) throw OrderError("derivative of a series with no exact linear part");
  const MonomialTable& t = *a.t_;
  PowerSeries out(a.t_);
  for (int m = 0; m < t.count_upto(a.order_); ++m) {
    if (a.c_[m] == 0.0) continue;
    const int lm = t.lower(m, v);
    if (lm >= 0) out.c_[lm] += a.c_[m] * t.exponents(m)[v];
  }
  out.order_ = a.order_ - 1;
  return out;
}

PowerSeries directional(const PowerSeries& a, const std::vector<PowerSeries>& weights) {
  if (static_cast<int>(weights.size()) != a.nvars())
    throw VarCountMismatch("directional derivative needs one weight per variable");
  PowerSeries out = zero_like(a);
  out.set_order(a.order() - 1);
  for (int v = 0; v < a.nvars(); ++v) {
    const auto& w = weights[v].coeffs();
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) continue;
    out += weights[v] * derivative(a, v);
  }
  return out;
}

PowerSeries remap(const PowerSeries& a, std::shared_ptr<const MonomialTable> table,
                  const std::vector<int>& map) {
  if (static_cast<int>(map.size()) != a.nvars()) throw VarCountMismatch("remap needs one entry per variable");
  const MonomialTable& src = *a.table();
  PowerSeries out(table);
  const int order = std::min(a.order(), table->maxorder());
  std::vector<int> e(table->nvars());
  for (int m = 0; m < src.count_upto(order); ++m) {
    const double c = a.coeff(m);
    if (c == 0.0) continue;
    std::fill(e.begin(), e.end(), 0);
    bool killed = false;
    for (int v = 0; v < src.nvars(); ++v) {
      const int x = src.exponents(m)[v];
      if (x == 0) continue;
      if (map[v] < 0 || map[v] >= table->nvars()) {
        killed = true;
        break;
      }
      e[map[v]] += x;
    }
    if (killed) continue;
    out.set_coeff(table->index_of(e), out.coeff(table->index_of(e)) + c);
  }
  out.set_order(order);
  return out;
}

PowerSeries substitute(const PowerSeries& f, const std::vector<PowerSeries>& args) {
  if (static_cast<int>(args.size()) != f.nvars())
    throw VarCountMismatch("substitute needs one argument per variable");
  if (args.empty()) return f;
  const auto& table = args[0].table();
  int order = f.order();
  for (const auto& g : args) {
    if (g.table() != table) throw VarCountMismatch("substitute arguments live in different tables");
    if (g.constant_term() != 0.0) throw InvariantViolation("substitute argument has a constant term");
    order = std::min(order, g.order());
  }
  const MonomialTable& src = *f.table();
  const int n = src.count_upto(std::min(f.order(), src.maxorder()));
  std::vector<PowerSeries> powers;
  powers.reserve(n);
  PowerSeries out(table);
  for (int m = 0; m < n; ++m) {
    if (m == 0) {
      powers.push_back(PowerSeries::constant(table, 1.0));
    } else {
      int v = 0;
      while (src.exponents(m)[v] == 0) ++v;
      powers.push_back(powers[src.lower(m, v)] * args[v]);
    }
    if (f.coeff(m) != 0.0) out += powers.back() * f.coeff(m);
  }
  out.set_order(order);
  return out;
}

std::vector<PowerSeries> solve(std::vector<std::vector<PowerSeries>> A, std::vector<PowerSeries> b) {
  const int n = static_cast<int>(b.size());
  if (static_cast<int>(A.size()) != n) throw VarCountMismatch("solve: matrix and right-hand side differ in size");
  for (const auto& row : A)
    if (static_cast<int>(row.size()) != n) throw VarCountMismatch("solve: matrix must be square");
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int i = c + 1; i < n; ++i)
      if (std::fabs(A[i][c].constant_term()) > std::fabs(A[piv][c].constant_term())) piv = i;
    if (A[piv][c].constant_term() == 0.0) throw DomainError("solve: singular leading matrix");
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    const PowerSeries inv = 1.0 / A[c][c];
    for (int i = c + 1; i < n; ++i) {
      const PowerSeries f = A[i][c] * inv;
      for (int j = c + 1; j < n; ++j) A[i][j] -= f * A[c][j];
      b[i] -= f * b[c];
    }
  }
  std::vector<PowerSeries> x(n);
  for (int i = n - 1; i >= 0; --i) {
    PowerSeries s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
    x[i] = s / A[i][i];
  }
  return x;
}

PowerSeries apply(Func f, const PowerSeries& a) {
  const TaylorScalar u = apply(f, TaylorScalar::variable(a.order(), a.constant_term()));
  return horner(u, a);
}

PowerSeries power(const PowerSeries& a, double c) {
  if (is_small_integer(c)) return ipower(a, static_cast<int>(c));
  const TaylorScalar u = power(TaylorScalar::variable(a.order(), a.constant_term()), c);
  return horner(u, a);
}

}  // namespace folijet

#pragma once
// Independent reference computations shared by the unit tests and the
// acceptance binary. Nothing here is used by the library itself.

#include <cmath>
#include <string>
#include <vector>

#include "folijet/atlas.hpp"
#include "folijet/jet.hpp"
#include "folijet/series.hpp"

namespace oracle {

using folijet::PowerSeries;

/// Jet transport by the literal recursion
///   y'^(1) = y^(1) ∂x'/∂x,   k y'^(k) = Σ_{m=1..k} m y^(m) ∂y'^(k-1)/∂y^(m-1),
/// with y'^(k-1) kept as a truncated series in (δx, δy^(1), ..., δy^(r)) so
/// its partials can be taken symbolically. No Taylor-curve composition.
inline folijet::TransverseJetPoint literal_prolong(const folijet::Transition& t,
                                                   const folijet::TransverseJetPoint& p) {
  const int q = p.q();
  const int r = p.order;
  const int n = (r + 1) * q;
  auto table = folijet::MonomialTable::get(n, r);
  auto var = [&](int level, int i) {
    const double v = level == 0 ? p.base[i] : p.jets[level - 1][i];
    return PowerSeries::variable(table, level * q + i, v);
  };
  std::vector<PowerSeries> x;
  for (int i = 0; i < q; ++i) x.push_back(var(0, i));
  std::vector<PowerSeries> prev = t.map_transverse(x);

  folijet::TransverseJetPoint out = p;
  out.chart = t.to;
  out.leaf = t.map_leaf(p.leaf, p.base);
  for (int i = 0; i < q; ++i) out.base[i] = prev[i].constant_term();
  for (int k = 1; k <= r; ++k) {
    std::vector<PowerSeries> next;
    for (int i = 0; i < q; ++i) {
      PowerSeries acc;
      bool first = true;
      for (int m = 1; m <= k; ++m)
        for (int a = 0; a < q; ++a) {
          PowerSeries term = var(m, a) * folijet::derivative(prev[i], (m - 1) * q + a) * static_cast<double>(m);
          if (first) {
            acc = term;
            first = false;
          } else {
            acc += term;
          }
        }
      next.push_back(acc / static_cast<double>(k));
    }
    for (int i = 0; i < q; ++i) out.jets[k - 1][i] = next[i].constant_term();
    prev = std::move(next);
  }
  return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (!(d <= m)) m = d;  // NaN propagates as a failure
  }
  return m;
}

inline double jet_distance(const folijet::TransverseJetPoint& a, const folijet::TransverseJetPoint& b) {
  double d = std::max(max_abs_diff(a.flat(), b.flat()), max_abs_diff(a.leaf, b.leaf));
  if (a.chart != b.chart || a.order != b.order) d = INFINITY;
  return d;
}

/// Random jet point over a sampled (leaf, base) with normal jets of the given scale.
inline folijet::TransverseJetPoint random_jet(const std::string& chart, int p, const std::vector<double>& point, int r,
                                              folijet::Rng& rng, double scale) {
  folijet::TransverseJetPoint j;
  j.chart = chart;
  j.order = r;
  j.leaf.assign(point.begin(), point.begin() + p);
  j.base.assign(point.begin() + p, point.end());
  for (int k = 0; k < r; ++k) {
    std::vector<double> row;
    for (size_t i = 0; i < j.base.size(); ++i) row.push_back(scale * rng.normal());
    j.jets.push_back(row);
  }
  return j;
}

}  // namespace oracle

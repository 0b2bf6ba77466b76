#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "folijet/dynamics.hpp"

namespace folijet {

/// A transverse metric g_x in one chart, components over x1..xq.
class MetricField {
 public:
  MetricField() = default;
  /// Checks free variables and positive-definiteness at `samples` points of
  /// the domain (if given). Throws UnknownVariable, InvariantViolation.
  static MetricField from_exprs(std::string name, std::string chart, std::vector<std::vector<ExprProgram>> components,
                                const Box* domain = nullptr, int leaf_dim = 0, int samples = 50);
  static MetricField from_spec(const FoliatedAtlas& atlas, const MetricSpec& spec, int samples = 50);

  const std::string& name() const { return name_; }
  const std::string& chart() const { return chart_; }
  int q() const { return static_cast<int>(components_.size()); }
  /// Leaf coordinates first, like chart domains; empty if unknown.
  const Box& domain() const { return domain_; }
  int leaf_dim() const { return leaf_dim_; }

  Eigen::MatrixXd operator()(const std::vector<double>& x) const;

  template <class T>
  std::vector<std::vector<T>> eval(const std::vector<T>& x) const {
    std::vector<std::vector<T>> out(q(), std::vector<T>(q()));
    for (int a = 0; a < q(); ++a)
      for (int b = a; b < q(); ++b) out[a][b] = out[b][a] = bound_[a][b](x);
    return out;
  }

 private:
  std::string name_;
  std::string chart_;
  std::vector<std::vector<ExprProgram>> components_;
  std::vector<std::vector<BoundProgram>> bound_;
  Box domain_;
  int leaf_dim_ = 0;
};

/// Γ^a_bc at base, indexed [a][b][c]. Throws SingularMetric.
std::vector<std::vector<std::vector<double>>> christoffel(const MetricField& g, const std::vector<double>& base);

/// S^(1) of L^(1) = g(y, y) at an order-1 point, computed both from the
/// lagrangian formula and as ¼ Γ^a_bc y^b y^c. Throws InvariantViolation if
/// the two disagree beyond 1e-9 (relative).
std::vector<double> geodesic_spray(const MetricField& g, const TransverseJetPoint& point);

/// Truncated expansions of the lift about a point of order r: L^(r) and the
/// chart-invariant sprays σ^(k) = -2·S^(k) of L^(k), k = 1..r.
struct LiftExpansion {
  PowerSeries L;
  std::vector<std::vector<PowerSeries>> sigma;  // sigma[k-1]
};
/// `degree`: exact degree wanted for L^(r) and for the last spray returned.
LiftExpansion lift_expansion(const MetricField& g, const TransverseJetPoint& p, int degree, bool top_spray);

/// L^(r) = L^(r-1) + g(y^(r) - σ^(r-1), y^(r) - σ^(r-1)), L^(1) = g(y, y).
LagrangianField lift_lagrangian(const MetricField& g, int r);

/// The spray of L^(r) in closed form (σ^(r) from the recursion).
SemiSprayField lift_spray(const MetricField& g, int r);

/// Lifted metric on ν F^r: g copied onto H̄_0, J H̄_0, ..., J^r H̄_0, summands
/// orthogonal. One presentation per chart.
class LiftedMetric {
 public:
  LiftedMetric() = default;
  LiftedMetric(std::vector<MetricField> family, int r);

  int order() const { return order_; }
  const std::vector<MetricField>& family() const { return family_; }
  const MetricField& source(const std::string& chart) const;
  bool has_chart(const std::string& chart) const;

  Eigen::MatrixXd operator()(const TransverseJetPoint& p) const;

 private:
  std::vector<MetricField> family_;
  int order_ = 1;
};

LiftedMetric lift_metric(const MetricField& g, int r);
LiftedMetric lift_metric(const std::vector<MetricField>& family, int r);

struct HolonomyOptions {
  double tolerance = 1e-7;
  double jet_scale = 0.5;
};

/// DΦᵀ G(Φ ξ) DΦ == G(ξ) for every transition between charts that carry a
/// presentation. Deviation relative to max(1, max|G(ξ)|).
ValidationReport holonomy_check(const FoliatedAtlas& atlas, const LiftedMetric& lifted, int samples, uint64_t seed,
                                const HolonomyOptions& opts = {});

/// Top vertical block of G against ½·Hess L at sampled points of each
/// presentation's domain.
ValidationReport vertical_exactness_check(const LiftedMetric& lifted, const LagrangianField& L, int samples,
                                          uint64_t seed, double tolerance = 1e-8);

}  // namespace folijet

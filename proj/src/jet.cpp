#include "folijet/jet.hpp"

#include <cmath>

#include "folijet/dual.hpp"

namespace folijet {

namespace {

double factorial_ratio(int n, int k) {
  // n!/k! for n >= k, exact for the small orders used here
  double out = 1.0;
  for (int i = k + 1; i <= n; ++i) out *= i;
  return out;
}

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw DomainError(std::string("non-finite entry in ") + what);
}

std::vector<double> combined(const TransverseJetPoint& p) {
  std::vector<double> out = p.leaf;
  out.insert(out.end(), p.base.begin(), p.base.end());
  return out;
}

double transverse_det(const Transition& t, const std::vector<double>& base) {
  const int q = static_cast<int>(base.size());
  std::vector<DualQuadScalar> x;
  for (int i = 0; i < q; ++i) x.push_back(seed_variable(i, base[i], q));
  auto y = t.map_transverse(x);
  Eigen::MatrixXd d(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) d(i, j) = y[i].grad(j);
  return d.determinant();
}

void check_point(const FoliatedAtlas& atlas, const Transition& t, const TransverseJetPoint& p, double det_threshold) {
  p.check();
  if (p.chart != t.from)
    throw InvariantViolation("jet point lives in chart '" + p.chart + "' but transition " + t.name + " starts at '" +
                             t.from + "'");
  if (static_cast<int>(p.leaf.size()) != atlas.leaf_dim || p.q() != atlas.transverse_dim)
    throw ShapeError("jet point dimensions do not match the atlas");
  if (!t.overlap.contains(combined(p), 0.0)) throw OutsideOverlap("jet point outside the overlap of " + t.name);
  const double det = transverse_det(t, p.base);
  if (!(std::fabs(det) > det_threshold))
    throw DomainError("transverse Jacobian of " + t.name + " is singular at the base point");
}

}  // namespace

void TransverseJetPoint::check() const {
  if (order < 1) throw OrderError("jet order must be at least 1");
  if (base.empty()) throw ShapeError("empty base point");
  if (static_cast<int>(jets.size()) != order) throw ShapeError("jets must have exactly r rows");
  for (const auto& row : jets)
    if (row.size() != base.size()) throw ShapeError("jet rows must have q entries");
  check_finite(leaf, "leaf");
  check_finite(base, "base");
  for (const auto& row : jets) check_finite(row, "jets");
}

std::vector<double> TransverseJetPoint::flat() const {
  std::vector<double> out = base;
  for (const auto& row : jets) out.insert(out.end(), row.begin(), row.end());
  return out;
}

TransverseJetPoint TransverseJetPoint::from_flat(std::string chart, std::vector<double> leaf,
                                                 const std::vector<double>& flat, int order) {
  if (order < 1 || flat.size() % (order + 1) != 0) throw ShapeError("flat jet has the wrong length");
  const size_t q = flat.size() / (order + 1);
  TransverseJetPoint p;
  p.chart = std::move(chart);
  p.order = order;
  p.leaf = std::move(leaf);
  p.base.assign(flat.begin(), flat.begin() + q);
  for (int k = 1; k <= order; ++k) p.jets.emplace_back(flat.begin() + k * q, flat.begin() + (k + 1) * q);
  return p;
}

nlohmann::json TransverseJetPoint::to_json() const {
  return {{"chart", chart}, {"order", order}, {"leaf", leaf}, {"base", base}, {"jets", jets}};
}

TransverseJetPoint transport_jets(const Transition& t, const TransverseJetPoint& point) {
  const int q = point.q();
  const int r = point.order;
  std::vector<TaylorScalar> curve;
  for (int i = 0; i < q; ++i) {
    std::vector<double> c(r + 1);
    c[0] = point.base[i];
    for (int k = 1; k <= r; ++k) c[k] = point.jets[k - 1][i];
    curve.emplace_back(std::move(c));
  }
  auto image = t.map_transverse(curve);
  TransverseJetPoint out;
  out.chart = t.to;
  out.order = r;
  out.leaf = t.map_leaf(point.leaf, point.base);
  out.base.resize(q);
  out.jets.assign(r, std::vector<double>(q));
  for (int i = 0; i < q; ++i) {
    out.base[i] = image[i][0];
    for (int k = 1; k <= r; ++k) out.jets[k - 1][i] = image[i][k];
  }
  return out;
}

TransverseJetPoint prolong_transition(const FoliatedAtlas& atlas, const Transition& t, const TransverseJetPoint& point,
                                      double det_threshold) {
  check_point(atlas, t, point, det_threshold);
  return transport_jets(t, point);
}

Eigen::MatrixXd prolong_jacobian(const FoliatedAtlas& atlas, const Transition& t, const TransverseJetPoint& point) {
  check_point(atlas, t, point, 1e-9);
  const int q = point.q();
  const int r = point.order;
  const int n = (r + 1) * q;
  // coefficient k of component i is variable k*q + i
  std::vector<Taylor<DualQuadScalar>> curve;
  for (int i = 0; i < q; ++i) {
    std::vector<DualQuadScalar> c;
    for (int k = 0; k <= r; ++k)
      c.push_back(seed_variable(k * q + i, k == 0 ? point.base[i] : point.jets[k - 1][i], n));
    curve.emplace_back(std::move(c));
  }
  auto image = t.map_transverse(curve);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int g = 0; g <= r; ++g)
    for (int i = 0; i < q; ++i) {
      const auto& c = image[i][g];
      if (c.nvars() == 0) continue;  // constant coefficient
      for (int v = 0; v < n; ++v) out(g * q + i, v) = c.grad(v);
    }
  return out;
}

TransverseJetPoint include_jet(int r_low, int r_high, const TransverseJetPoint& point) {
  if (r_low < 1) throw OrderError("include_jet needs r_low >= 1; use zero_section for order 0");
  if (r_low > r_high) throw OrderError("include_jet needs r_low <= r_high");
  if (point.order != r_low) throw OrderError("jet point order differs from r_low");
  const int shift = r_high - r_low;
  TransverseJetPoint out = point;
  out.order = r_high;
  out.jets.assign(r_high, std::vector<double>(point.q(), 0.0));
  for (int j = 1; j <= r_low; ++j) {
    const double f = factorial_ratio(shift + j, j);
    for (int i = 0; i < point.q(); ++i) out.jets[shift + j - 1][i] = f * point.jets[j - 1][i];
  }
  return out;
}

TransverseJetPoint zero_section(int r, const std::vector<double>& leaf, const std::vector<double>& base,
                                std::string chart) {
  if (r < 1) throw OrderError("zero_section needs r >= 1");
  TransverseJetPoint p;
  p.chart = std::move(chart);
  p.order = r;
  p.leaf = leaf;
  p.base = base;
  p.jets.assign(r, std::vector<double>(base.size(), 0.0));
  return p;
}

Eigen::MatrixXd j_matrix(int r, int q) {
  const int n = (r + 1) * q;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m.bottomLeftCorner(r * q, r * q).setIdentity();
  return m;
}

Eigen::MatrixXd j_dual_matrix(int r, int q) {
  const int n = (r + 1) * q;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  // the term dy^(k-1) ⊗ ∂/∂y^(k) sends ω to ω(∂/∂y^(k)) dy^(k-1)
  for (int k = 1; k <= r; ++k)
    for (int i = 0; i < q; ++i) m((k - 1) * q + i, k * q + i) += 1.0;
  return m;
}

TransverseFiberVector apply_J(const TransverseFiberVector& v, int k) {
  if (k < 1) throw OrderError("apply_J needs k >= 1");
  const int r = v.basepoint.order;
  const int q = v.basepoint.q();
  if (static_cast<int>(v.components.size()) != (r + 1) * q) throw ShapeError("fiber vector needs (r+1)q components");
  TransverseFiberVector out = v;
  std::fill(out.components.begin(), out.components.end(), 0.0);
  for (int b = 0; b + k <= r; ++b)
    for (int i = 0; i < q; ++i) out.components[(b + k) * q + i] = v.components[b * q + i];
  return out;
}

std::vector<double> apply_J_dual(const std::vector<double>& covector, int r, int q, int k) {
  if (k < 1) throw OrderError("apply_J_dual needs k >= 1");
  if (static_cast<int>(covector.size()) != (r + 1) * q) throw ShapeError("covector needs (r+1)q components");
  std::vector<double> out(covector.size(), 0.0);
  for (int b = k; b <= r; ++b)
    for (int i = 0; i < q; ++i) out[(b - k) * q + i] = covector[b * q + i];
  return out;
}

Eigen::MatrixXd restrict_to_zero_section(const std::function<Eigen::MatrixXd(const TransverseJetPoint&)>& metric_eval,
                                         int r, const std::vector<double>& leaf, const std::vector<double>& base,
                                         const std::string& chart) {
  const int q = static_cast<int>(base.size());
  Eigen::MatrixXd g = metric_eval(zero_section(r, leaf, base, chart));
  if (g.rows() != (r + 1) * q || g.cols() != (r + 1) * q) throw ShapeError("lifted metric has the wrong size");
  return g.topLeftCorner(q, q);
}

}  // namespace folijet

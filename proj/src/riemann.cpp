#include "folijet/riemann.hpp"

#include <cmath>

#include "folijet/dual.hpp"

namespace folijet {

namespace {

std::vector<std::string> transverse_names(int q) {
  std::vector<std::string> names;
  for (int i = 0; i < q; ++i) names.push_back(VariableName{VariableName::Kind::transverse, 0, i + 1}.str());
  return names;
}

using SeriesMatrix = std::vector<std::vector<PowerSeries>>;

std::vector<PowerSeries> matvec(const SeriesMatrix& G, const std::vector<PowerSeries>& w) {
  std::vector<PowerSeries> out;
  for (const auto& row : G) {
    PowerSeries s = row[0] * w[0];
    for (size_t b = 1; b < w.size(); ++b) s += row[b] * w[b];
    out.push_back(std::move(s));
  }
  return out;
}

PowerSeries dot(const std::vector<PowerSeries>& a, const std::vector<PowerSeries>& b) {
  PowerSeries s = a[0] * b[0];
  for (size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

PowerSeries to_degree(const PowerSeries& s, int degree) {
  std::vector<int> id(s.nvars());
  for (int v = 0; v < s.nvars(); ++v) id[v] = v;
  return remap(s, MonomialTable::get(s.nvars(), degree), id);
}

TransverseJetPoint random_point(const std::string& chart, int p, const std::vector<double>& pt, int r, Rng& rng,
                                double scale) {
  TransverseJetPoint j;
  j.chart = chart;
  j.order = r;
  j.leaf.assign(pt.begin(), pt.begin() + p);
  j.base.assign(pt.begin() + p, pt.end());
  for (int k = 0; k < r; ++k) {
    std::vector<double> row;
    for (size_t i = 0; i < j.base.size(); ++i) row.push_back(scale * rng.normal());
    j.jets.push_back(std::move(row));
  }
  return j;
}

}  // namespace

// ---------------------------------------------------------------- metric

MetricField MetricField::from_exprs(std::string name, std::string chart,
                                    std::vector<std::vector<ExprProgram>> components, const Box* domain, int leaf_dim,
                                    int samples) {
  const int q = static_cast<int>(components.size());
  if (q == 0) throw ShapeError("metric needs at least one component");
  for (const auto& row : components)
    if (static_cast<int>(row.size()) != q) throw ShapeError("metric components must be q×q");
  VariableContext ctx;
  ctx.transverse_dim = q;
  ctx.allow_leaf = false;
  ctx.allow_jets = false;
  MetricField g;
  g.name_ = std::move(name);
  g.chart_ = std::move(chart);
  const auto names = transverse_names(q);
  g.bound_.assign(q, std::vector<BoundProgram>(q));
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      components[a][b].check_variables(ctx, g.name_);
      // the upper triangle is authoritative
      if (b >= a) g.bound_[a][b] = g.bound_[b][a] = BoundProgram(components[a][b], names);
    }
  g.components_ = std::move(components);
  g.leaf_dim_ = leaf_dim;
  if (domain) {
    g.domain_ = *domain;
    for (const auto& pt : sample_box(*domain, samples, 0, "metric:" + g.name_ + "@" + g.chart_)) {
      std::vector<double> x(pt.begin() + leaf_dim, pt.end());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g(x), Eigen::EigenvaluesOnly);
      const double m = es.eigenvalues().minCoeff();
      if (!(m > 1e-9))
        throw InvariantViolation("metric " + g.name_ + " on chart " + g.chart_ +
                                 " is not positive-definite (min eigenvalue " + std::to_string(m) + ")");
    }
  }
  return g;
}

MetricField MetricField::from_spec(const FoliatedAtlas& atlas, const MetricSpec& spec, int samples) {
  return from_exprs(spec.name, spec.chart, spec.components, &atlas.chart(spec.chart).domain, atlas.leaf_dim, samples);
}

Eigen::MatrixXd MetricField::operator()(const std::vector<double>& x) const {
  auto m = eval(x);
  Eigen::MatrixXd out(q(), q());
  for (int a = 0; a < q(); ++a)
    for (int b = 0; b < q(); ++b) out(a, b) = m[a][b];
  return out;
}

std::vector<std::vector<std::vector<double>>> christoffel(const MetricField& g, const std::vector<double>& base) {
  const int q = g.q();
  std::vector<DualQuadScalar> x;
  for (int i = 0; i < q; ++i) x.push_back(seed_variable(i, base.at(i), q));
  auto G = g.eval(x);
  Eigen::MatrixXd g0(q, q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) g0(a, b) = G[a][b].value();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g0, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 1e-9)) throw SingularMetric("metric " + g.name() + " is not positive-definite");
  const Eigen::MatrixXd ginv = g0.inverse();
  auto dg = [&](int c, int a, int b) { return G[a][b].nvars() == 0 ? 0.0 : G[a][b].grad(c); };
  std::vector<std::vector<std::vector<double>>> out(q, std::vector<std::vector<double>>(q, std::vector<double>(q)));
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = b; c < q; ++c) {
        double s = 0.0;
        for (int d = 0; d < q; ++d) s += ginv(a, d) * (dg(b, d, c) + dg(c, b, d) - dg(d, b, c));
        out[a][b][c] = out[a][c][b] = 0.5 * s;
      }
  return out;
}

std::vector<double> geodesic_spray(const MetricField& g, const TransverseJetPoint& point) {
  if (point.order != 1) throw OrderError("geodesic_spray needs an order-1 point");
  auto S = semispray(lift_lagrangian(g, 1), point).S;
  const auto G = christoffel(g, point.base);
  const auto& y = point.jets[0];
  const int q = g.q();
  double dev = 0.0, scale = 1.0;
  for (int a = 0; a < q; ++a) {
    double s = 0.0;
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c) s += G[a][b][c] * y[b] * y[c];
    s *= 0.25;
    dev = std::max(dev, std::fabs(s - S[a]));
    scale = std::max(scale, std::fabs(s));
  }
  if (!(dev <= 1e-9 * scale))
    throw InvariantViolation("geodesic spray: lagrangian and Christoffel routes differ by " + std::to_string(dev));
  return S;
}

// ---------------------------------------------------------------- lift

LiftExpansion lift_expansion(const MetricField& g, const TransverseJetPoint& p, int degree, bool top_spray) {
  p.check();
  const int r = p.order;
  const int q = p.q();
  if (q != g.q()) throw ShapeError("jet point and metric differ in transverse dimension");
  const int last = top_spray ? r : r - 1;  // highest spray needed
  const int D = degree + last;
  auto z = jet_variables(p, D);
  auto y = [&](int k) { return std::vector<PowerSeries>(z.begin() + k * q, z.begin() + (k + 1) * q); };

  SeriesMatrix G = g.eval(y(0));
  // dG[c][a][b] = ∂_c g_ab
  std::vector<SeriesMatrix> dG(q, SeriesMatrix(q));
  for (int c = 0; c < q && last >= 1; ++c)
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) dG[c][a].push_back(derivative(G[a][b], c));
  const auto y1 = y(1);
  // (Γ g) w with Γ g = Σ_c y1_c ∂_c g
  auto gamma_g = [&](const std::vector<PowerSeries>& w) {
    std::vector<PowerSeries> out;
    for (int d = 0; d < q; ++d) {
      PowerSeries s = zero_like(w[0]);
      for (int c = 0; c < q; ++c)
        for (int b = 0; b < q; ++b) s += y1[c] * dG[c][d][b] * w[b];
      out.push_back(std::move(s));
    }
    return out;
  };

  LiftExpansion out;
  out.L = dot(y1, matvec(G, y1));
  if (last >= 1) {
    // S^(1) = ¼ g^{-1}[(Γ g) y - ½ ∂g(y, y)]
    auto rhs = gamma_g(y1);
    for (int d = 0; d < q; ++d)
      for (int b = 0; b < q; ++b)
        for (int c = 0; c < q; ++c) rhs[d] -= 0.5 * (dG[d][b][c] * y1[b] * y1[c]);
    auto S = solve(G, rhs);
    for (auto& s : S) s *= -0.5;  // σ = -2·S, S = ¼(...)
    out.sigma.push_back(std::move(S));
  }
  std::vector<PowerSeries> w_prev = y1;
  for (int k = 2; k <= std::max(r, last); ++k) {
    const auto& sig = out.sigma[k - 2];
    auto w = y(k);
    for (int i = 0; i < q; ++i) w[i] -= sig[i];
    if (k <= r) out.L += dot(w, matvec(G, w));
    if (k > last) break;
    // S^(k) = [g^{-1}((Γ g) w_k + (∂σ^(k-1)/∂y^(k-1))ᵀ g w_k) - Γ σ^(k-1) - w_{k-1}] / (2(k+1))
    auto Gw = matvec(G, w);
    auto t = gamma_g(w);
    for (int d = 0; d < q; ++d)
      for (int a = 0; a < q; ++a) t[d] += derivative(sig[a], (k - 1) * q + d) * Gw[a];
    auto u = solve(G, t);
    std::vector<PowerSeries> weights(z.size(), zero_like(z[0]));
    for (int b = 0; b < k; ++b)
      for (int i = 0; i < q; ++i) weights[b * q + i] = z[(b + 1) * q + i] * static_cast<double>(b + 1);
    std::vector<PowerSeries> next;
    for (int i = 0; i < q; ++i) {
      PowerSeries S = (u[i] - directional(sig[i], weights) - w_prev[i]) * (1.0 / (2.0 * (k + 1)));
      next.push_back(S * -2.0);
    }
    out.sigma.push_back(std::move(next));
    w_prev = std::move(w);
  }
  return out;
}

LagrangianField lift_lagrangian(const MetricField& g, int r) {
  if (r < 1) throw OrderError("lift order must be at least 1");
  auto L = LagrangianField::from_expander(g.name() + "^(" + std::to_string(r) + ")", r, g.q(),
                                          [g](const TransverseJetPoint& p, int degree) {
                                            return to_degree(lift_expansion(g, p, degree, false).L, degree);
                                          });
  L.set_chart(g.chart());
  return L;
}

SemiSprayField lift_spray(const MetricField& g, int r) {
  if (r < 1) throw OrderError("lift order must be at least 1");
  return SemiSprayField::from_sigma(r, g.q(), [g](const TransverseJetPoint& p, int degree) {
    auto e = lift_expansion(g, p, degree, true);
    std::vector<PowerSeries> out;
    for (const auto& s : e.sigma.back()) out.push_back(to_degree(s, degree));
    return out;
  });
}

LiftedMetric::LiftedMetric(std::vector<MetricField> family, int r) : family_(std::move(family)), order_(r) {
  if (r < 1) throw OrderError("lift order must be at least 1");
  if (family_.empty()) throw ShapeError("lifted metric needs at least one presentation");
}

bool LiftedMetric::has_chart(const std::string& chart) const {
  for (const auto& g : family_)
    if (g.chart() == chart) return true;
  return false;
}

const MetricField& LiftedMetric::source(const std::string& chart) const {
  for (const auto& g : family_)
    if (g.chart() == chart) return g;
  if (family_.size() == 1 && chart.empty()) return family_[0];
  throw SchemaError("lifted metric has no presentation on chart '" + chart + "'");
}

Eigen::MatrixXd LiftedMetric::operator()(const TransverseJetPoint& p) const {
  const MetricField& g = source(p.chart);
  const int r = order_;
  const int q = g.q();
  if (p.order != r) throw ShapeError("jet point order differs from the lifted metric");
  auto e = lift_expansion(g, p, 1, true);
  const auto& sigma = e.sigma.back();
  const int n = (r + 1) * q;
  Eigen::MatrixXd dsigma(q, n);
  for (int i = 0; i < q; ++i)
    for (int v = 0; v < n; ++v) dsigma(i, v) = sigma[i].linear(v);
  auto P = projectors_from_sigma_jacobian(dsigma, r, q);
  Eigen::MatrixXd B = decomposition_basis(horizontal_lift(P.v, r, q), r, q);
  Eigen::MatrixXd Binv =
      B.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));  // unipotent lower-triangular
  const Eigen::MatrixXd g0 = g(p.base);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k <= r; ++k) D.block(k * q, k * q, q, q) = g0;
  Eigen::MatrixXd G = Binv.transpose() * D * Binv;
  return 0.5 * (G + G.transpose());
}

LiftedMetric lift_metric(const MetricField& g, int r) { return LiftedMetric({g}, r); }
LiftedMetric lift_metric(const std::vector<MetricField>& family, int r) { return LiftedMetric(family, r); }

// ---------------------------------------------------------------- checks

ValidationReport holonomy_check(const FoliatedAtlas& atlas, const LiftedMetric& lifted, int samples, uint64_t seed,
                                const HolonomyOptions& opts) {
  ValidationReport report(seed);
  const int r = lifted.order();
  int used = 0;
  for (const auto& t : atlas.transitions) {
    if (!lifted.has_chart(t.from) || !lifted.has_chart(t.to)) continue;
    ++used;
    Rng rng(seed, "holonomy:" + t.name);
    double worst = 0.0;
    std::string where = t.name;
    for (const auto& pt : sample_overlap(t, samples, seed)) {
      auto xi = random_point(t.from, atlas.leaf_dim, pt, r, rng, opts.jet_scale);
      double dev;
      std::string ctx;
      try {
        auto phi = prolong_transition(atlas, t, xi);
        Eigen::MatrixXd D = prolong_jacobian(atlas, t, xi);
        Eigen::MatrixXd G = lifted(xi);
        Eigen::MatrixXd pulled = D.transpose() * lifted(phi) * D;
        dev = (pulled - G).cwiseAbs().maxCoeff() / std::max(1.0, G.cwiseAbs().maxCoeff());
        ctx = t.name + " at " + xi.to_json().dump();
      } catch (const Error& e) {
        dev = INFINITY;
        ctx = t.name + ": " + e.what();
      }
      if (!(dev <= worst)) {
        worst = dev;
        where = ctx;
      }
    }
    report.add_max("holonomy", where, worst, opts.tolerance);
  }
  if (used == 0) report.note("holonomy: no transition joins two charts with a metric presentation");
  return report;
}

ValidationReport vertical_exactness_check(const LiftedMetric& lifted, const LagrangianField& L, int samples,
                                          uint64_t seed, double tolerance) {
  ValidationReport report(seed);
  report.note("vertical exactness convention: top vertical block of G compared with ½·Hess L");
  const int r = lifted.order();
  if (L.order() != r) throw OrderError("lagrangian and lifted metric differ in order");
  for (const auto& g : lifted.family()) {
    if (!L.chart().empty() && L.chart() != g.chart()) continue;
    if (g.domain().dim() == 0) {
      report.note("vertical exactness: chart " + g.chart() + " has no domain to sample");
      continue;
    }
    const int q = g.q();
    Rng rng(seed, "vexact:" + g.chart());
    double worst = 0.0;
    std::string where = g.chart();
    for (const auto& pt : sample_box(g.domain(), samples, seed, "vexact:" + g.chart())) {
      auto p = random_point(g.chart(), g.leaf_dim(), pt, r, rng, 0.5);
      double dev;
      std::string ctx;
      try {
        Eigen::MatrixXd G = lifted(p);
        Eigen::MatrixXd H = vertical_hessian(L, p).h;
        dev = (G.block(r * q, r * q, q, q) - 0.5 * H).cwiseAbs().maxCoeff();
        ctx = g.chart() + " at " + p.to_json().dump();
      } catch (const Error& e) {
        dev = INFINITY;
        ctx = g.chart() + ": " + e.what();
      }
      if (!(dev <= worst)) {
        worst = dev;
        where = ctx;
      }
    }
    report.add_max("vertical_exactness", where, worst, tolerance);
  }
  return report;
}

}  // namespace folijet

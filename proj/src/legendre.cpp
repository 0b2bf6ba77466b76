#include "folijet/legendre.hpp"

#include <cmath>

#include "folijet/sampling.hpp"

namespace folijet {

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double condition(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > 0.0)) return INFINITY;
  return s(0) / s(s.size() - 1);
}

TransverseJetPoint with_top(const CotangentJetPoint& c, int r, const std::vector<double>& top) {
  TransverseJetPoint p;
  p.chart = c.chart;
  p.order = r;
  p.leaf = c.leaf;
  p.base = c.base;
  p.jets = c.jets;
  p.jets.push_back(top);
  return p;
}

struct TopResidual {
  Eigen::VectorXd F;
  Eigen::MatrixXd H;
};

TopResidual top_residual(const LagrangianField& L, const TransverseJetPoint& p, const std::vector<double>& momentum) {
  const int q = L.q();
  const int top = L.order() * q;
  PowerSeries s = L.expand(p, 2);
  TopResidual out{Eigen::VectorXd(q), Eigen::MatrixXd(q, q)};
  for (int a = 0; a < q; ++a) {
    out.F(a) = s.linear(top + a) - momentum[a];
    for (int b = 0; b < q; ++b) out.H(a, b) = s.second(top + a, top + b);
  }
  return out;
}

std::string vec_str(const std::vector<double>& v) { return nlohmann::json(v).dump(); }

}  // namespace

void CotangentJetPoint::check() const {
  if (order < 1) throw OrderError("cotangent jet point order must be at least 1");
  const size_t n = base.size();
  if (n == 0) throw ShapeError("cotangent jet point has no transverse coordinates");
  if (jets.size() != static_cast<size_t>(order - 1)) throw ShapeError("cotangent jet point needs r-1 jet rows");
  for (const auto& row : jets)
    if (row.size() != n) throw ShapeError("jet row length differs from q");
  if (momentum.size() != n) throw ShapeError("momentum length differs from q");
  auto finite = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  bool ok = finite(leaf) && finite(base) && finite(momentum);
  for (const auto& row : jets) ok = ok && finite(row);
  if (!ok) throw DomainError("cotangent jet point has non-finite entries");
}

nlohmann::json CotangentJetPoint::to_json() const {
  return {{"chart", chart}, {"order", order}, {"leaf", leaf}, {"base", base}, {"jets", jets}, {"momentum", momentum}};
}

CotangentJetPoint legendre_map(const LagrangianField& L, const TransverseJetPoint& point) {
  point.check();
  if (point.order != L.order()) throw OrderError("jet point order differs from the lagrangian");
  const int q = L.q();
  const int top = L.order() * q;
  PowerSeries s = L.expand(point, 1);
  CotangentJetPoint c;
  c.chart = point.chart;
  c.order = point.order;
  c.leaf = point.leaf;
  c.base = point.base;
  c.jets.assign(point.jets.begin(), point.jets.end() - 1);
  for (int a = 0; a < q; ++a) c.momentum.push_back(s.linear(top + a));
  return c;
}

TransverseJetPoint legendre_inverse(const LagrangianField& L, const CotangentJetPoint& cpoint,
                                    const std::vector<double>& guess, const NewtonOptions& opts, int* iterations) {
  cpoint.check();
  const int r = L.order();
  const int q = L.q();
  if (cpoint.order != r) throw OrderError("cotangent point order differs from the lagrangian");
  if (cpoint.q() != q) throw ShapeError("cotangent point and lagrangian differ in q");
  std::vector<double> y = guess.empty() ? std::vector<double>(q, 0.0) : guess;
  if (static_cast<int>(y.size()) != q) throw ShapeError("guess must have q entries");

  auto p = with_top(cpoint, r, y);
  auto cur = top_residual(L, p, cpoint.momentum);
  for (int it = 0;; ++it) {
    if (inf_norm(cur.F) <= opts.tolerance) {
      if (iterations) *iterations = it;
      return p;
    }
    if (it == opts.max_iterations)
      throw NoConvergence(L.name() + ": Legendre inverse did not converge in " + std::to_string(it) +
                          " iterations (residual " + std::to_string(inf_norm(cur.F)) + ")");
    if (!(condition(cur.H) <= opts.max_condition))
      throw SingularHessian(L.name() + ": vertical Hessian ill-conditioned at y = " + vec_str(p.jets.back()));
    Eigen::VectorXd step = cur.H.lu().solve(-cur.F);
    double lambda = 1.0;
    for (int h = 0;; ++h) {
      auto trial = p;
      for (int a = 0; a < q; ++a) trial.jets.back()[a] += lambda * step(a);
      try {
        auto next = top_residual(L, trial, cpoint.momentum);
        if (inf_norm(next.F) < inf_norm(cur.F)) {
          p = std::move(trial);
          cur = std::move(next);
          break;
        }
      } catch (const ExcludedPoint&) {
      }
      if (h == opts.max_halvings)
        throw NoConvergence(L.name() + ": Legendre inverse line search failed after " + std::to_string(h) +
                            " halvings");
      lambda *= 0.5;
    }
  }
}

HamiltonianValue pseudo_hamiltonian(const LagrangianField& L, const CotangentJetPoint& cpoint,
                                    const std::vector<double>& guess, const NewtonOptions& opts) {
  auto p = legendre_inverse(L, cpoint, guess, opts);
  return {L.value(p), cpoint};
}

// ---------------------------------------------------------------- chain

DiagonalHamiltonian::DiagonalHamiltonian(LagrangianField L, NewtonOptions opts) : L_(std::move(L)), opts_(opts) {}

DiagonalHamiltonian::Stagewise DiagonalHamiltonian::forward(const TransverseJetPoint& p) const {
  const int r = L_.order();
  const int q = L_.q();
  const int n = r * q;
  auto T = MonomialTable::get(n, r + 1);
  // slots: y^(1), ..., y^(r) about p; x is held fixed
  std::vector<int> map((r + 1) * q);
  for (int v = 0; v < (r + 1) * q; ++v) map[v] = v < q ? -1 : v - q;
  PowerSeries F = remap(L_.expand(p, r + 1), T, map);
  std::vector<PowerSeries> V;
  for (int v = 0; v < n; ++v) V.push_back(PowerSeries::variable(T, v, 0.0));

  Stagewise out;
  out.momenta.assign(r, {});
  // Y[j-1]: δy^(j) in terms of (δy^(1..j-1), δp_j, ..., δp_r)
  std::vector<std::vector<PowerSeries>> Y(r);
  for (int j = r; j >= 1; --j) {
    const int off = (j - 1) * q;
    std::vector<PowerSeries> P;
    Eigen::MatrixXd H0(q, q);
    for (int a = 0; a < q; ++a) {
      P.push_back(derivative(F, off + a));
      out.momenta[j - 1].push_back(P[a].constant_term());
    }
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) H0(a, b) = P[a].linear(off + b);
    if (!(condition(H0) <= opts_.max_condition))
      throw SingularHessian(L_.name() + ": Legendre chain stage " + std::to_string(j) + " has a singular Hessian");
    const Eigen::MatrixXd Hinv = H0.inverse();
    auto apply_inv = [&](const std::vector<PowerSeries>& v) {
      std::vector<PowerSeries> w;
      for (int a = 0; a < q; ++a) {
        PowerSeries s = v[0] * Hinv(a, 0);
        for (int b = 1; b < q; ++b) s += v[b] * Hinv(a, b);
        w.push_back(std::move(s));
      }
      return w;
    };
    std::vector<PowerSeries> rhs(V.begin() + off, V.begin() + off + q);
    auto Yj = apply_inv(rhs);
    auto args = V;
    // chord iteration; each pass fixes one more degree
    for (int pass = 0; pass <= r + 1; ++pass) {
      for (int a = 0; a < q; ++a) args[off + a] = Yj[a];
      std::vector<PowerSeries> R;
      for (int a = 0; a < q; ++a) R.push_back(substitute(P[a], args) - out.momenta[j - 1][a] - V[off + a]);
      auto d = apply_inv(R);
      for (int a = 0; a < q; ++a) Yj[a] -= d[a];
    }
    for (int a = 0; a < q; ++a) args[off + a] = Yj[a];
    F = substitute(F, args);
    Y[j - 1] = std::move(Yj);
  }

  // back-substitute the linear parts: rows of δy in terms of δp
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int j = 1; j <= r; ++j) {
    const int off = (j - 1) * q;
    for (int a = 0; a < q; ++a) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
      for (int v = 0; v < n; ++v) {
        const double c = Y[j - 1][a].linear(v);
        if (c == 0.0) continue;
        if (v < off)
          row += c * M.row(v);
        else
          row(v) += c;
      }
      M.row(off + a) = row;
    }
  }
  out.inverse_jacobian = M;
  return out;
}

DiagonalHamiltonian::Solution DiagonalHamiltonian::solve(const std::vector<double>& base,
                                                         const std::vector<double>& momentum,
                                                         const std::vector<std::vector<double>>& guess) const {
  const int r = L_.order();
  const int q = L_.q();
  if (static_cast<int>(base.size()) != q || static_cast<int>(momentum.size()) != q)
    throw ShapeError("diagonal hamiltonian needs q base coordinates and q momenta");
  TransverseJetPoint p;
  p.chart = L_.chart();
  p.order = r;
  p.leaf.assign(L_.leaf_dim(), 0.0);
  p.base = base;
  if (!guess.empty()) {
    p.jets = guess;
  } else {
    // the zero section is excluded for slashed lagrangians
    const double s = L_.slashed() ? 0.5 : 0.0;
    for (int k = 0; k < r; ++k) {
      std::vector<double> row;
      for (int i = 0; i < q; ++i) row.push_back(s * (momentum[i] != 0.0 ? momentum[i] : 1.0));
      p.jets.push_back(row);
    }
  }
  p.check();

  auto residual = [&](const Stagewise& s) {
    Eigen::VectorXd d(r * q);
    for (int k = 0; k < r; ++k)
      for (int i = 0; i < q; ++i) d(k * q + i) = momentum[i] - s.momenta[k][i];
    return d;
  };
  auto cur = forward(p);
  Eigen::VectorXd res = residual(cur);
  for (int it = 0;; ++it) {
    if (inf_norm(res) <= opts_.tolerance) return {L_.value(p), p, it};
    if (it == opts_.max_iterations)
      throw NoConvergence(L_.name() + ": Legendre chain did not converge in " + std::to_string(it) + " iterations");
    Eigen::VectorXd step = cur.inverse_jacobian * res;
    double lambda = 1.0;
    for (int h = 0;; ++h) {
      auto trial = p;
      for (int k = 0; k < r; ++k)
        for (int i = 0; i < q; ++i) trial.jets[k][i] += lambda * step(k * q + i);
      try {
        auto next = forward(trial);
        Eigen::VectorXd nres = residual(next);
        if (inf_norm(nres) < inf_norm(res)) {
          p = std::move(trial);
          cur = std::move(next);
          res = std::move(nres);
          break;
        }
      } catch (const ExcludedPoint&) {
      } catch (const SingularHessian&) {
      }
      if (h == opts_.max_halvings)
        throw NoConvergence(L_.name() + ": Legendre chain line search failed after " + std::to_string(h) +
                            " halvings");
      lambda *= 0.5;
    }
  }
}

DiagonalHamiltonian legendre_chain(const LagrangianField& L, const NewtonOptions& opts) {
  return DiagonalHamiltonian(L, opts);
}

// ---------------------------------------------------------------- admissibility

ValidationReport admissibility_check(const LagrangianField& L, const Box& domain,
                                     const std::optional<ExprProgram>& phi, int samples, uint64_t seed,
                                     const AdmissibilityOptions& opts) {
  ValidationReport report(seed);
  const int r = L.order();
  const int q = L.q();
  const int pdim = domain.dim() - q;
  if (pdim < 0) throw ShapeError("admissibility domain is smaller than q");

  std::vector<std::string> xnames;
  for (int i = 0; i < q; ++i) xnames.push_back(VariableName{VariableName::Kind::transverse, 0, i + 1}.str());
  std::optional<BoundProgram> level;
  if (phi) {
    VariableContext ctx;
    ctx.transverse_dim = q;
    ctx.allow_leaf = false;
    ctx.allow_jets = false;
    phi->check_variables(ctx, "phi");
    level = BoundProgram(*phi, xnames);
  }

  Rng rng(seed, "admissible:" + L.name());
  double min_eig = INFINITY, min_val = INFINITY, zero_dev = 0.0, leaf_dev = 0.0, level_dev = 0.0;
  std::string eig_at, val_at, zero_at, leaf_at, level_at;
  int rescaled = 0, excluded = 0;
  for (const auto& pt : sample_box(domain, samples, seed, "admissible:" + L.name())) {
    TransverseJetPoint p;
    p.chart = L.chart();
    p.order = r;
    p.leaf.assign(pt.begin(), pt.begin() + pdim);
    p.base.assign(pt.begin() + pdim, pt.end());
    std::vector<double> dir;
    double norm = 0.0;
    for (int k = 0; k < r; ++k) {
      std::vector<double> row;
      for (int i = 0; i < q; ++i) {
        row.push_back(opts.jet_scale * rng.normal());
        dir.push_back(rng.normal());
        norm += dir.back() * dir.back();
      }
      p.jets.push_back(std::move(row));
    }
    norm = std::sqrt(norm);
    for (double& d : dir) d /= norm;
    const std::string where = p.to_json().dump();
    if (L.slashed() && L.is_excluded(p)) {
      ++excluded;
      continue;
    }

    // (a) vertical Hessian
    try {
      auto h = vertical_hessian(L, p, opts.hessian_threshold);
      if (!(h.min_eigenvalue >= min_eig)) {
        min_eig = h.min_eigenvalue;
        eig_at = where;
      }
    } catch (const Error& e) {
      min_eig = -INFINITY;
      eig_at = where + ": " + e.what();
    }
    // (b) positivity, zero on the zero section
    try {
      const double v = L.value(p);
      if (!(v >= min_val)) {
        min_val = v;
        val_at = where;
      }
    } catch (const Error& e) {
      min_val = -INFINITY;
      val_at = where + ": " + e.what();
    }
    auto z = zero_section(r, p.leaf, p.base, p.chart);
    if (!L.slashed()) {
      const double v0 = std::fabs(L.value(z));
      if (!(v0 <= zero_dev)) {
        zero_dev = v0;
        zero_at = z.to_json().dump();
      }
    }
    // (c) projectability
    const double ld = L.leaf_derivative(p);
    if (!(ld <= leaf_dev)) {
      leaf_dev = ld;
      leaf_at = where;
    }
    // (d) the level φ(x) along a ray from the zero section
    const double target = level ? (*level)(p.base) : 1.0;
    auto on_ray = [&](double t) {
      auto y = z;
      for (int k = 0; k < r; ++k)
        for (int i = 0; i < q; ++i) y.jets[k][i] = t * dir[k * q + i];
      return L.value(y) - target;
    };
    double dev;
    try {
      double lo = 0.0, hi = 1.0;
      int grow = 0;
      while (on_ray(hi) < 0.0 && grow < 60) {
        lo = hi;
        hi *= 2.0;
        ++grow;
      }
      if (grow > 0) ++rescaled;
      double t = hi;
      double f = on_ray(t);
      for (int it = 0; it < 200 && std::fabs(f) > opts.level_tol; ++it) {
        t = 0.5 * (lo + hi);
        f = on_ray(t);
        if (f < 0.0)
          lo = t;
        else
          hi = t;
      }
      dev = std::fabs(f);
    } catch (const Error&) {
      dev = INFINITY;
    }
    if (!(dev <= level_dev)) {
      level_dev = dev;
      level_at = where;
    }
  }

  report.add_min("admissible:hessian_pd", eig_at, min_eig, opts.hessian_threshold);
  report.add_min("admissible:positivity", val_at, min_val, -opts.positivity_tol);
  if (L.slashed())
    report.note("admissible: zero-section condition skipped for slashed lagrangian " + L.name());
  else
    report.add_max("admissible:zero_section", zero_at, zero_dev, opts.zero_tol);
  report.add_flag("admissible:projectable", leaf_at, leaf_dev == 0.0);
  report.add_max("admissible:level", level_at, level_dev, opts.level_tol);
  if (rescaled) report.note("admissible: " + std::to_string(rescaled) + " level rays needed bracket rescaling");
  if (excluded) report.note("admissible: " + std::to_string(excluded) + " sampled points were excluded and skipped");
  return report;
}

}  // namespace folijet

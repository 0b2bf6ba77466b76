#include "folijet/dynamics.hpp"

#include <cmath>
#include <map>

#include "folijet/dual.hpp"

namespace folijet {

namespace {

std::string xname(int i) { return VariableName{VariableName::Kind::transverse, 0, i + 1}.str(); }
std::string yname(int k, int i) { return VariableName{VariableName::Kind::jet, k, i + 1}.str(); }
std::string uname(int i) { return VariableName{VariableName::Kind::leaf, 0, i + 1}.str(); }

template <class T>
std::map<std::string, T> jet_env(const std::vector<T>& z, int r, int q) {
  std::map<std::string, T> env;
  for (int i = 0; i < q; ++i) env[xname(i)] = z[i];
  for (int k = 1; k <= r; ++k)
    for (int i = 0; i < q; ++i) env[yname(k, i)] = z[k * q + i];
  return env;
}

Eigen::MatrixXd constant_matrix(const std::vector<std::vector<PowerSeries>>& m) {
  Eigen::MatrixXd out(m.size(), m.size());
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m.size(); ++j) out(i, j) = m[i][j].constant_term();
  return out;
}

}  // namespace

std::vector<PowerSeries> jet_variables(const TransverseJetPoint& p, int degree) {
  const auto z0 = p.flat();
  auto table = MonomialTable::get(static_cast<int>(z0.size()), degree);
  std::vector<PowerSeries> z;
  z.reserve(z0.size());
  for (size_t v = 0; v < z0.size(); ++v) z.push_back(PowerSeries::variable(table, static_cast<int>(v), z0[v]));
  return z;
}

// ---------------------------------------------------------------- lagrangians

LagrangianField LagrangianField::unchecked(std::string name, ExprProgram program, int r, int leaf_dim, int q) {
  if (r < 1) throw OrderError("lagrangian order must be at least 1");
  VariableContext ctx;
  ctx.leaf_dim = leaf_dim;
  ctx.transverse_dim = q;
  ctx.jet_order = r;
  program.check_variables(ctx, name);
  LagrangianField L;
  L.name_ = std::move(name);
  L.order_ = r;
  L.q_ = q;
  L.leaf_dim_ = leaf_dim;
  L.program_ = std::move(program);
  return L;
}

LagrangianField LagrangianField::from_expr(std::string name, ExprProgram program, int r, int leaf_dim, int q,
                                           bool slashed, std::optional<ExprProgram> excluded, const Box* domain) {
  for (const auto& v : program.free_variables()) {
    auto n = VariableName::parse(v);
    if (n && (n->kind == VariableName::Kind::leaf || n->kind == VariableName::Kind::momentum))
      throw InvariantViolation(name + ": lagrangian depends on " + v + " (not projectable)");
  }
  LagrangianField L = unchecked(name, std::move(program), r, leaf_dim, q);
  if (slashed && !excluded) throw SchemaError(name + ": a slashed lagrangian needs an excluded set");
  if (excluded) {
    VariableContext ctx;
    ctx.leaf_dim = leaf_dim;
    ctx.transverse_dim = q;
    ctx.jet_order = r;
    ctx.allow_leaf = false;
    excluded->check_variables(ctx, name + ".excluded");
  }
  L.slashed_ = slashed;
  L.excluded_ = std::move(excluded);
  if (slashed && domain) {
    // the excluded set must contain I^r_{r-1}(ν^{r-1}F)
    Rng rng(0, "slashed:" + L.name_);
    for (const auto& pt : sample_box(*domain, 20, 0, "slashed:" + L.name_)) {
      std::vector<double> leaf(pt.begin(), pt.begin() + leaf_dim);
      std::vector<double> base(pt.begin() + leaf_dim, pt.end());
      TransverseJetPoint p;
      if (r == 1) {
        p = zero_section(1, leaf, base);
      } else {
        TransverseJetPoint low = zero_section(r - 1, leaf, base);
        for (auto& row : low.jets)
          for (double& v : row) v = rng.normal();
        p = include_jet(r - 1, r, low);
      }
      if (!L.is_excluded(p))
        throw InvariantViolation(L.name_ + ": excluded set does not contain the image of the inclusion from order " +
                                 std::to_string(r - 1));
    }
  }
  return L;
}

LagrangianField LagrangianField::from_spec(const FoliatedAtlas& atlas, const LagrangianSpec& spec) {
  auto L = from_expr(spec.name, spec.expr, spec.order, atlas.leaf_dim, atlas.transverse_dim, spec.slashed,
                     spec.excluded, &atlas.chart(spec.chart).domain);
  L.chart_ = spec.chart;
  return L;
}

LagrangianField LagrangianField::from_expander(std::string name, int r, int q, Expander expander) {
  LagrangianField L;
  L.name_ = std::move(name);
  L.order_ = r;
  L.q_ = q;
  L.expander_ = std::move(expander);
  return L;
}

void LagrangianField::check_shape(const TransverseJetPoint& p) const {
  p.check();
  if (p.order != order_ || p.q() != q_)
    throw ShapeError(name_ + ": jet point of order " + std::to_string(p.order) + " for a lagrangian of order " +
                     std::to_string(order_));
}

bool LagrangianField::is_excluded(const TransverseJetPoint& p) const {
  if (!excluded_) return false;
  auto env = jet_env(p.flat(), order_, q_);
  return !(eval<double>(*excluded_, env) > 0.0);
}

PowerSeries LagrangianField::expand(const TransverseJetPoint& p, int degree) const {
  check_shape(p);
  if (slashed_ && is_excluded(p)) throw ExcludedPoint(name_ + ": point in the excluded set");
  if (expander_) {
    PowerSeries s = expander_(p, degree);
    return scale_ == 1.0 ? s : s * scale_;
  }
  auto z = jet_variables(p, degree);
  auto env = jet_env(z, order_, q_);
  for (int i = 0; i < leaf_dim_ && i < static_cast<int>(p.leaf.size()); ++i)
    env[uname(i)] = PowerSeries::constant(z[0].table(), p.leaf[i]);
  PowerSeries s = eval<PowerSeries>(*program_, env, &z[0]);
  return scale_ == 1.0 ? s : s * scale_;
}

double LagrangianField::value(const TransverseJetPoint& p) const { return expand(p, 0).constant_term(); }

LagrangianField LagrangianField::scaled(double c) const {
  LagrangianField L = *this;
  L.scale_ *= c;
  return L;
}

double LagrangianField::leaf_derivative(const TransverseJetPoint& p) const {
  if (!program_ || leaf_dim_ == 0) return 0.0;
  check_shape(p);
  std::map<std::string, DualQuadScalar> env;
  const auto z = p.flat();
  for (const auto& [k, v] : jet_env(z, order_, q_)) env[k] = DualQuadScalar(v);
  for (int i = 0; i < leaf_dim_; ++i) env[uname(i)] = seed_variable(i, p.leaf.at(i), leaf_dim_);
  DualQuadScalar d = eval<DualQuadScalar>(*program_, env);
  double m = 0.0;
  if (d.nvars() == 0) return 0.0;
  for (int i = 0; i < leaf_dim_; ++i) m = std::max(m, std::fabs(scale_ * d.grad(i)));
  return m;
}

// ---------------------------------------------------------------- Γ, Hessian, spray

double gamma_apply(const ExprProgram& f, const TransverseJetPoint& p) {
  p.check();
  const int r = p.order;
  const int q = p.q();
  const int n = r * q;  // y^(r) is never differentiated
  const auto z = p.flat();
  std::map<std::string, DualQuadScalar> env;
  for (size_t v = 0; v < z.size(); ++v) {
    const int k = static_cast<int>(v) / q;
    const int i = static_cast<int>(v) % q;
    const std::string name = k == 0 ? xname(i) : yname(k, i);
    env[name] = static_cast<int>(v) < n ? seed_variable(static_cast<int>(v), z[v], n) : DualQuadScalar(z[v]);
  }
  for (int i = 0; i < static_cast<int>(p.leaf.size()); ++i) env[uname(i)] = DualQuadScalar(p.leaf[i]);
  DualQuadScalar d = eval<DualQuadScalar>(f, env);
  if (d.nvars() == 0) return 0.0;
  double out = 0.0;
  for (int b = 0; b < r; ++b)
    for (int i = 0; i < q; ++i) out += (b + 1) * z[(b + 1) * q + i] * d.grad(b * q + i);
  return out;
}

VerticalHessian vertical_hessian(const LagrangianField& L, const TransverseJetPoint& p, double threshold) {
  const int q = L.q();
  const int top = L.order() * q;
  PowerSeries s = L.expand(p, 2);
  VerticalHessian out;
  out.h.resize(q, q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) out.h(a, b) = s.second(top + a, top + b);
  out.det = out.h.determinant();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.h, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  out.regular = std::fabs(out.det) > threshold;
  out.positive_definite = out.min_eigenvalue > threshold;
  return out;
}

std::vector<PowerSeries> semispray_series(const LagrangianField& L, const TransverseJetPoint& p, int degree,
                                          double threshold) {
  const int r = L.order();
  const int q = L.q();
  const int top = r * q;
  const int prev = (r - 1) * q;
  PowerSeries s = L.expand(p, degree + 2);
  auto z = jet_variables(p, degree + 2);
  std::vector<PowerSeries> weights(z.size(), zero_like(z[0]));
  for (int b = 0; b < r; ++b)
    for (int i = 0; i < q; ++i) weights[b * q + i] = z[(b + 1) * q + i] * static_cast<double>(b + 1);

  std::vector<PowerSeries> rhs;
  std::vector<std::vector<PowerSeries>> h(q);
  for (int v = 0; v < q; ++v) {
    PowerSeries Pv = derivative(s, top + v);
    rhs.push_back(directional(Pv, weights) - derivative(s, prev + v));
    for (int w = 0; w < q; ++w) h[v].push_back(derivative(Pv, top + w));
  }
  if (!(std::fabs(constant_matrix(h).determinant()) > threshold))
    throw SingularHessian(L.name() + ": vertical Hessian is singular");
  auto S = solve(h, rhs);
  for (auto& c : S) c *= 1.0 / (2.0 * (r + 1));
  return S;
}

SemiSprayValue semispray(const LagrangianField& L, const TransverseJetPoint& p) {
  auto series = semispray_series(L, p, 0);
  const int r = L.order();
  const int q = L.q();
  SemiSprayValue out;
  for (const auto& c : series) out.S.push_back(c.constant_term());
  out.local_form = p.base;
  for (int k = 1; k <= r; ++k)
    for (int i = 0; i < q; ++i) out.local_form.push_back(k * p.jets[k - 1][i]);
  for (int i = 0; i < q; ++i) out.local_form.push_back((r + 1) * out.S[i]);
  out.section = p;
  out.section.order = r + 1;
  std::vector<double> sigma(q);
  for (int i = 0; i < q; ++i) sigma[i] = -2.0 * out.S[i];
  out.section.jets.push_back(sigma);
  return out;
}

SemiSprayField SemiSprayField::from_lagrangian(LagrangianField L) {
  SemiSprayField f;
  f.order_ = L.order();
  f.q_ = L.q();
  f.lagrangian_ = std::move(L);
  return f;
}

SemiSprayField SemiSprayField::from_exprs(std::vector<ExprProgram> components, int r) {
  if (r < 1) throw OrderError("spray order must be at least 1");
  if (components.empty()) throw ShapeError("spray needs at least one component");
  SemiSprayField f;
  f.order_ = r;
  f.q_ = static_cast<int>(components.size());
  VariableContext ctx;
  ctx.transverse_dim = f.q_;
  ctx.jet_order = r;
  ctx.allow_leaf = false;
  for (const auto& c : components) c.check_variables(ctx, "spray");
  f.exprs_ = std::move(components);
  return f;
}

SemiSprayField SemiSprayField::from_sigma(int r, int q, SigmaExpander sigma) {
  SemiSprayField f;
  f.order_ = r;
  f.q_ = q;
  f.sigma_ = std::move(sigma);
  return f;
}

std::vector<PowerSeries> SemiSprayField::expand(const TransverseJetPoint& p, int degree) const {
  if (p.order != order_ || p.q() != q_) throw ShapeError("jet point does not match the spray");
  if (lagrangian_) return semispray_series(*lagrangian_, p, degree);
  if (sigma_) {
    auto s = sigma_(p, degree);
    for (auto& c : s) c *= -0.5;
    return s;
  }
  p.check();
  auto z = jet_variables(p, degree);
  auto env = jet_env(z, order_, q_);
  std::vector<PowerSeries> out;
  for (const auto& e : exprs_) out.push_back(eval<PowerSeries>(e, env, &z[0]));
  return out;
}

std::vector<double> SemiSprayField::value(const TransverseJetPoint& p) const {
  std::vector<double> out;
  for (const auto& c : expand(p, 0)) out.push_back(c.constant_term());
  return out;
}

Eigen::MatrixXd SemiSprayField::jacobian(const TransverseJetPoint& p) const {
  auto s = expand(p, 1);
  const int n = (order_ + 1) * q_;
  Eigen::MatrixXd J(q_, n);
  for (int i = 0; i < q_; ++i)
    for (int v = 0; v < n; ++v) J(i, v) = s[i].linear(v);
  return J;
}

// ---------------------------------------------------------------- connection data

ConnectionCoefficients dual_coefficients(const SemiSprayField& S, const TransverseJetPoint& p) {
  const int r = S.order();
  const int q = S.q();
  Eigen::MatrixXd J = S.jacobian(p);
  ConnectionCoefficients c;
  c.order = r;
  c.M.resize(r);
  for (int j = 1; j <= r; ++j) c.M[r - j] = -J.block(0, j * q, q, q);
  return c;
}

Projectors projectors_from_sigma_jacobian(const Eigen::MatrixXd& dsigma, int r, int q) {
  const int n = (r + 1) * q;
  if (dsigma.rows() != q || dsigma.cols() != n) throw ShapeError("spray Jacobian must be q × (r+1)q");
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < r; ++b) D.block(b * q, (b + 1) * q, q, q) = (b + 1) * Eigen::MatrixXd::Identity(q, q);
  D.block(r * q, 0, q, n) = (r + 1) * dsigma;
  const Eigen::MatrixXd J = j_matrix(r, q);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Projectors P;
  // (L_S J)^a_b = -J^c_b ∂_c Γ^a + J^a_c ∂_b Γ^c
  P.lie_J = J * D - D * J;
  P.h = (r * I - P.lie_J) / (r + 1.0);
  P.v = (I + P.lie_J) / (r + 1.0);
  return P;
}

Projectors projectors(const SemiSprayField& S, const TransverseJetPoint& p) {
  return projectors_from_sigma_jacobian(-2.0 * S.jacobian(p), S.order(), S.q());
}

ConnectionCoefficients horizontal_coefficients(const Eigen::MatrixXd& h, int r, int q) {
  const int n = (r + 1) * q;
  if (h.rows() != n || h.cols() != n) throw ShapeError("projector must be (r+1)q square");
  ConnectionCoefficients c;
  c.order = r;
  for (int k = 1; k <= r; ++k) c.N.push_back(h.block(0, k * q, q, q));
  return c;
}

std::vector<Eigen::MatrixXd> horizontal_lift(const Eigen::MatrixXd& v, int r, int q) {
  const int n = (r + 1) * q;
  if (v.rows() != n || v.cols() != n) throw ShapeError("projector must be (r+1)q square");
  auto theta = [&](int c) { return v.block(r * q, c * q, q, q); };
  Eigen::PartialPivLU<Eigen::MatrixXd> top(theta(r));
  std::vector<Eigen::MatrixXd> A(r + 1);
  A[0] = Eigen::MatrixXd::Identity(q, q);
  // θJ^k (A_0, ..., A_r) = 0 for k = r - j gives A_j from A_0..A_{j-1}
  for (int j = 1; j <= r; ++j) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(q, q);
    for (int c = 0; c < j; ++c) s += theta(c + r - j) * A[c];
    A[j] = -top.solve(s);
  }
  return A;
}

Eigen::MatrixXd decomposition_basis(const std::vector<Eigen::MatrixXd>& lift, int r, int q) {
  const int n = (r + 1) * q;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j <= r; ++j)
    for (int i = j; i <= r; ++i) B.block(i * q, j * q, q, q) = lift[i - j];
  return B;
}

}  // namespace folijet

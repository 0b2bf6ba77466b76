#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "folijet/atlas.hpp"
#include "folijet/jet.hpp"
#include "folijet/series.hpp"

namespace folijet {

/// Series variables for a jet point: (x, y^(1), ..., y^(r)) flattened, each
/// expanded about its value at the point. Table: (r+1)q variables, `degree`.
std::vector<PowerSeries> jet_variables(const TransverseJetPoint& p, int degree);

/// A transverse lagrangian of order r. Either an expression over
/// {x1..xq, y1_1..y<r>_q} (and u<i> only for unchecked fields) or an
/// evaluator producing truncated expansions directly.
class LagrangianField {
 public:
  /// Expansion of L about a point, in the variables of jet_variables().
  using Expander = std::function<PowerSeries(const TransverseJetPoint&, int degree)>;

  LagrangianField() = default;

  /// Checked construction: no u or p variables; a slashed L must exclude
  /// I^r_{r-1}(ν^{r-1}F) at sampled points of `domain`.
  static LagrangianField from_expr(std::string name, ExprProgram program, int r, int leaf_dim, int q,
                                   bool slashed = false, std::optional<ExprProgram> excluded = {},
                                   const Box* domain = nullptr);
  static LagrangianField from_spec(const FoliatedAtlas& atlas, const LagrangianSpec& spec);
  /// No projectability check: leaf variables are read from the point.
  static LagrangianField unchecked(std::string name, ExprProgram program, int r, int leaf_dim, int q);
  static LagrangianField from_expander(std::string name, int r, int q, Expander expander);

  const std::string& name() const { return name_; }
  /// Chart the coordinates refer to; empty when unspecified.
  const std::string& chart() const { return chart_; }
  void set_chart(std::string chart) { chart_ = std::move(chart); }
  int order() const { return order_; }
  int q() const { return q_; }
  int leaf_dim() const { return leaf_dim_; }
  bool slashed() const { return slashed_; }
  const std::optional<ExprProgram>& program() const { return program_; }
  const std::optional<ExprProgram>& excluded() const { return excluded_; }

  /// Throws ExcludedPoint (slashed L at an excluded point), DomainError.
  PowerSeries expand(const TransverseJetPoint& p, int degree) const;
  double value(const TransverseJetPoint& p) const;
  bool is_excluded(const TransverseJetPoint& p) const;

  /// c·L
  LagrangianField scaled(double c) const;

  /// max |∂L/∂u^i| at p, leaf coordinates seeded as duals (0 without a program).
  double leaf_derivative(const TransverseJetPoint& p) const;

 private:
  void check_shape(const TransverseJetPoint& p) const;

  std::string name_;
  std::string chart_;
  int order_ = 1;
  int q_ = 1;
  int leaf_dim_ = 0;
  bool slashed_ = false;
  std::optional<ExprProgram> program_;
  std::optional<ExprProgram> excluded_;
  Expander expander_;
  double scale_ = 1.0;
};

/// Γ(f) = y^(1)·∂f/∂x + 2y^(2)·∂f/∂y^(1) + ... + r·y^(r)·∂f/∂y^(r-1).
double gamma_apply(const ExprProgram& f, const TransverseJetPoint& p);

struct VerticalHessian {
  Eigen::MatrixXd h;
  double det = 0.0;
  double min_eigenvalue = 0.0;
  bool regular = false;
  bool positive_definite = false;
};

VerticalHessian vertical_hessian(const LagrangianField& L, const TransverseJetPoint& p, double threshold = 1e-9);

/// S^ū = (h^{-1})(Γ ∂L/∂y^(r) - ∂L/∂y^(r-1)) / (2(r+1)), as truncated series about p (degree m needs
/// L to degree m+2). Throws SingularHessian.
std::vector<PowerSeries> semispray_series(const LagrangianField& L, const TransverseJetPoint& p, int degree,
                                          double threshold = 1e-9);

struct SemiSprayValue {
  std::vector<double> S;
  /// (x̄, y^(1), 2y^(2), ..., r·y^(r), (r+1)S), the local form of the spray.
  std::vector<double> local_form;
  /// The section ν^r F → ν^{r+1} F with top jet σ = -2S (chart-invariant).
  TransverseJetPoint section;
};

SemiSprayValue semispray(const LagrangianField& L, const TransverseJetPoint& p);

/// q functions S^ū(x̄, y^(1..r)): closed expressions or derived from L.
class SemiSprayField {
 public:
  static SemiSprayField from_lagrangian(LagrangianField L);
  static SemiSprayField from_exprs(std::vector<ExprProgram> components, int r);
  /// σ given directly as expansions (used by the lift, where σ^(r) is known
  /// in closed form). S = -σ/2.
  using SigmaExpander = std::function<std::vector<PowerSeries>(const TransverseJetPoint&, int degree)>;
  static SemiSprayField from_sigma(int r, int q, SigmaExpander sigma);

  int order() const { return order_; }
  int q() const { return q_; }
  std::vector<PowerSeries> expand(const TransverseJetPoint& p, int degree) const;
  std::vector<double> value(const TransverseJetPoint& p) const;
  /// q × (r+1)q matrix of ∂S/∂(x̄, y^(1), ..., y^(r)).
  Eigen::MatrixXd jacobian(const TransverseJetPoint& p) const;

 private:
  int order_ = 1;
  int q_ = 1;
  std::optional<LagrangianField> lagrangian_;
  std::vector<ExprProgram> exprs_;
  SigmaExpander sigma_;
};

struct ConnectionCoefficients {
  int order = 1;
  std::vector<Eigen::MatrixXd> M;  // M[k-1] = M_(k)
  std::vector<Eigen::MatrixXd> N;  // N[k-1] = N_(k)
};

/// M_(r+1-j) = -∂S/∂y^(j).
ConnectionCoefficients dual_coefficients(const SemiSprayField& S, const TransverseJetPoint& p);

struct Projectors {
  Eigen::MatrixXd h;
  Eigen::MatrixXd v;
  Eigen::MatrixXd lie_J;  // L_S J
};

/// h = (rI - L_S J)/(r+1), v = (I + L_S J)/(r+1), spray field Γ_S = (y^(1), 2y^(2), ..., r·y^(r), (r+1)σ).
Projectors projectors(const SemiSprayField& S, const TransverseJetPoint& p);
/// Same, from a given q × (r+1)q Jacobian of σ.
Projectors projectors_from_sigma_jacobian(const Eigen::MatrixXd& dsigma, int r, int q);

/// N_(k) read off the X-row of h.
ConnectionCoefficients horizontal_coefficients(const Eigen::MatrixXd& h, int r, int q);

/// Horizontal lift X ↦ (A_0 X, A_1 X, ..., A_r X) spanning H̄_0 = ann{θ J^k, k < r},
/// θ the bottom block row of v. A_0 = I.
std::vector<Eigen::MatrixXd> horizontal_lift(const Eigen::MatrixXd& v, int r, int q);

/// Columns: the lift of H̄_0 and its J-translates J H̄_0, ..., J^r H̄_0.
Eigen::MatrixXd decomposition_basis(const std::vector<Eigen::MatrixXd>& lift, int r, int q);

}  // namespace folijet

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "folijet/atlas.hpp"
#include "folijet/taylor.hpp"
#include "json.hpp"

namespace folijet {

/// A point (x^u, x^ū, y^(1), ..., y^(r)) of ν^r F in one chart.
/// jets[k-1] holds y^(k), stored as Taylor coefficients (1/k! normalization).
struct TransverseJetPoint {
  std::string chart;
  int order = 1;
  std::vector<double> leaf;
  std::vector<double> base;
  std::vector<std::vector<double>> jets;

  int q() const { return static_cast<int>(base.size()); }
  /// Throws ShapeError or DomainError if the invariants do not hold.
  void check() const;
  /// (x, y^(1), ..., y^(r)) flattened, length (r+1)q.
  std::vector<double> flat() const;
  static TransverseJetPoint from_flat(std::string chart, std::vector<double> leaf, const std::vector<double>& flat,
                                      int order);
  nlohmann::json to_json() const;
};

/// A vector (X, Y^(1), ..., Y^(r)) in a fiber of ν F^r.
struct TransverseFiberVector {
  TransverseJetPoint basepoint;
  std::vector<double> components;  // (r+1)q entries
};

/// The jet transport of a transition (chart change on ν^r F).
TransverseJetPoint prolong_transition(const FoliatedAtlas& atlas, const Transition& t, const TransverseJetPoint& point,
                                      double det_threshold = 1e-9);

/// Same transport with no atlas bookkeeping; used where the caller has
/// already checked the overlap.
TransverseJetPoint transport_jets(const Transition& t, const TransverseJetPoint& point);

/// Fiber Jacobian ∂y'^(γ)/∂y^(β), 0 <= β, γ <= r, with y^(0) = x̄; block
/// (γ, β) sits at rows γq.., columns βq...
Eigen::MatrixXd prolong_jacobian(const FoliatedAtlas& atlas, const Transition& t, const TransverseJetPoint& point);

/// Inclusion ν^{r_low} F → ν^{r_high} F.
TransverseJetPoint include_jet(int r_low, int r_high, const TransverseJetPoint& point);

TransverseJetPoint zero_section(int r, const std::vector<double>& leaf, const std::vector<double>& base,
                                std::string chart = "");

/// The r-transverse structure J as a matrix on (X, Y^(1), ..., Y^(r)).
Eigen::MatrixXd j_matrix(int r, int q);
/// The dual J* assembled term by term from dy^(k-1) ⊗ ∂/∂y^(k), acting on
/// covector components (ω_x, ω_1, ..., ω_r).
Eigen::MatrixXd j_dual_matrix(int r, int q);

TransverseFiberVector apply_J(const TransverseFiberVector& v, int k = 1);
/// J* applied k times to covector components.
std::vector<double> apply_J_dual(const std::vector<double>& covector, int r, int q, int k = 1);

/// (X, X) block of a lifted metric at the zero section over (leaf, base).
Eigen::MatrixXd restrict_to_zero_section(const std::function<Eigen::MatrixXd(const TransverseJetPoint&)>& metric_eval,
                                         int r, const std::vector<double>& leaf, const std::vector<double>& base,
                                         const std::string& chart = "");

}  // namespace folijet

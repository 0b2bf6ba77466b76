#pragma once

#include <optional>
#include <string>
#include <vector>

#include "folijet/dynamics.hpp"
#include "folijet/report.hpp"

namespace folijet {

/// A point (x, y^(1), ..., y^(r-1), p) of ν^{r-1}F ×_M ν*F.
struct CotangentJetPoint {
  std::string chart;
  int order = 1;
  std::vector<double> leaf;
  std::vector<double> base;
  std::vector<std::vector<double>> jets;  // r-1 rows
  std::vector<double> momentum;

  int q() const { return static_cast<int>(base.size()); }
  /// Throws ShapeError, DomainError.
  void check() const;
  nlohmann::json to_json() const;
};

struct HamiltonianValue {
  double value = 0.0;
  CotangentJetPoint at;
};

struct NewtonOptions {
  double tolerance = 1e-10;  // on ‖F‖∞
  int max_iterations = 50;
  double max_condition = 1e12;
  int max_halvings = 30;
};

/// (x, y^(1..r)) ↦ (x, y^(1..r-1), ∂L/∂y^(r)). Throws ExcludedPoint.
CotangentJetPoint legendre_map(const LagrangianField& L, const TransverseJetPoint& point);

/// Damped Newton on ∂L/∂y^(r) = momentum, starting at `guess` (zero if
/// empty). Throws SingularHessian, NoConvergence, ExcludedPoint.
/// `iterations` receives the number of Newton steps taken.
TransverseJetPoint legendre_inverse(const LagrangianField& L, const CotangentJetPoint& cpoint,
                                    const std::vector<double>& guess = {}, const NewtonOptions& opts = {},
                                    int* iterations = nullptr);

/// H = L ∘ ℒ^{-1}.
HamiltonianValue pseudo_hamiltonian(const LagrangianField& L, const CotangentJetPoint& cpoint,
                                    const std::vector<double>& guess = {}, const NewtonOptions& opts = {});

/// Diagonal hamiltonian of the stagewise chain ℒ = ℒ^(1) ∘ ... ∘ ℒ^(r):
/// H(x, p) = L^(0)(x, p, ..., p), with L^(j-1) = L^(j) ∘ (ℒ^(j))^{-1}.
///
/// The stage inverses are handled as truncated series in the jet slots
/// about the current iterate; an outer damped Newton on y then solves
/// ℒ(y) = (p, ..., p), and H = L(y).
class DiagonalHamiltonian {
 public:
  DiagonalHamiltonian(LagrangianField L, NewtonOptions opts = {});

  struct Solution {
    double value = 0.0;
    TransverseJetPoint point;  // ℒ^{-1}(p, ..., p)
    int iterations = 0;
  };

  /// Throws SingularHessian / NoConvergence naming the stage.
  Solution solve(const std::vector<double>& base, const std::vector<double>& momentum,
                 const std::vector<std::vector<double>>& guess = {}) const;
  double operator()(const std::vector<double>& base, const std::vector<double>& momentum) const {
    return solve(base, momentum).value;
  }

  /// Momenta (p_1, ..., p_r) of the composite chain at a jet point, and
  /// the Jacobian of their inverse ∂y/∂p (rq × rq).
  struct Stagewise {
    std::vector<std::vector<double>> momenta;
    Eigen::MatrixXd inverse_jacobian;
  };
  Stagewise forward(const TransverseJetPoint& p) const;

  const LagrangianField& lagrangian() const { return L_; }

 private:
  LagrangianField L_;
  NewtonOptions opts_;
};

DiagonalHamiltonian legendre_chain(const LagrangianField& L, const NewtonOptions& opts = {});

struct AdmissibilityOptions {
  double hessian_threshold = 1e-9;
  double positivity_tol = 1e-12;
  double zero_tol = 1e-12;
  double level_tol = 1e-8;
  double jet_scale = 1.0;
};

/// Positive admissibility at sampled points of `domain` (leaf coordinates
/// first): PD vertical Hessian, L ≥ 0 = L(x, 0), no leaf dependence, and
/// the level φ(x) reached along a random ray. φ defaults to 1.
ValidationReport admissibility_check(const LagrangianField& L, const Box& domain,
                                     const std::optional<ExprProgram>& phi, int samples, uint64_t seed,
                                     const AdmissibilityOptions& opts = {});

}  // namespace folijet

#pragma once

#include <optional>
#include <string>

#include "folijet/legendre.hpp"
#include "folijet/riemann.hpp"

namespace folijet {

struct CertifyOptions {
  int samples = 50;
  uint64_t seed = 0;
  int order = 0;  // 0: take it from the lagrangian
  ValidationOptions atlas;
  double projector_tol = 1e-9;
  double projector_sum_tol = 1e-12;
  HolonomyOptions holonomy;
  double vertical_tol = 1e-8;
  double legendre_tol = 1e-9;
  double hamiltonian_tol = 1e-8;
  AdmissibilityOptions admissibility;
};

/// Exactly one of metric / lagrangian names an atlas object.
struct CertifyTarget {
  std::optional<std::string> metric;
  std::optional<std::string> lagrangian;
};

/// atlas validation → lift (metric targets) → projector and connection
/// identities → holonomy → vertical exactness → Legendre chain and
/// admissibility, all in one report. Setup problems (unknown names, bad
/// order) throw; failures inside a check are recorded as failed checks.
ValidationReport certify(const FoliatedAtlas& atlas, const CertifyTarget& target, const CertifyOptions& opts);

}  // namespace folijet

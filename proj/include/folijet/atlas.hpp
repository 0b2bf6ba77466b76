#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "folijet/expr.hpp"
#include "folijet/report.hpp"
#include "folijet/sampling.hpp"
#include "json.hpp"

namespace folijet {

struct Chart {
  std::string name;
  Box domain;  // leaf coordinates first, then transverse
};

/// Foliated chart change: x^{u'}(u, x), x^{ū'}(x).
class Transition {
 public:
  Transition() = default;
  Transition(std::string name, std::string from, std::string to, std::vector<ExprProgram> leaf_exprs,
             std::vector<ExprProgram> transverse_exprs, Box overlap, int leaf_dim, int transverse_dim);

  std::string name;
  std::string from;
  std::string to;
  Box overlap;
  std::optional<std::string> inverse_of;

  const std::vector<ExprProgram>& leaf_exprs() const { return leaf_exprs_; }
  const std::vector<ExprProgram>& transverse_exprs() const { return transverse_exprs_; }
  int leaf_dim() const { return static_cast<int>(leaf_exprs_.size()); }
  int transverse_dim() const { return static_cast<int>(transverse_exprs_.size()); }

  /// x ↦ x' over any scalar kind.
  template <class T>
  std::vector<T> map_transverse(const std::vector<T>& x) const {
    std::vector<T> out;
    out.reserve(tbound_.size());
    for (const auto& b : tbound_) out.push_back(b(x));
    return out;
  }

  /// (u, x) ↦ u'.
  template <class T>
  std::vector<T> map_leaf(const std::vector<T>& u, const std::vector<T>& x) const {
    std::vector<T> args = u;
    args.insert(args.end(), x.begin(), x.end());
    std::vector<T> out;
    out.reserve(lbound_.size());
    for (const auto& b : lbound_) out.push_back(b(args));
    return out;
  }

  /// Full point (u, x) ↦ (u', x') in plain reals.
  std::vector<double> map_point(const std::vector<double>& point) const;

 private:
  std::vector<ExprProgram> leaf_exprs_;
  std::vector<ExprProgram> transverse_exprs_;
  std::vector<BoundProgram> tbound_;
  std::vector<BoundProgram> lbound_;
};

struct MetricSpec {
  std::string name;
  std::string chart;
  std::vector<std::vector<ExprProgram>> components;  // q×q, upper triangle mirrored
};

struct LagrangianSpec {
  std::string name;
  std::string chart;
  int order = 1;
  ExprProgram expr;
  bool slashed = false;
  std::optional<ExprProgram> excluded;
};

struct TripleSpec {
  std::string via[3];  // via[2] should equal via[1] ∘ via[0]
  Box overlap;
};

class FoliatedAtlas {
 public:
  int leaf_dim = 0;
  int transverse_dim = 1;
  std::vector<Chart> charts;
  std::vector<Transition> transitions;
  std::vector<MetricSpec> metrics;
  std::vector<LagrangianSpec> lagrangians;
  std::vector<TripleSpec> triples;

  int dim() const { return leaf_dim + transverse_dim; }
  const Chart& chart(const std::string& name) const;
  const Transition& transition(const std::string& name) const;
  /// Metrics may share a name across charts: one presentation per chart.
  const MetricSpec& metric(const std::string& name, const std::string& chart) const;
  std::vector<const MetricSpec*> metric_family(const std::string& name) const;
  const LagrangianSpec& lagrangian(const std::string& name) const;
  bool has_chart(const std::string& name) const;
  bool has_transition(const std::string& name) const;
};

/// Parses and checks an atlas document. Throws SchemaError, SyntaxError
/// (with document path), UnknownVariable or InvariantViolation.
FoliatedAtlas load_atlas(const nlohmann::json& doc);
FoliatedAtlas load_atlas_text(const std::string& text);
FoliatedAtlas load_atlas_file(const std::string& path);

/// Deterministic points in the transition's overlap; the first is its centre.
std::vector<std::vector<double>> sample_overlap(const Transition& t, int n, uint64_t seed);

struct ValidationOptions {
  double det_threshold = 1e-9;
  double roundtrip_tol = 1e-9;
  double cocycle_tol = 1e-8;
};

ValidationReport validate_foliated(const FoliatedAtlas& atlas, int samples, uint64_t seed,
                                   const ValidationOptions& opts = {});

}  // namespace folijet

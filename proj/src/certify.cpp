#include "folijet/certify.hpp"

#include <cmath>

namespace folijet {

namespace {

// Keeps the worst metric of a check and where it happened.
struct Worst {
  double value;
  bool maximize;
  std::string where;

  void update(double v, const std::string& at) {
    const bool worse = maximize ? !(v <= value) : !(v >= value);
    if (worse) {
      value = v;
      where = at;
    }
  }
};

Worst worst_max() { return {0.0, true, ""}; }
Worst worst_min() { return {INFINITY, false, ""}; }

TransverseJetPoint sample_jet(const std::string& chart, int leaf_dim, const std::vector<double>& pt, int r, Rng& rng,
                              double scale) {
  TransverseJetPoint p;
  p.chart = chart;
  p.order = r;
  p.leaf.assign(pt.begin(), pt.begin() + leaf_dim);
  p.base.assign(pt.begin() + leaf_dim, pt.end());
  for (int k = 0; k < r; ++k) {
    std::vector<double> row;
    for (size_t i = 0; i < p.base.size(); ++i) row.push_back(scale * rng.normal());
    p.jets.push_back(std::move(row));
  }
  return p;
}

}  // namespace

ValidationReport certify(const FoliatedAtlas& atlas, const CertifyTarget& target, const CertifyOptions& opts) {
  if (target.metric.has_value() == target.lagrangian.has_value())
    throw SchemaError("certify needs exactly one of a metric or a lagrangian");
  if (opts.samples < 1) throw InvariantViolation("certify needs samples >= 1");

  // setup: everything here may throw and is an input error
  std::vector<MetricField> family;
  LagrangianField L;
  std::optional<SemiSprayField> spray;
  int r = opts.order;
  if (target.metric) {
    if (r < 1) throw OrderError("certify with a metric needs --order >= 1");
    for (const auto* m : atlas.metric_family(*target.metric)) family.push_back(MetricField::from_spec(atlas, *m));
    if (family.empty()) throw SchemaError("no metric named '" + *target.metric + "'");
    L = lift_lagrangian(family[0], r);
    spray = lift_spray(family[0], r);
  } else {
    L = LagrangianField::from_spec(atlas, atlas.lagrangian(*target.lagrangian));
    if (r != 0 && r != L.order())
      throw OrderError("lagrangian '" + *target.lagrangian + "' has order " + std::to_string(L.order()));
    r = L.order();
    spray = SemiSprayField::from_lagrangian(L);
  }
  const int q = L.q();
  const Box& domain = atlas.chart(L.chart()).domain;

  ValidationReport report = validate_foliated(atlas, opts.samples, opts.seed, opts.atlas);

  // jet samples on the lagrangian's chart, excluded points skipped
  std::vector<TransverseJetPoint> points;
  {
    Rng rng(opts.seed, "certify:jets");
    for (const auto& pt : sample_box(domain, opts.samples, opts.seed, "certify:" + L.chart())) {
      auto p = sample_jet(L.chart(), atlas.leaf_dim, pt, r, rng, 0.5);
      if (L.slashed() && L.is_excluded(p)) continue;
      points.push_back(std::move(p));
    }
  }

  // projector and connection identities
  {
    const int n = (r + 1) * q;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd J = j_matrix(r, q);
    Worst sum = worst_max(), hh = worst_max(), vv = worst_max(), hv = worst_max(), lift = worst_max();
    for (const auto& p : points) {
      const std::string at = p.to_json().dump();
      try {
        auto P = projectors(*spray, p);
        sum.update((P.h + P.v - I).cwiseAbs().maxCoeff(), at);
        hh.update((P.h * P.h - P.h).cwiseAbs().maxCoeff(), at);
        vv.update((P.v * P.v - P.v).cwiseAbs().maxCoeff(), at);
        hv.update((P.h * P.v).cwiseAbs().maxCoeff(), at);
        auto A = horizontal_lift(P.v, r, q);
        Eigen::MatrixXd col(n, q);
        for (int j = 0; j <= r; ++j) col.block(j * q, 0, q, q) = A[j];
        Eigen::MatrixXd theta = P.v.bottomRows(q);
        Eigen::MatrixXd Jk = I;
        double d = 0.0;
        for (int k = 0; k < r; ++k, Jk = J * Jk) d = std::max(d, (theta * Jk * col).cwiseAbs().maxCoeff());
        lift.update(d, at);
      } catch (const Error& e) {
        for (Worst* w : {&sum, &hh, &vv, &hv, &lift}) w->update(INFINITY, at + ": " + e.what());
      }
    }
    report.add_max("projector:sum", sum.where, sum.value, opts.projector_sum_tol);
    report.add_max("projector:h_idempotent", hh.where, hh.value, opts.projector_tol);
    report.add_max("projector:v_idempotent", vv.where, vv.value, opts.projector_tol);
    report.add_max("projector:hv", hv.where, hv.value, opts.projector_tol);
    report.add_max("connection:horizontal_lift", lift.where, lift.value, opts.projector_tol);
  }

  if (target.metric) {
    auto lifted = lift_metric(family, r);
    report.merge(holonomy_check(atlas, lifted, opts.samples, opts.seed, opts.holonomy));
    report.merge(vertical_exactness_check(lifted, L, opts.samples, opts.seed, opts.vertical_tol));
  } else {
    report.note("holonomy and vertical exactness skipped: no metric given");
  }

  // Legendre round trips
  {
    Worst rt = worst_max();
    for (const auto& p : points) {
      const std::string at = p.to_json().dump();
      try {
        auto c = legendre_map(L, p);
        std::vector<double> guess = p.jets.back();
        for (double& g : guess) g += 0.1;
        auto back = legendre_inverse(L, c, guess);
        double d = 0.0;
        for (int i = 0; i < q; ++i) d = std::max(d, std::fabs(back.jets.back()[i] - p.jets.back()[i]));
        auto c2 = legendre_map(L, back);
        for (int i = 0; i < q; ++i) d = std::max(d, std::fabs(c2.momentum[i] - c.momentum[i]));
        rt.update(d, at);
      } catch (const Error& e) {
        rt.update(INFINITY, at + ": " + e.what());
      }
    }
    report.add_max("legendre:roundtrip", rt.where, rt.value, opts.legendre_tol);
  }

  // diagonal hamiltonian of the chain
  {
    auto H = legendre_chain(L);
    std::optional<LagrangianField> L1;
    if (target.metric) L1 = lift_lagrangian(family[0], 1);
    Rng rng(opts.seed, "certify:momenta");
    Worst pos = worst_min(), zero = worst_max(), rel = worst_max();
    for (const auto& p : points) {
      std::vector<double> m;
      for (int i = 0; i < q; ++i) m.push_back(rng.normal());
      nlohmann::json at = {{"base", p.base}, {"momentum", m}};
      try {
        const double h = H(p.base, m);
        pos.update(h, at.dump());
        if (L1) {
          CotangentJetPoint c;
          c.chart = p.chart;
          c.order = 1;
          c.leaf = p.leaf;
          c.base = p.base;
          c.momentum = m;
          const double h1 = pseudo_hamiltonian(*L1, c).value;
          rel.update(std::fabs(h - r * h1) / std::max(1.0, std::fabs(r * h1)), at.dump());
        }
      } catch (const Error& e) {
        pos.update(-INFINITY, at.dump() + ": " + e.what());
        rel.update(INFINITY, at.dump() + ": " + e.what());
      }
      if (!L.slashed()) {
        nlohmann::json at0 = {{"base", p.base}};
        try {
          zero.update(std::fabs(H(p.base, std::vector<double>(q, 0.0))), at0.dump());
        } catch (const Error& e) {
          zero.update(INFINITY, at0.dump() + ": " + e.what());
        }
      }
    }
    report.add_min("hamiltonian:positive", pos.where, pos.value, 0.0);
    if (!L.slashed()) report.add_max("hamiltonian:zero", zero.where, zero.value, opts.admissibility.zero_tol);
    if (L1) {
      report.add_max("hamiltonian:lift_relation", rel.where, rel.value, opts.hamiltonian_tol);
      report.note("hamiltonian:lift_relation compares the diagonal hamiltonian of L^(r) with r times the dual "
                  "hamiltonian of L^(1)");
    }
  }

  report.merge(admissibility_check(L, domain, std::nullopt, opts.samples, opts.seed, opts.admissibility));
  return report;
}

}  // namespace folijet

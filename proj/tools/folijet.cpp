// folijet command-line front end.
//
//   folijet validate  ATLAS [--samples N] [--seed S] [--out PATH]
//   folijet prolong   ATLAS --transition T --order r --jet "u=..;x=..;y1=..;..."
//   folijet semispray ATLAS --lagrangian NAME --jet ...
//   folijet lift      ATLAS --metric NAME --order r --jet ...
//   folijet certify   ATLAS (--metric NAME --order r | --lagrangian NAME) [--samples N] [--seed S] [--out PATH]
//
// Exit codes: 0 all checks pass, 1 some check failed, 2 input or setup error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "folijet/certify.hpp"

using namespace folijet;
using nlohmann::json;

namespace {

uint64_t default_seed() {
  if (const char* env = std::getenv("FOLIJET_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw SchemaError(std::string("FOLIJET_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    double v;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
      throw SchemaError("--jet: bad number '" + item + "' for " + key);
    out.push_back(v);
  }
  return out;
}

// "chart=A;u=0;x=0.5,1;y1=1,0;y2=0,0"
TransverseJetPoint parse_jet(const std::string& text, int order, int leaf_dim, int q, const std::string& chart) {
  TransverseJetPoint p;
  p.chart = chart;
  p.order = order;
  p.leaf.assign(leaf_dim, 0.0);
  p.jets.assign(order, {});
  std::stringstream ss(text);
  std::string field;
  bool have_x = false;
  while (std::getline(ss, field, ';')) {
    if (field.find_first_not_of(" \t") == std::string::npos) continue;
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw SchemaError("--jet: expected key=value, got '" + field + "'");
    std::string key = field.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    const std::string val = field.substr(eq + 1);
    if (key == "chart") {
      p.chart = val;
    } else if (key == "u") {
      p.leaf = parse_numbers(key, val);
    } else if (key == "x") {
      p.base = parse_numbers(key, val);
      have_x = true;
    } else if (key.size() > 1 && key[0] == 'y' && key.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int k = std::stoi(key.substr(1));
      if (k < 1 || k > order) throw SchemaError("--jet: " + key + " is outside orders 1.." + std::to_string(order));
      p.jets[k - 1] = parse_numbers(key, val);
    } else {
      throw SchemaError("--jet: unknown key '" + key + "'");
    }
  }
  if (!have_x) throw SchemaError("--jet: missing x");
  for (int k = 0; k < order; ++k)
    if (p.jets[k].empty()) throw SchemaError("--jet: missing y" + std::to_string(k + 1));
  if (p.q() != q) throw ShapeError("--jet: expected " + std::to_string(q) + " transverse coordinates");
  p.check();
  return p;
}

void emit(const json& doc, const std::string& out) {
  if (out.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw SchemaError("cannot write " + out);
  f << doc.dump(2) << "\n";
}

int finish(const ValidationReport& report, const std::string& out) {
  emit(report.to_json(), out);
  for (const auto& c : report.checks())
    if (!c.pass) std::cerr << "FAIL " << c.name << ": " << c.context << "\n";
  return report.all_pass() ? 0 : 1;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"folijet: jets, sprays and lifted metrics on foliated atlases"};
  app.require_subcommand(1);

  std::string atlas_path, out, transition, jet, metric, lagrangian;
  int samples = 50, order = 0;
  uint64_t seed = 0;
  bool seed_given = false;
  CertifyOptions copt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("atlas", atlas_path, "atlas JSON file")->required();
    sub->add_option("--out", out, "write the output here instead of stdout");
  };
  auto sampling = [&](CLI::App* sub) {
    sub->add_option("--samples", samples, "sample points per check")->check(CLI::PositiveNumber);
    sub->add_option_function<uint64_t>(
        "--seed",
        [&](const uint64_t& s) {
          seed = s;
          seed_given = true;
        },
        "seed (default: FOLIJET_SEED or 0)");
    sub->add_option("--tol-det", copt.atlas.det_threshold, "transverse Jacobian determinant threshold");
    sub->add_option("--tol-roundtrip", copt.atlas.roundtrip_tol, "inverse-transition round trip tolerance");
    sub->add_option("--tol-cocycle", copt.atlas.cocycle_tol, "cocycle tolerance");
  };

  auto* validate = app.add_subcommand("validate", "check that an atlas is foliated");
  common(validate);
  sampling(validate);

  auto* prolong = app.add_subcommand("prolong", "transport a jet across a transition");
  common(prolong);
  prolong->add_option("--transition", transition, "transition name")->required();
  prolong->add_option("--order", order, "jet order r")->required()->check(CLI::PositiveNumber);
  prolong->add_option("--jet", jet, "jet, e.g. \"u=0;x=1;y1=1;y2=0\"")->required();

  auto* semi = app.add_subcommand("semispray", "semi-spray of a lagrangian at a jet");
  common(semi);
  semi->add_option("--lagrangian", lagrangian, "lagrangian name")->required();
  semi->add_option("--jet", jet, "jet point")->required();

  auto* lift = app.add_subcommand("lift", "lifted lagrangian and metric at a jet");
  common(lift);
  lift->add_option("--metric", metric, "metric name")->required();
  lift->add_option("--order", order, "lift order r")->required()->check(CLI::PositiveNumber);
  lift->add_option("--jet", jet, "jet point (chart=... picks the presentation)")->required();

  auto* cert = app.add_subcommand("certify", "run the full verification pipeline");
  common(cert);
  sampling(cert);
  auto* mopt = cert->add_option("--metric", metric, "metric name");
  auto* lopt = cert->add_option("--lagrangian", lagrangian, "lagrangian name");
  mopt->excludes(lopt);
  cert->add_option("--order", order, "order r (metric targets)")->check(CLI::PositiveNumber);
  cert->add_option("--tol-holonomy", copt.holonomy.tolerance, "holonomy tolerance");
  cert->add_option("--tol-vertical", copt.vertical_tol, "vertical exactness tolerance");
  cert->add_option("--tol-projector", copt.projector_tol, "projector identity tolerance");
  cert->add_option("--tol-legendre", copt.legendre_tol, "Legendre round trip tolerance");
  cert->add_option("--tol-hamiltonian", copt.hamiltonian_tol, "diagonal hamiltonian tolerance");
  cert->add_option("--tol-level", copt.admissibility.level_tol, "admissibility level tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!seed_given) seed = default_seed();
    const FoliatedAtlas atlas = load_atlas_file(atlas_path);

    if (*validate) return finish(validate_foliated(atlas, samples, seed, copt.atlas), out);

    if (*prolong) {
      const Transition& t = atlas.transition(transition);
      auto p = parse_jet(jet, order, atlas.leaf_dim, atlas.transverse_dim, t.from);
      emit(prolong_transition(atlas, t, p).to_json(), out);
      return 0;
    }

    if (*semi) {
      auto L = LagrangianField::from_spec(atlas, atlas.lagrangian(lagrangian));
      auto p = parse_jet(jet, L.order(), atlas.leaf_dim, atlas.transverse_dim, L.chart());
      auto s = semispray(L, p);
      emit({{"lagrangian", lagrangian},
            {"point", p.to_json()},
            {"S", s.S},
            {"local_form", s.local_form},
            {"section", s.section.to_json()}},
           out);
      return 0;
    }

    if (*lift) {
      std::vector<MetricField> family;
      for (const auto* m : atlas.metric_family(metric)) family.push_back(MetricField::from_spec(atlas, *m));
      if (family.empty()) throw SchemaError("no metric named '" + metric + "'");
      auto p = parse_jet(jet, order, atlas.leaf_dim, atlas.transverse_dim, family[0].chart());
      LiftedMetric G = lift_metric(family, order);
      const MetricField& g = G.source(p.chart);
      auto sigma = lift_spray(g, order).value(p);
      for (double& s : sigma) s *= -2.0;
      emit({{"metric", metric},
            {"order", order},
            {"point", p.to_json()},
            {"lagrangian", lift_lagrangian(g, order).value(p)},
            {"spray_section", sigma},
            {"lifted_metric", matrix_json(G(p))}},
           out);
      return 0;
    }

    CertifyTarget target;
    if (!metric.empty()) target.metric = metric;
    if (!lagrangian.empty()) target.lagrangian = lagrangian;
    copt.samples = samples;
    copt.seed = seed;
    copt.order = order;
    return finish(certify(atlas, target, copt), out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

#include "folijet/atlas.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "folijet/dual.hpp"

namespace folijet {

using nlohmann::json;

namespace {

std::vector<std::string> coordinate_names(int p, int q) {
  std::vector<std::string> names;
  for (int i = 1; i <= p; ++i) names.push_back("u" + std::to_string(i));
  for (int i = 1; i <= q; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

}  // namespace

Transition::Transition(std::string name_, std::string from_, std::string to_,
                       std::vector<ExprProgram> leaf_exprs, std::vector<ExprProgram> transverse_exprs,
                       Box overlap_, int leaf_dim, int transverse_dim)
    : name(std::move(name_)),
      from(std::move(from_)),
      to(std::move(to_)),
      overlap(std::move(overlap_)),
      leaf_exprs_(std::move(leaf_exprs)),
      transverse_exprs_(std::move(transverse_exprs)) {
  if (static_cast<int>(leaf_exprs_.size()) != leaf_dim || static_cast<int>(transverse_exprs_.size()) != transverse_dim)
    throw InvariantViolation("transition " + name + " has the wrong number of expressions");
  const auto xs = coordinate_names(0, transverse_dim);
  const auto all = coordinate_names(leaf_dim, transverse_dim);
  for (const auto& e : transverse_exprs_) tbound_.emplace_back(e, xs);
  for (const auto& e : leaf_exprs_) lbound_.emplace_back(e, all);
}

std::vector<double> Transition::map_point(const std::vector<double>& point) const {
  const int p = leaf_dim();
  std::vector<double> u(point.begin(), point.begin() + p);
  std::vector<double> x(point.begin() + p, point.end());
  std::vector<double> out = map_leaf(u, x);
  auto xp = map_transverse(x);
  out.insert(out.end(), xp.begin(), xp.end());
  return out;
}

namespace {

template <class V>
const V& find_named(const std::vector<V>& items, const std::string& name, const char* what) {
  for (const auto& it : items)
    if (it.name == name) return it;
  throw SchemaError(std::string("no ") + what + " named '" + name + "'");
}

}  // namespace

const Chart& FoliatedAtlas::chart(const std::string& name) const {
  return find_named(charts, name, "chart");
}
const Transition& FoliatedAtlas::transition(const std::string& name) const {
  return find_named(transitions, name, "transition");
}
const MetricSpec& FoliatedAtlas::metric(const std::string& name, const std::string& chart) const {
  for (const auto& m : metrics)
    if (m.name == name && m.chart == chart) return m;
  throw SchemaError("no metric named '" + name + "' on chart '" + chart + "'");
}
std::vector<const MetricSpec*> FoliatedAtlas::metric_family(const std::string& name) const {
  std::vector<const MetricSpec*> out;
  for (const auto& m : metrics)
    if (m.name == name) out.push_back(&m);
  return out;
}
const LagrangianSpec& FoliatedAtlas::lagrangian(const std::string& name) const {
  return find_named(lagrangians, name, "lagrangian");
}
bool FoliatedAtlas::has_chart(const std::string& name) const {
  for (const auto& c : charts)
    if (c.name == name) return true;
  return false;
}
bool FoliatedAtlas::has_transition(const std::string& name) const {
  for (const auto& t : transitions)
    if (t.name == name) return true;
  return false;
}

// ---------------------------------------------------------------- loading

namespace {

class Loader {
 public:
  explicit Loader(const json& doc) : doc_(doc) {}

  FoliatedAtlas run() {
    if (!doc_.is_object()) throw SchemaError("atlas document must be an object");
    static const std::set<std::string> known{"leaf_dim", "transverse_dim", "charts", "transitions",
                                             "metrics", "lagrangians", "triples", "description"};
    for (const auto& [key, _] : doc_.items())
      if (!known.count(key)) throw SchemaError("unknown top-level key '" + key + "'");

    a_.leaf_dim = integer(doc_, "leaf_dim", "leaf_dim");
    a_.transverse_dim = integer(doc_, "transverse_dim", "transverse_dim");
    if (a_.leaf_dim < 0) throw SchemaError("leaf_dim must be >= 0");
    if (a_.transverse_dim < 1) throw SchemaError("transverse_dim must be >= 1");

    const json& charts = array(doc_, "charts", "charts");
    if (charts.empty()) throw SchemaError("charts: at least one chart is required");
    for (size_t i = 0; i < charts.size(); ++i) load_chart(charts[i], "charts[" + std::to_string(i) + "]");
    if (doc_.contains("transitions")) {
      const json& ts = array(doc_, "transitions", "transitions");
      for (size_t i = 0; i < ts.size(); ++i) load_transition(ts[i], "transitions[" + std::to_string(i) + "]");
      for (size_t i = 0; i < ts.size(); ++i) link_inverse(ts[i], a_.transitions[i], "transitions[" + std::to_string(i) + "]");
    }
    if (doc_.contains("metrics")) {
      const json& ms = array(doc_, "metrics", "metrics");
      for (size_t i = 0; i < ms.size(); ++i) load_metric(ms[i], "metrics[" + std::to_string(i) + "]");
    }
    if (doc_.contains("lagrangians")) {
      const json& ls = array(doc_, "lagrangians", "lagrangians");
      for (size_t i = 0; i < ls.size(); ++i) load_lagrangian(ls[i], "lagrangians[" + std::to_string(i) + "]");
    }
    if (doc_.contains("triples")) {
      const json& ts = array(doc_, "triples", "triples");
      for (size_t i = 0; i < ts.size(); ++i) load_triple(ts[i], "triples[" + std::to_string(i) + "]");
    }
    return std::move(a_);
  }

 private:
  static const json& field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path + ": missing key '" + key + "'");
    return *it;
  }

  static int integer(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_number_integer()) throw SchemaError(path + ": expected an integer");
    return v.get<int>();
  }

  static std::string string(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_string()) throw SchemaError(path + "." + key + ": expected a string");
    return v.get<std::string>();
  }

  static const json& array(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_array()) throw SchemaError(path + ": expected a list");
    return v;
  }

  Box box(const json& v, const std::string& path) const {
    if (!v.is_array() || static_cast<int>(v.size()) != a_.dim())
      throw SchemaError(path + ": expected " + std::to_string(a_.dim()) + " [lo, hi] pairs");
    Box b;
    for (size_t i = 0; i < v.size(); ++i) {
      const json& iv = v[i];
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
        throw SchemaError(path + "[" + std::to_string(i) + "]: expected [lo, hi]");
      const double lo = iv[0].get<double>(), hi = iv[1].get<double>();
      if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
        throw SchemaError(path + "[" + std::to_string(i) + "]: empty or non-finite interval");
      b.intervals.emplace_back(lo, hi);
    }
    return b;
  }

  static ExprProgram expression(const json& v, const std::string& path) {
    if (!v.is_string()) throw SchemaError(path + ": expected an expression string");
    try {
      return parse(v.get<std::string>());
    } catch (const SyntaxError& e) {
      throw e.in(path);
    } catch (const UnknownFunction& e) {
      throw UnknownFunction(path + ": " + e.what());
    }
  }

  std::vector<ExprProgram> expressions(const json& obj, const char* key, int count, const std::string& path) const {
    const json& v = field(obj, key, path);
    const std::string p = path + "." + key;
    if (!v.is_array() || static_cast<int>(v.size()) != count)
      throw SchemaError(p + ": expected " + std::to_string(count) + " expressions");
    std::vector<ExprProgram> out;
    for (size_t i = 0; i < v.size(); ++i) out.push_back(expression(v[i], p + "[" + std::to_string(i) + "]"));
    return out;
  }

  void load_chart(const json& c, const std::string& path) {
    Chart ch;
    ch.name = string(c, "name", path);
    if (a_.has_chart(ch.name)) throw SchemaError(path + ": duplicate chart name '" + ch.name + "'");
    ch.domain = box(field(c, "domain", path), path + ".domain");
    a_.charts.push_back(std::move(ch));
  }

  void load_transition(const json& t, const std::string& path) {
    const std::string from = string(t, "from", path);
    const std::string to = string(t, "to", path);
    std::string name = t.contains("name") ? string(t, "name", path) : from + "->" + to;
    if (!a_.has_chart(from)) throw InvariantViolation(path + ": unknown chart '" + from + "'");
    if (!a_.has_chart(to)) throw InvariantViolation(path + ": unknown chart '" + to + "'");
    if (from == to) throw InvariantViolation(path + ": a transition must join two distinct charts");
    if (a_.has_transition(name)) throw SchemaError(path + ": duplicate transition name '" + name + "'");

    auto leaf = expressions(t, "leaf_exprs", a_.leaf_dim, path);
    auto trans = expressions(t, "transverse_exprs", a_.transverse_dim, path);

    VariableContext ctx;
    ctx.leaf_dim = a_.leaf_dim;
    ctx.transverse_dim = a_.transverse_dim;
    ctx.allow_jets = false;
    for (size_t i = 0; i < leaf.size(); ++i)
      leaf[i].check_variables(ctx, path + ".leaf_exprs[" + std::to_string(i) + "]");
    for (size_t i = 0; i < trans.size(); ++i) {
      const std::string p = path + ".transverse_exprs[" + std::to_string(i) + "]";
      for (const auto& v : trans[i].free_variables()) {
        auto vn = VariableName::parse(v);
        if (vn && vn->kind == VariableName::Kind::leaf)
          throw InvariantViolation(p + ": transverse expression depends on leaf coordinate " + v +
                                   " (transition is not foliated)");
      }
      trans[i].check_variables(ctx, p);
    }

    Box overlap = box(field(t, "overlap", path), path + ".overlap");
    if (!overlap.inside(a_.chart(from).domain))
      throw InvariantViolation(path + ": overlap is not contained in the domain of chart '" + from + "'");
    a_.transitions.emplace_back(std::move(name), from, to, std::move(leaf), std::move(trans), std::move(overlap),
                                a_.leaf_dim, a_.transverse_dim);
  }

  void link_inverse(const json& t, Transition& tr, const std::string& path) {
    if (!t.contains("inverse_of")) return;
    const std::string other = string(t, "inverse_of", path);
    if (!a_.has_transition(other)) throw SchemaError(path + ".inverse_of: unknown transition '" + other + "'");
    const Transition& o = a_.transition(other);
    if (o.from != tr.to || o.to != tr.from)
      throw InvariantViolation(path + ".inverse_of: '" + other + "' does not run the opposite way");
    tr.inverse_of = other;
  }

  void load_metric(const json& m, const std::string& path) {
    MetricSpec spec;
    spec.name = string(m, "name", path);
    spec.chart = string(m, "chart", path);
    if (!a_.has_chart(spec.chart)) throw SchemaError(path + ": unknown chart '" + spec.chart + "'");
    for (const auto& m : a_.metrics)
      if (m.name == spec.name && m.chart == spec.chart)
        throw SchemaError(path + ": duplicate metric '" + spec.name + "' on chart '" + spec.chart + "'");
    const int q = a_.transverse_dim;
    const json& comps = field(m, "components", path);
    if (!comps.is_array() || static_cast<int>(comps.size()) != q)
      throw SchemaError(path + ".components: expected a " + std::to_string(q) + "x" + std::to_string(q) + " matrix");
    VariableContext ctx;
    ctx.transverse_dim = q;
    ctx.allow_leaf = false;
    ctx.allow_jets = false;
    spec.components.assign(q, std::vector<ExprProgram>(q));
    for (int i = 0; i < q; ++i) {
      if (!comps[i].is_array() || static_cast<int>(comps[i].size()) != q)
        throw SchemaError(path + ".components[" + std::to_string(i) + "]: expected " + std::to_string(q) + " entries");
      for (int j = 0; j < q; ++j) {
        const std::string p = path + ".components[" + std::to_string(i) + "][" + std::to_string(j) + "]";
        auto e = expression(comps[i][j], p);
        e.check_variables(ctx, p);
        if (j >= i) spec.components[i][j] = std::move(e);
      }
    }
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < i; ++j) spec.components[i][j] = spec.components[j][i];
    a_.metrics.push_back(std::move(spec));
  }

  void load_lagrangian(const json& l, const std::string& path) {
    LagrangianSpec spec;
    spec.name = string(l, "name", path);
    spec.chart = string(l, "chart", path);
    if (!a_.has_chart(spec.chart)) throw SchemaError(path + ": unknown chart '" + spec.chart + "'");
    for (const auto& m : a_.lagrangians)
      if (m.name == spec.name) throw SchemaError(path + ": duplicate lagrangian name '" + spec.name + "'");
    spec.order = integer(l, "order", path);
    if (spec.order < 1) throw SchemaError(path + ".order: must be >= 1");
    spec.expr = expression(field(l, "expr", path), path + ".expr");
    if (l.contains("slashed")) {
      if (!l["slashed"].is_boolean()) throw SchemaError(path + ".slashed: expected a boolean");
      spec.slashed = l["slashed"].get<bool>();
    }
    if (l.contains("excluded")) spec.excluded = expression(l["excluded"], path + ".excluded");
    if (spec.slashed && !spec.excluded)
      throw SchemaError(path + ": a slashed lagrangian needs an 'excluded' expression");

    VariableContext ctx;
    ctx.transverse_dim = a_.transverse_dim;
    ctx.jet_order = spec.order;
    ctx.allow_leaf = false;
    auto check = [&](const ExprProgram& e, const std::string& p) {
      for (const auto& v : e.free_variables()) {
        auto vn = VariableName::parse(v);
        if (vn && vn->kind == VariableName::Kind::leaf)
          throw InvariantViolation(p + ": lagrangian depends on leaf coordinate " + v + " (not projectable)");
      }
      e.check_variables(ctx, p);
    };
    check(spec.expr, path + ".expr");
    if (spec.excluded) check(*spec.excluded, path + ".excluded");
    a_.lagrangians.push_back(std::move(spec));
  }

  void load_triple(const json& t, const std::string& path) {
    TripleSpec spec;
    const json& via = field(t, "via", path);
    if (!via.is_array() || via.size() != 3) throw SchemaError(path + ".via: expected three transition names");
    for (int k = 0; k < 3; ++k) {
      if (!via[k].is_string()) throw SchemaError(path + ".via: expected strings");
      spec.via[k] = via[k].get<std::string>();
      if (!a_.has_transition(spec.via[k])) throw SchemaError(path + ".via: unknown transition '" + spec.via[k] + "'");
    }
    const auto& t1 = a_.transition(spec.via[0]);
    const auto& t2 = a_.transition(spec.via[1]);
    const auto& t3 = a_.transition(spec.via[2]);
    if (t1.to != t2.from || t3.from != t1.from || t3.to != t2.to)
      throw InvariantViolation(path + ": via[2] must run from via[0].from to via[1].to through via[0].to");
    spec.overlap = box(field(t, "overlap", path), path + ".overlap");
    a_.triples.push_back(std::move(spec));
  }

  const json& doc_;
  FoliatedAtlas a_;
};

}  // namespace

FoliatedAtlas load_atlas(const json& doc) { return Loader(doc).run(); }

FoliatedAtlas load_atlas_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed atlas document: ") + e.what());
  }
  return load_atlas(doc);
}

FoliatedAtlas load_atlas_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read atlas file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_atlas_text(ss.str());
}

// ---------------------------------------------------------------- validation

std::vector<std::vector<double>> sample_overlap(const Transition& t, int n, uint64_t seed) {
  return sample_box(t.overlap, n, seed, "overlap:" + t.name);
}

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

ValidationReport validate_foliated(const FoliatedAtlas& atlas, int samples, uint64_t seed,
                                   const ValidationOptions& opts) {
  ValidationReport report(seed);
  if (samples < 1) throw InvariantViolation("validate_foliated needs samples >= 1");
  const int p = atlas.leaf_dim, q = atlas.transverse_dim, n = p + q;
  const double inf = std::numeric_limits<double>::infinity();

  for (const auto& t : atlas.transitions) {
    const auto pts = sample_overlap(t, samples, seed);
    double min_det = inf, mixed = 0.0;
    std::string worst_at;
    for (const auto& pt : pts) {
      // Seed every coordinate, leaf ones included, so the mixed block is computed too.
      std::map<std::string, DualQuadScalar> env;
      for (int i = 0; i < p; ++i) env["u" + std::to_string(i + 1)] = seed_variable(i, pt[i], n);
      for (int i = 0; i < q; ++i) env["x" + std::to_string(i + 1)] = seed_variable(p + i, pt[p + i], n);
      double det;
      try {
        std::vector<DualQuadScalar> image;
        for (const auto& e : t.transverse_exprs()) image.push_back(eval(e, env));
        Eigen::MatrixXd jac(q, q);
        for (int a = 0; a < q; ++a) {
          for (int b = 0; b < q; ++b) jac(a, b) = image[a].grad(p + b);
          for (int b = 0; b < p; ++b) mixed = std::max(mixed, std::fabs(image[a].grad(b)));
        }
        det = std::fabs(jac.determinant());
      } catch (const DomainError&) {
        det = std::numeric_limits<double>::quiet_NaN();
      }
      if (!(det >= min_det)) {
        min_det = det;
        std::ostringstream os;
        os << "transition " << t.name << " at (";
        for (size_t i = 0; i < pt.size(); ++i) os << (i ? ", " : "") << pt[i];
        os << ")";
        worst_at = os.str();
      }
    }
    report.add_min("invertibility", worst_at, min_det, opts.det_threshold);
    report.add_max("foliated_mixed_block", "transition " + t.name, mixed, 0.0);

    if (t.inverse_of) {
      const Transition& inv = atlas.transition(*t.inverse_of);
      double dev = 0.0;
      for (const auto& pt : pts) {
        try {
          dev = std::max(dev, max_abs_diff(inv.map_point(t.map_point(pt)), pt));
        } catch (const DomainError&) {
          dev = inf;
        }
      }
      report.add_max("inverse_roundtrip", "transition " + t.name + " then " + inv.name, dev, opts.roundtrip_tol);
    }
  }

  for (size_t k = 0; k < atlas.triples.size(); ++k) {
    const auto& tr = atlas.triples[k];
    const auto& t1 = atlas.transition(tr.via[0]);
    const auto& t2 = atlas.transition(tr.via[1]);
    const auto& t3 = atlas.transition(tr.via[2]);
    double dev = 0.0;
    for (const auto& pt : sample_box(tr.overlap, samples, seed, "triple:" + std::to_string(k))) {
      try {
        dev = std::max(dev, max_abs_diff(t2.map_point(t1.map_point(pt)), t3.map_point(pt)));
      } catch (const DomainError&) {
        dev = inf;
      }
    }
    report.add_max("cocycle", "triple " + tr.via[0] + ", " + tr.via[1] + ", " + tr.via[2], dev, opts.cocycle_tol);
  }
  return report;
}

}  // namespace folijet

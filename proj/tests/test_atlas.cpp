#include <cmath>
#include <string>

#include "doctest.h"
#include "folijet/atlas.hpp"

using namespace folijet;

namespace {

std::string data(const char* name) { return std::string(FOLIJET_TEST_DATA) + "/" + name; }

nlohmann::json one_transition(const std::string& transverse, const nlohmann::json& overlap) {
  return nlohmann::json::parse(R"({
    "leaf_dim": 1, "transverse_dim": 1,
    "charts": [{"name": "A", "domain": [[-1, 1], [-3, 3]]}, {"name": "B", "domain": [[-1, 1], [-30, 30]]}],
    "transitions": [{"from": "A", "to": "B", "leaf_exprs": ["u1"], "transverse_exprs": [")" +
                                 transverse + R"("], "overlap": )" + overlap.dump() + "}]}");
}

}  // namespace

TEST_CASE("minimal atlas loads and validates trivially") {
  auto a = load_atlas_file(data("minimal.json"));
  CHECK(a.leaf_dim == 1);
  CHECK(a.transverse_dim == 1);
  CHECK(a.charts.size() == 1);
  auto r = validate_foliated(a, 10, 1);
  CHECK(r.total() == 0);
  CHECK(r.all_pass());
}

TEST_CASE("cubic transition loads") {
  auto a = load_atlas(one_transition("x1^3", {{-1, 1}, {0.5, 2}}));
  REQUIRE(a.transitions.size() == 1);
  CHECK(a.transitions[0].name == "A->B");
  CHECK(a.transitions[0].map_transverse(std::vector<double>{2.0})[0] == 8.0);
}

TEST_CASE("load-time invariants") {
  CHECK_THROWS_AS(load_atlas(one_transition("x1 + u1", {{-1, 1}, {0.5, 2}})), InvariantViolation);
  CHECK_THROWS_AS(load_atlas_file(data("nonfoliated.json")), InvariantViolation);
  CHECK_THROWS_AS(load_atlas(one_transition("x2", {{-1, 1}, {0.5, 2}})), UnknownVariable);
  CHECK_THROWS_AS(load_atlas(one_transition("x1^3", {{-1, 1}, {0.5, 5}})), InvariantViolation);
  CHECK_THROWS_AS(load_atlas(one_transition("x1^3", {{-1, 1}})), SchemaError);
  CHECK_THROWS_AS(load_atlas(one_transition("x1^3", {{1, -1}, {0.5, 2}})), SchemaError);
  CHECK_THROWS_AS(load_atlas(one_transition("cosh(x1)", {{-1, 1}, {0.5, 2}})), UnknownFunction);
  try {
    load_atlas(one_transition("x1 * (", {{-1, 1}, {0.5, 2}}));
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(std::string(e.what()).find("transitions[0].transverse_exprs[0]") != std::string::npos);
    CHECK(e.column() == 7);
  }
  CHECK_THROWS_AS(load_atlas_text("{not json"), SchemaError);
  CHECK_THROWS_AS(load_atlas_text(R"({"leaf_dim": 0, "transverse_dim": 1, "charts": [], "bogus": 1})"), SchemaError);
  CHECK_THROWS_AS(load_atlas_file(data("does-not-exist.json")), SchemaError);
  // projectability and slashed lagrangians
  auto base = nlohmann::json::parse(R"({"leaf_dim": 1, "transverse_dim": 1,
      "charts": [{"name": "A", "domain": [[-1, 1], [-1, 1]]}], "lagrangians": []})");
  auto lag = base;
  lag["lagrangians"].push_back({{"name", "L"}, {"chart", "A"}, {"order", 1}, {"expr", "u1*y1_1^2"}});
  CHECK_THROWS_AS(load_atlas(lag), InvariantViolation);
  lag = base;
  lag["lagrangians"].push_back({{"name", "L"}, {"chart", "A"}, {"order", 1}, {"expr", "y2_1^2"}});
  CHECK_THROWS_AS(load_atlas(lag), UnknownVariable);
  lag = base;
  lag["lagrangians"].push_back({{"name", "L"}, {"chart", "A"}, {"order", 1}, {"expr", "y1_1^2"}, {"slashed", true}});
  CHECK_THROWS_AS(load_atlas(lag), SchemaError);
}

TEST_CASE("identity transitions validate with zero deviation") {
  auto a = load_atlas_file(data("identity.json"));
  auto r = validate_foliated(a, 25, 7);
  CHECK(r.all_pass());
  CHECK(r.worst("inverse_roundtrip") == 0.0);
  CHECK(r.worst("invertibility") == 1.0);
  CHECK(r.worst("foliated_mixed_block") == 0.0);
}

TEST_CASE("cubic atlas: round trip and cocycle") {
  auto a = load_atlas_file(data("cubic.json"));
  auto r = validate_foliated(a, 100, 3);
  for (const auto& c : r.checks()) CHECK_MESSAGE(c.pass, (c.name + " " + c.context));
  CHECK(r.worst("inverse_roundtrip") <= 1e-9);
  // oracle: direct numeric evaluation of the cube root of the cube
  const auto& ab = a.transition("AB");
  const auto& ba = a.transition("BA");
  for (double x : {0.5, 0.77, 1.3, 2.0}) {
    auto y = ba.map_transverse(ab.map_transverse(std::vector<double>{x}));
    CHECK(std::fabs(y[0] - x) <= 1e-12);
  }
}

TEST_CASE("singular transition is reported, not thrown") {
  auto a = load_atlas_file(data("singular.json"));
  auto r = validate_foliated(a, 20, 5);
  const Check* f = r.find_failure("invertibility");
  REQUIRE(f != nullptr);
  CHECK(f->metric < 1e-9);  // the centre sample sits on x1 = 0 where det = 2 x1
  CHECK(f->context.find("AB") != std::string::npos);
}

TEST_CASE("sampling is deterministic and inside the overlap") {
  auto a = load_atlas_file(data("plane.json"));
  const auto& t = a.transition("AB");
  auto p1 = sample_overlap(t, 100, 42);
  auto p2 = sample_overlap(t, 100, 42);
  auto p3 = sample_overlap(t, 100, 43);
  CHECK(p1 == p2);
  CHECK(p1 != p3);
  for (const auto& p : p1) CHECK(t.overlap.contains(p, 0.0));
  CHECK(sample_overlap(t, 1, 99).size() == 1);
  Box unit{{{0.0, 1.0}}};
  for (const auto& p : sample_box(unit, 100, 5, "unit")) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] <= 1.0);
  }
}

TEST_CASE("validation reports are reproducible") {
  auto a = load_atlas_file(data("space.json"));
  auto r1 = validate_foliated(a, 30, 11).to_json().dump();
  auto r2 = validate_foliated(a, 30, 11).to_json().dump();
  CHECK(r1 == r2);
  auto r = validate_foliated(a, 30, 11);
  CHECK(r.all_pass());
  CHECK(r.worst("cocycle") <= 1e-12);
}

TEST_CASE("metric families") {
  auto a = load_atlas_file(data("cubic.json"));
  CHECK(a.metric_family("perturbed").size() == 3);
  CHECK(a.metric("flat", "B").components[0][0].source() == "x1^(-4/3)/9");
  CHECK_THROWS_AS(a.metric("flat", "Z"), SchemaError);
}

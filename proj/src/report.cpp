#include "folijet/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace folijet {

const Check& Report::add(std::string name, std::string context, double metric, Check::Kind kind,
                         double tolerance) {
  Check c{std::move(name), std::move(context), metric, kind, tolerance, false};
  if (std::isfinite(metric)) {
    switch (kind) {
      case Check::Kind::max_deviation: c.pass = metric <= tolerance; break;
      case Check::Kind::min_value: c.pass = metric > tolerance; break;
      case Check::Kind::exact: c.pass = metric == tolerance; break;
    }
  }
  checks_.push_back(std::move(c));
  return checks_.back();
}

void Report::merge(const Report& other) {
  checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
  for (const auto& n : other.notes_)
    if (std::find(notes_.begin(), notes_.end(), n) == notes_.end()) notes_.push_back(n);
}

int Report::passed() const {
  return static_cast<int>(std::count_if(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; }));
}

const Check* Report::find_failure(const std::string& name) const {
  for (const auto& c : checks_)
    if (c.name == name && !c.pass) return &c;
  return nullptr;
}

double Report::worst(const std::string& name) const {
  double w = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : checks_) {
    if (c.name != name) continue;
    if (std::isnan(w)) {
      w = c.metric;
    } else if (c.kind == Check::Kind::min_value) {
      w = std::min(w, c.metric);
    } else {
      w = std::max(w, c.metric);
    }
  }
  return w;
}

nlohmann::json Report::to_json() const {
  using nlohmann::json;
  json checks = json::array();
  for (const auto& c : checks_) {
    const char* kind = c.kind == Check::Kind::max_deviation ? "max_deviation"
                       : c.kind == Check::Kind::min_value   ? "min_value"
                                                            : "exact";
    json metric = std::isfinite(c.metric) ? json(c.metric) : json(nullptr);
    checks.push_back({{"name", c.name},
                      {"context", c.context},
                      {"metric", metric},
                      {"kind", kind},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  }
  json out = {{"tool_version", kToolVersion},
              {"seed", seed_},
              {"checks", checks},
              {"summary", {{"total", total()}, {"passed", passed()}, {"failed", failed()}}}};
  if (!notes_.empty()) out["notes"] = notes_;
  return out;
}

}  // namespace folijet

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace folijet {

inline constexpr const char* kToolVersion = "folijet 0.3.0";

/// One named check. max_deviation passes when metric <= tolerance,
/// min_value passes when metric > tolerance. Non-finite metrics fail.
struct Check {
  enum class Kind { max_deviation, min_value, exact };
  std::string name;
  std::string context;
  double metric = 0.0;
  Kind kind = Kind::max_deviation;
  double tolerance = 0.0;
  bool pass = false;
};

class Report {
 public:
  Report() = default;
  explicit Report(uint64_t seed) : seed_(seed) {}

  uint64_t seed() const { return seed_; }
  const std::vector<Check>& checks() const { return checks_; }
  const std::vector<std::string>& notes() const { return notes_; }

  /// Adds a check and computes its pass flag.
  const Check& add(std::string name, std::string context, double metric, Check::Kind kind, double tolerance);
  const Check& add_max(std::string name, std::string context, double deviation, double tolerance) {
    return add(std::move(name), std::move(context), deviation, Check::Kind::max_deviation, tolerance);
  }
  const Check& add_min(std::string name, std::string context, double value, double threshold) {
    return add(std::move(name), std::move(context), value, Check::Kind::min_value, threshold);
  }
  /// A boolean condition, recorded with metric 0 (ok) or 1 (violated).
  const Check& add_flag(std::string name, std::string context, bool ok) {
    return add(std::move(name), std::move(context), ok ? 0.0 : 1.0, Check::Kind::exact, 0.0);
  }
  void note(std::string text) { notes_.push_back(std::move(text)); }
  void merge(const Report& other);

  int total() const { return static_cast<int>(checks_.size()); }
  int passed() const;
  int failed() const { return total() - passed(); }
  bool all_pass() const { return failed() == 0; }
  /// First failing check with this name, or nullptr.
  const Check* find_failure(const std::string& name) const;
  /// Largest metric among checks with this name (max_deviation) or smallest (min_value).
  double worst(const std::string& name) const;

  nlohmann::json to_json() const;

 private:
  uint64_t seed_ = 0;
  std::vector<Check> checks_;
  std::vector<std::string> notes_;
};

using ValidationReport = Report;

}  // namespace folijet

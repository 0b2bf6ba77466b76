#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace folijet {

uint64_t fnv1a(std::string_view text);

/// Seed derived from a user seed and a name, so that different transitions
/// (or different checks) draw independent but reproducible streams.
uint64_t mix_seed(uint64_t seed, std::string_view tag);

/// Reproducible across standard libraries: only the raw mt19937_64 output is
/// used, never the implementation-defined distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed, std::string_view tag = {}) : gen_(mix_seed(seed, tag)) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller).
  double normal();

 private:
  std::mt19937_64 gen_;
};

/// Axis-aligned box of closed intervals.
struct Box {
  std::vector<std::pair<double, double>> intervals;

  int dim() const { return static_cast<int>(intervals.size()); }
  bool contains(const std::vector<double>& x, double slack = 1e-12) const;
  std::vector<double> centre() const;
  bool inside(const Box& outer) const;
};

/// n points in the box; the first is the centre, the rest uniform.
std::vector<std::vector<double>> sample_box(const Box& box, int n, uint64_t seed, std::string_view tag);

}  // namespace folijet

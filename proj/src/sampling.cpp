#include "folijet/sampling.hpp"

#include <cmath>
#include <numbers>

namespace folijet {

uint64_t fnv1a(std::string_view text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t mix_seed(uint64_t seed, std::string_view tag) {
  // splitmix64 finalizer over the xor of the two inputs
  uint64_t z = seed ^ fnv1a(tag);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool Box::contains(const std::vector<double>& x, double slack) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    const auto [lo, hi] = intervals[i];
    const double s = slack * std::max(1.0, std::max(std::fabs(lo), std::fabs(hi)));
    if (!(x[i] >= lo - s && x[i] <= hi + s)) return false;
  }
  return true;
}

std::vector<double> Box::centre() const {
  std::vector<double> c(dim());
  for (int i = 0; i < dim(); ++i) c[i] = 0.5 * (intervals[i].first + intervals[i].second);
  return c;
}

bool Box::inside(const Box& outer) const {
  if (outer.dim() != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (intervals[i].first < outer.intervals[i].first || intervals[i].second > outer.intervals[i].second)
      return false;
  return true;
}

std::vector<std::vector<double>> sample_box(const Box& box, int n, uint64_t seed, std::string_view tag) {
  std::vector<std::vector<double>> out;
  if (n <= 0) return out;
  out.reserve(n);
  out.push_back(box.centre());
  Rng rng(seed, tag);
  for (int k = 1; k < n; ++k) {
    std::vector<double> x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = rng.uniform(box.intervals[i].first, box.intervals[i].second);
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace folijet

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace aomd {

// Seeded generator shared by initialization, shuffling and data synthesis.
//
// The distributions are computed from raw mt19937_64 output rather than the
// <random> distribution adaptors, whose algorithms differ between standard
// library implementations. Identical seeds therefore give identical streams on
// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stateless 64-bit mixing of a value with a seed (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);
// FNV-1a hash of a string, mixed with a seed.
std::uint64_t hash_string(const std::string& s, std::uint64_t seed);

}  // namespace aomd

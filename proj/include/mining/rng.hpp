#pragma once

#include <cstdint>
#include <vector>

namespace mining {

// Deterministic seeded generator (splitmix64 core). Identical streams on
// every platform; std::random distributions are deliberately avoided
// because their output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n), unbiased. n must be > 0.
  std::uint64_t below(std::uint64_t n);
  // Standard normal via Box-Muller.
  double normal();
  bool bernoulli(double p);

  // Independent child stream; deterministic function of (seed, stream).
  Rng fork(std::uint64_t stream) const;

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k);

 private:
  std::uint64_t state_;
  std::uint64_t seed_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mining

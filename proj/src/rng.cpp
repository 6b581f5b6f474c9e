#include "mining/rng.hpp"

#include <cmath>
#include <unordered_map>

namespace mining {

namespace {
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

Rng::Rng(std::uint64_t seed) : state_(mix64(seed + 0x9e3779b97f4a7c15ULL)), seed_(seed) {}

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  std::uint64_t threshold = (0ULL - n) % n;
  for (;;) {
    std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 6.283185307179586476925286766559 * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

bool Rng::bernoulli(double p) { return uniform() < p; }

Rng Rng::fork(std::uint64_t stream) const {
  return Rng(mix64(seed_ ^ (stream * 0xd6e8feb86659fd93ULL + 0xa5a5a5a5a5a5a5a5ULL)));
}

std::vector<std::uint32_t> Rng::sample_without_replacement(std::uint32_t n, std::uint32_t k) {
  // Partial Fisher-Yates over a sparse index map.
  std::vector<std::uint32_t> out;
  out.reserve(k);
  std::unordered_map<std::uint32_t, std::uint32_t> moved;
  for (std::uint32_t i = 0; i < k && i < n; ++i) {
    std::uint32_t j = i + static_cast<std::uint32_t>(below(n - i));
    std::uint32_t vj = moved.count(j) ? moved[j] : j;
    std::uint32_t vi = moved.count(i) ? moved[i] : i;
    out.push_back(vj);
    moved[j] = vi;
  }
  return out;
}

}  // namespace mining

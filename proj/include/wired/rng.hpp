#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "wired/event_queue.hpp"

namespace wired {

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

// One independent random stream per stochastic source (traffic generator,
// jammer, MAC backoff, ...). Streams are split from the master seed by a
// stable label hash, so adding a node never perturbs another node's draws.
class RngStream {
 public:
  RngStream() : gen_(0) {}
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  static RngStream derive(std::uint64_t master_seed, std::string_view label) {
    return RngStream(
        detail::splitmix64(master_seed ^ detail::fnv1a64(label)));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; safe as a log() argument.
  double uniform01_pos() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform integer in [0, n] inclusive (backoff slot draw).
  std::uint32_t uniform_slots(std::uint32_t n) {
    return static_cast<std::uint32_t>(gen_() % (static_cast<std::uint64_t>(n) + 1));
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Exponential inter-arrival rounded to whole microseconds.
  Micros exponential_us(double mean_us) {
    return static_cast<Micros>(std::llround(-mean_us * std::log(uniform01_pos())));
  }

  // Geometric sojourn length in steps, support {1, 2, ...}: number of steps
  // spent in a state whose per-step exit probability is p. p == 0 never
  // exits; a far-future sentinel stands in for infinity.
  std::int64_t geometric_steps(double p) {
    if (p >= 1.0) return 1;
    if (p <= 0.0) return std::int64_t{1} << 62;
    return static_cast<std::int64_t>(
               std::floor(std::log(uniform01_pos()) / std::log1p(-p))) +
           1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace wired

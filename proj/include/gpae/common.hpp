#pragma once

#include <charconv>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace gpae {

// Bad configuration values or inconsistent parameter combinations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem-level failures (missing file, short read, unwritable path).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-readable bytes that do not conform to an expected format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// splitmix64 finalizer; used to derive independent RNG stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic per-task stream: (master seed, tag, index) -> mt19937_64.
// Streams derived with distinct tags never share state, so tasks may run
// on any number of threads without perturbing each other's draws.
inline std::mt19937_64 derive_stream(std::uint64_t seed, std::uint64_t tag,
                                     std::uint64_t index = 0) {
  return std::mt19937_64(mix64(mix64(mix64(seed) ^ tag) ^ index));
}

inline constexpr std::uint64_t kStreamSchedule = 0x5343484544ULL;
inline constexpr std::uint64_t kStreamPopulation = 0x504f50ULL;

// Shortest decimal text that parses back to exactly the same double.
inline std::string format_shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace gpae

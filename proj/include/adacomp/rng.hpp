#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace adacomp {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for sub-stream `purpose` of trial `index` under master `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                    std::uint64_t purpose = 0) {
  return mix64(mix64(seed ^ mix64(index)) + purpose * 0xd1b54a32d192ed03ULL);
}

/// Stream tags so that geometry, fading and overhead draws never share
/// a generator (common random numbers across sweeps).
enum class StreamTag : std::uint64_t {
  kGeometry = 1,
  kFading = 2,
  kOverhead = 3,
  kBaseline = 4,
  kAuxiliary = 5,
};

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t seed, std::uint64_t index, StreamTag tag)
      : engine_(derive_seed(seed, index, static_cast<std::uint64_t>(tag))) {}

  /// Uniform on the open interval (0, 1).
  double uniform() {
    // 53 random bits, offset by half an ulp so that 0 is never produced.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential() { return -std::log(uniform()); }

  double normal() { return std::normal_distribution<double>{}(engine_); }

  double gamma(double shape) {
    return std::gamma_distribution<double>{shape, 1.0}(engine_);
  }

  std::uint64_t poisson(double mean) {
    return std::poisson_distribution<std::uint64_t>{mean}(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace adacomp

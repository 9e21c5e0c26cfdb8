#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rcvvar {

// Counter-style seed derivation (splitmix64 finalizer over a hash combine).
// Children derived from the same (seed, stream) pair are always identical,
// regardless of how much the parent generator has been consumed.  This is
// what makes replication-level parallelism reproducible: worker k gets
// mix_seed(master, k) no matter which thread runs it.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (stream + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  x += 0x9e3779b97f4a7c15ULL;
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Deterministic random source.  mt19937_64 has a standardized output
// sequence, and the uniform/normal transforms below are fixed-form, so
// streams are bit-identical across platforms and build configurations
// (std::normal_distribution is deliberately avoided: its algorithm is
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Child generator for an independent named stream.  Derivation uses the
  // construction seed only, so calling child() is pure.
  Rng child(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via the Marsaglia polar method; pairs are cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Uniform integer in [0, bound).  Modulo bias is below 2^-53 for the
  // bounds used here (shuffles over at most a few thousand elements).
  std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stream ids used by the library so that independent draws inside one
// operation never collide.  Callers composing several randomized operations
// should hand each one its own child.
namespace streams {
inline constexpr std::uint64_t design = 1;
inline constexpr std::uint64_t noise = 2;
inline constexpr std::uint64_t split = 3;
inline constexpr std::uint64_t select_first = 4;
inline constexpr std::uint64_t select_second = 5;
inline constexpr std::uint64_t folds = 6;
inline constexpr std::uint64_t method_base = 32;
}  // namespace streams

}  // namespace rcvvar

#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

namespace fmdp {

/// Counter-based splittable generator: every draw is a pure hash of
/// (seed, key components...), so per-factor draws are order-independent and
/// parallel sweeps reproduce exactly.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform in [0, 1), fully determined by (seed, key).
    double uniform(std::initializer_list<std::uint64_t> key) const;

    /// Bernoulli(p) draw.
    bool bernoulli(double p, std::initializer_list<std::uint64_t> key) const;

    /// Categorical draw from a probability row (last bucket absorbs residual
    /// rounding mass).
    int categorical(std::span<const double> row, std::initializer_list<std::uint64_t> key) const;

  private:
    std::uint64_t seed_;
};

/// SplitMix64 finalizer; the mixing primitive behind CounterRng.
std::uint64_t mix64(std::uint64_t x);

}  // namespace fmdp

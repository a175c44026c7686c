#pragma once

#include <array>
#include <cstdint>

namespace lresnet {

// Stream tags separate independent uses of one seed.
enum StreamTag : std::uint32_t {
    kChainNoise = 0,
    kInitialCloud = 1,
    kTargetSamples = 2,
    kWeightInit = 3,
    kShuffle = 4,
    kAssumption = 5,
    kUser = 16,
};

/// Philox4x32-10 counter-based generator. Every draw is a pure function of
/// (seed, tag, a, b, c): no hidden state, so draws can be consumed in any
/// order or from any thread.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed = 0, std::uint32_t tag = 0) : seed_(seed), tag_(tag) {}

    std::array<std::uint32_t, 4> block(std::uint32_t a, std::uint32_t b, std::uint32_t c) const;

    /// Uniform in (0,1) with 53 random bits; slot in {0,1}.
    double uniform(std::uint32_t a, std::uint32_t b, std::uint32_t c, int slot = 0) const;

    /// Standard normal. Coordinates 2q and 2q+1 share one Box-Muller pair.
    double normal(std::uint32_t a, std::uint32_t b, std::uint32_t j) const;

    std::uint64_t seed() const { return seed_; }
    std::uint32_t tag() const { return tag_; }

private:
    std::uint64_t seed_;
    std::uint32_t tag_;
};

/// Mixes a base seed with an index (repetition, worker); splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace lresnet

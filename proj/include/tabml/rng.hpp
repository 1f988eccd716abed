#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace tabml {

// Deterministic random number machinery, version 1.
//
// Every stochastic consumer (splits, folds, bootstrap draws, weight init,
// batch shuffles, the cohort generator) draws from an Xorshift64Star stream
// whose seed is derived from one master seed through deriveSeed. The
// constants below are fixed; changing any of them is a format break and
// must bump kRngVersion.
inline constexpr int kRngVersion = 1;

// SplitMix64 (Steele, Lea, Flood 2014). Used for seed derivation only.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// Hash chain for per-consumer seeds: deriveSeed(master, stream) gives an
// independent stream id, and derivations nest (e.g. per-tree seeds inside a
// forest are deriveSeed(forestSeed, treeIndex)).
inline std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t stream) {
    SplitMix64 mix(master);
    std::uint64_t h = mix.next();
    SplitMix64 mix2(h ^ stream);
    return mix2.next();
}

// Xorshift64Star (Vigna 2014): x ^= x>>12; x ^= x<<25; x ^= x>>27;
// return x * 0x2545F4914F6CDD1D. State must stay nonzero, so seeds are
// run through SplitMix64 first and a fixed fallback replaces a zero state.
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed) {
        SplitMix64 mix(seed);
        state_ = mix.next();
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
    }

    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1Dull;
    }

    // Uniform integer in [0, n) by 128-bit multiply-shift. n must be > 0.
    std::uint64_t nextBelow(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Uniform double in [0, 1) with 53 significant bits.
    double nextDouble() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double nextUniform(double lo, double hi) { return lo + (hi - lo) * nextDouble(); }

    // True with probability p.
    bool nextBernoulli(double p) { return nextDouble() < p; }

private:
    std::uint64_t state_;
};

// Fisher-Yates shuffle, iterating from the back.
template <typename T>
void shuffle(std::vector<T>& items, Xorshift64Star& rng) {
    if (items.size() < 2) return;
    for (std::size_t i = items.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.nextBelow(i + 1));
        std::swap(items[i], items[j]);
    }
}

// Identity permutation of length n shuffled in place.
inline std::vector<std::size_t> randomPermutation(std::size_t n, Xorshift64Star& rng) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    shuffle(perm, rng);
    return perm;
}

// Stream ids used by the pipeline hash chain. Model streams start at
// kStreamModelBase and advance by roster position.
namespace streams {
inline constexpr std::uint64_t kSplit = 1;
inline constexpr std::uint64_t kFolds = 2;
inline constexpr std::uint64_t kGenerate = 3;
inline constexpr std::uint64_t kModelBase = 0x100;
}  // namespace streams

}  // namespace tabml

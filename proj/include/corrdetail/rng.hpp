#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace corrdetail {

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// splitmix64 finalizer; full-period 64-bit mixer with defined overflow.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic generator used everywhere randomness is needed. std::shuffle /
// std::uniform_int_distribution are implementation-defined, so selection and
// shuffling go through this instead.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n); modulo bias is irrelevant at lexicon/corpus sizes
    std::size_t bounded(std::size_t n) { return static_cast<std::size_t>(next() % n); }

    // uniform double in [0, 1)
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform double in [lo, hi)
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

private:
    std::uint64_t state_;
};

// Named sub-stream derivation: one master --seed fans out to independent
// streams (corpus, mock-vlm, training, ...).
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name) {
    return mix64(master ^ fnv1a64(name));
}

// In-place Fisher-Yates with the portable generator.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng.bounded(i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace corrdetail

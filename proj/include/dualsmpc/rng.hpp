#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualsmpc {

/// xoshiro256** 1.0 (Blackman & Vigna), state expanded from a 64-bit seed
/// with splitmix64. Fixed here by name and version so traces are
/// bit-reproducible across implementations.
class Xoshiro256 {
public:
    static constexpr const char* kName = "xoshiro256ss-1.0";

    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : s_) word = splitmix64(x);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0,1) using the top 53 bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> s_;
};

/// Inverse-CDF draw over a probability row in index order: the first index
/// whose cumulative probability exceeds u. Entries with zero probability
/// can never be drawn.
inline int sample_categorical(const std::vector<double>& probs, double u) {
    double cum = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        cum += probs[i];
        last_positive = static_cast<int>(i);
        if (u < cum) return last_positive;
    }
    if (last_positive < 0)
        throw std::invalid_argument("sample_categorical: no positive probability");
    return last_positive;  // u landed in rounding slack at the top
}

}  // namespace dualsmpc

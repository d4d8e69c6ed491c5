#pragma once

// Counter-based deterministic random numbers. Every draw is a pure function
// of (key, counter), so seeded runs replay bitwise identically regardless of
// evaluation order or thread count.

#include <cstdint>

namespace cutbal {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (0x9e3779b97f4a7c15ULL + b));
}

// Maps 64 random bits onto [0,1) with 53-bit resolution.
constexpr double bits_to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}
    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix_keys(seed, stream)) {}

    std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }
    double next_unit() { return bits_to_unit(next_u64()); }
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }
    // Uniform integer in [0, n), n > 0. Modulo bias is irrelevant at n << 2^64.
    int next_below(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace cutbal

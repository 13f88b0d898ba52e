#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace leadflux {

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
std::uint64_t splitmix64(std::uint64_t x);

// A reproducible random stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the C++ standard; the seed is derived from a root seed and a key path
// by chained SplitMix64 mixing, so every (seed, key...) names an independent stream.
// All variates below are computed by documented algorithms rather than std
// distributions, whose outputs differ between standard libraries.
class Stream {
public:
    Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

    std::uint64_t next() { return engine_(); }

    // 53-bit uniform in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0, n), unbiased (modulo with rejection of the low partial block).
    std::uint64_t below(std::uint64_t n);
    bool bernoulli(double p) { return uniform01() < p; }
    // Standard normal via Box-Muller; each call consumes two uniforms.
    double normal();
    double lognormal(double mu, double sigma);
    // Inversion by sequential search for mean < 30, Hormann's PTRS otherwise.
    std::int64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
};

} // namespace leadflux

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>

namespace agetrace {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// Derive a substream seed from a master seed and a stream name. All
/// randomness in the toolkit flows from one per-command seed through named
/// substreams so per-module parallelism cannot perturb results.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_name) {
    return detail::splitmix64(master ^ detail::fnv1a64(stream_name));
}

/// Deterministic random stream. Wraps std::mt19937_64 (whose output sequence
/// is pinned by the standard) with explicit variate transforms, avoiding the
/// implementation-defined std::*_distribution classes.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}
    RngStream(std::uint64_t master, std::string_view stream_name)
        : eng_(derive_seed(master, stream_name)) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [lo, hi] inclusive, unbiased via rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(eng_()); // full 64-bit range
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    /// Box-Muller; draws two uniforms per variate.
    double normal(double mean = 0.0, double sigma = 1.0) {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(2.0 * M_PI * u2);
    }

    double exponential(double rate) {
        if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be > 0");
        double u = uniform();
        return -std::log1p(-u) / rate;
    }

    double log_uniform(double lo, double hi) {
        if (lo <= 0.0 || hi < lo) throw std::invalid_argument("log_uniform: need 0 < lo <= hi");
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

private:
    std::mt19937_64 eng_;
};

} // namespace agetrace

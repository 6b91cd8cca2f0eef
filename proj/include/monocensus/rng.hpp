#pragma once

#include <cstdint>
#include <random>

#include "monocensus/types.hpp"

namespace monocensus {

/// Seedable generator with named substreams.
///
/// A substream is derived from the parent's key and a label only, never from
/// the parent's consumed state, so work split across threads draws the same
/// numbers as a serial run.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(mix(seed)), engine_(key_) {}

    Rng substream(std::uint64_t label) const {
        Rng r(0);
        r.key_ = mix(key_ ^ mix(label + 0x632be59bd9b4e019ULL));
        r.engine_.seed(r.key_);
        return r;
    }

    std::uint64_t key() const { return key_; }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    std::uint64_t uniform_int(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

    /// Standard complex Gaussian: E|z|^2 = 1.
    Complex complex_normal() {
        const double s = 0.7071067811865476;
        double re = normal();
        double im = normal();
        return {s * re, s * im};
    }

    PointVec complex_normal_vec(Eigen::Index n) {
        PointVec v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = complex_normal();
        return v;
    }

    /// Uniform point on the unit circle.
    Complex unit_complex() { return std::polar(1.0, 2.0 * 3.141592653589793 * uniform()); }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::mt19937_64 engine_;
};

}  // namespace monocensus

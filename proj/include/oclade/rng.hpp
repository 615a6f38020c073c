#pragma once

#include <cmath>
#include <cstdint>

namespace oclade {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// PCG XSL-RR 128/64 generator. One instance per worker; streams are
/// selected by the increment, so replicate r of a run is reproducible in
/// isolation from (master seed, r) without generating the replicates
/// before it.
class Pcg64 {
  public:
    Pcg64() : Pcg64(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL) {}

    Pcg64(std::uint64_t seed, std::uint64_t stream) {
        inc_ = ((u128(splitmix64(stream ^ 0x5851f42d4c957f2dULL)) << 64 |
                 splitmix64(stream + 0x9e3779b97f4a7c15ULL)) << 1) | 1;
        state_ = 0;
        next_u64();
        state_ += u128(splitmix64(seed)) << 64 | splitmix64(seed ^ 0xc2b2ae3d27d4eb4fULL);
        next_u64();
    }

    /// Stream for one replicate of a run: `lane` separates independent
    /// consumers inside the replicate (genealogy, mutations, clocks).
    static Pcg64 for_replicate(std::uint64_t master_seed, std::uint64_t replicate,
                               std::uint64_t lane = 0) {
        return Pcg64(master_seed, splitmix64(replicate) ^ (lane * 0x9e3779b97f4a7c15ULL));
    }

    std::uint64_t next_u64() {
        u128 old = state_;
        state_ = old * kMultiplier + inc_;
        std::uint64_t xored = std::uint64_t(old >> 64) ^ std::uint64_t(old);
        unsigned rot = unsigned(old >> 122);
        return (xored >> rot) | (xored << ((-rot) & 63u));
    }

    /// Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform01() {
        return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Strictly positive exponential variate.
    double exponential(double rate) {
        return -std::log(uniform01()) / rate;
    }

    /// Uniform integer in [0, n), n >= 1. Lemire's multiply-shift with
    /// rejection, so the draw is exactly uniform.
    std::uint64_t bounded(std::uint64_t n) {
        std::uint64_t x = next_u64();
        u128 m = u128(x) * n;
        std::uint64_t lo = std::uint64_t(m);
        if (lo < n) {
            std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                x = next_u64();
                m = u128(x) * n;
                lo = std::uint64_t(m);
            }
        }
        return std::uint64_t(m >> 64);
    }

    /// Poisson count by inversion; means above 30 are split into
    /// independent chunks so exp(-mean) never underflows.
    std::uint64_t poisson(double mean) {
        std::uint64_t total = 0;
        while (mean > 30.0) {
            total += poisson_small(30.0);
            mean -= 30.0;
        }
        if (mean > 0.0) total += poisson_small(mean);
        return total;
    }

  private:
    using u128 = unsigned __int128;
    static constexpr u128 kMultiplier =
        (u128(2549297995355413924ULL) << 64) | 4865540595714422341ULL;

    std::uint64_t poisson_small(double mean) {
        double p = std::exp(-mean);
        double cdf = p;
        double u = uniform01();
        std::uint64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= mean / double(k);
            cdf += p;
            if (p == 0.0) break;
        }
        return k;
    }

    u128 state_;
    u128 inc_;
};

} // namespace oclade

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

#include "fpp/stats.hpp"

namespace fpp {

// Deterministic xoshiro256++ stream. Streams are derived from a master
// seed plus a (tag, index) pair so that replication results do not depend
// on how work is distributed across threads.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) {
        // seed expansion via splitmix64
        std::uint64_t x = seed;
        for (auto& si : s_) si = splitmix64(x);
    }

    static RandomStream derive(std::uint64_t master, std::string_view tag, std::uint64_t index) {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        std::uint64_t x = master;
        std::uint64_t m1 = splitmix64(x);
        x ^= h;
        std::uint64_t m2 = splitmix64(x);
        x ^= index * 0x9e3779b97f4a7c15ULL;
        std::uint64_t m3 = splitmix64(x);
        return RandomStream(m1 ^ m2 ^ m3);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0,1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0,1], safe as a log argument
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    double normal() { return norm_inv(uniform_pos()); }

    // Poisson sampling by inversion; exact for the small means used here.
    int poisson(double mean) {
        if (mean < 0.0) throw std::domain_error("poisson: negative mean");
        if (mean > 60.0) throw std::domain_error("poisson: mean too large for inversion");
        double u = uniform();
        double p = std::exp(-mean);
        double cum = p;
        int k = 0;
        while (u >= cum) {
            ++k;
            p *= mean / k;
            cum += p;
            if (k > 4000) break;  // guards against u==1 rounding
        }
        return k;
    }

    std::uint64_t uniform_below(std::uint64_t bound) {
        // bounded draw with negligible modulo bias for the bounds used here
        return next_u64() % bound;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& state) {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t s_[4];
};

}  // namespace fpp

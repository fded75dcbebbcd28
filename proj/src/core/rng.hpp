#pragma once

#include <cmath>
#include <cstdint>

namespace qrng {

// SplitMix64 finalizer. Bijective on 64-bit words.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Domain-separated subseed derivation; domains must be distinct per use site.
inline uint64_t subseed(uint64_t master, uint64_t domain) {
    return mix64(master ^ mix64(domain));
}

// xoshiro256** seeded through SplitMix64.
class Xoshiro256 {
  public:
    explicit Xoshiro256(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) {
            sm += 0x9e3779b97f4a7c15ull;
            uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            w = z ^ (z >> 31);
        }
    }

    uint64_t next() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

// Box-Muller normal sampler. Fixed algorithm so streams are identical across
// platforms; standard-library distributions are implementation-defined.
class NormalSampler {
  public:
    NormalSampler(uint64_t seed, double mean, double sigma)
        : rng_(seed), mean_(mean), sigma_(sigma) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return mean_ + sigma_ * spare_;
        }
        double u1 = static_cast<double>((rng_.next() >> 11) + 1) * 0x1.0p-53; // (0,1]
        double u2 = rng_.next_double();                                      // [0,1)
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return mean_ + sigma_ * r * std::cos(a);
    }

  private:
    Xoshiro256 rng_;
    double mean_, sigma_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace qrng

#include "core/sanity.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace qrng {

namespace {

// 1% two-sided normal quantile, and its 16-way Bonferroni sharpening.
constexpr double kZ1Percent = 2.5758293035489004;
constexpr double kZLag = 3.4205222443989596;

std::vector<uint64_t> to_words(const BitStream& bits) {
    std::vector<uint64_t> w((bits.bit_count + 63) / 64 + 1, 0);
    for (size_t i = 0; i < bits.bytes.size(); ++i)
        w[i >> 3] |= uint64_t(bits.bytes[i]) << ((i & 7) * 8);
    if (bits.bit_count & 63)
        w[bits.bit_count >> 6] &= (uint64_t(1) << (bits.bit_count & 63)) - 1;
    return w;
}

// popcount of words[0..nbits), the tail word already masked.
uint64_t count_ones(const std::vector<uint64_t>& w, uint64_t nbits) {
    uint64_t ones = 0;
    for (uint64_t i = 0; i < (nbits + 63) / 64; ++i) ones += uint64_t(std::popcount(w[i]));
    return ones;
}

// Mismatches between the stream and itself shifted left by k, over n-k pairs.
uint64_t shifted_mismatches(const std::vector<uint64_t>& w, uint64_t n, unsigned k) {
    const uint64_t pairs = n - k;
    const uint64_t base = k >> 6;
    const unsigned off = k & 63;
    uint64_t mism = 0;
    for (uint64_t i = 0; i < (pairs + 63) / 64; ++i) {
        uint64_t shifted = w[base + i] >> off;
        if (off) shifted |= w[base + i + 1] << (64 - off);
        uint64_t x = w[i] ^ shifted;
        if ((i + 1) * 64 > pairs) x &= (pairs & 63) ? (uint64_t(1) << (pairs & 63)) - 1 : ~uint64_t(0);
        mism += uint64_t(std::popcount(x));
    }
    return mism;
}

} // namespace

std::vector<SanityResult> sanity_tests(const BitStream& bits) {
    const uint64_t n = bits.bit_count;
    require(n >= 100000, errc::insufficient_data, "sanity tests need at least 1e5 bits");
    const auto w = to_words(bits);
    std::vector<SanityResult> out;

    const uint64_t ones = count_ones(w, n);
    {
        SanityResult r;
        r.name = "monobit";
        r.threshold = kZ1Percent;
        r.statistic = std::abs(2.0 * double(ones) - double(n)) / std::sqrt(double(n));
        r.pass = r.statistic <= r.threshold;
        out.push_back(r);
    }
    {
        SanityResult r;
        r.name = "runs";
        r.threshold = kZ1Percent;
        const double pi = double(ones) / double(n);
        if (pi == 0.0 || pi == 1.0) {
            r.statistic = std::numeric_limits<double>::infinity();
            r.pass = false;
        } else {
            const uint64_t runs = 1 + shifted_mismatches(w, n, 1);
            const double mu = 2.0 * double(n) * pi * (1.0 - pi);
            const double sigma = 2.0 * std::sqrt(double(n)) * pi * (1.0 - pi);
            r.statistic = std::abs(double(runs) - mu) / sigma;
            r.pass = r.statistic <= r.threshold;
        }
        out.push_back(r);
    }
    {
        SanityResult r;
        r.threshold = kZLag;
        unsigned worst = 1;
        for (unsigned k = 1; k <= 16; ++k) {
            const uint64_t pairs = n - k;
            const uint64_t mism = shifted_mismatches(w, n, k);
            // sum of +-1 products = pairs - 2*mismatches
            const double z = std::abs(double(pairs) - 2.0 * double(mism)) / std::sqrt(double(pairs));
            if (z > r.statistic) {
                r.statistic = z;
                worst = k;
            }
        }
        r.name = "autocorr_lag" + std::to_string(worst);
        r.pass = r.statistic <= r.threshold;
        out.push_back(r);
    }
    return out;
}

bool sanity_all_pass(const std::vector<SanityResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

} // namespace qrng

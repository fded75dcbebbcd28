#include <cstdint>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/sanity.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace qrng;

namespace {

BitStream prng_bits(uint64_t seed, uint64_t nbits) {
    Xoshiro256 rng(seed);
    BitStream s;
    uint64_t w = 0;
    for (uint64_t i = 0; i < nbits; ++i) {
        if (i % 64 == 0) w = rng.next();
        s.push_bit(int((w >> (i % 64)) & 1));
    }
    return s;
}

} // namespace

TEST_SUITE("sanity") {

TEST_CASE("battery shape and thresholds") {
    BitStream bits = prng_bits(5, 120000);
    std::vector<SanityResult> res = sanity_tests(bits);
    REQUIRE(res.size() == 3);
    CHECK(res[0].name == "monobit");
    CHECK(res[1].name == "runs");
    CHECK(res[2].name.rfind("autocorr_lag", 0) == 0);
    CHECK(res[0].threshold == 2.5758293035489004);
    CHECK(res[1].threshold == 2.5758293035489004);
    CHECK(res[2].threshold == 3.4205222443989596);

    CHECK_FALSE(sanity_all_pass({}));
}

TEST_CASE("degenerate streams fail loudly") {
    BitStream zeros;
    for (int i = 0; i < 120000; ++i) zeros.push_bit(0);
    std::vector<SanityResult> res = sanity_tests(zeros);
    CHECK_FALSE(res[0].pass);
    CHECK(res[0].statistic > 100.0);
    CHECK_FALSE(res[1].pass); // runs is undefined at pi = 0
    CHECK_FALSE(res[2].pass);
    CHECK_FALSE(sanity_all_pass(res));

    BitStream alt;
    for (int i = 0; i < 120000; ++i) alt.push_bit(i & 1);
    res = sanity_tests(alt);
    CHECK(res[0].pass); // perfectly balanced
    CHECK_FALSE(res[1].pass);
    CHECK(res[1].statistic > 100.0);
    CHECK(res[2].name == "autocorr_lag1");
    CHECK_FALSE(res[2].pass);
}

TEST_CASE("planted lag-3 correlation is pinned to its lag") {
    Xoshiro256 rng(2024);
    auto bit = [&] { return int(rng.next() & 1); };

    std::vector<int> s;
    s.reserve(120000);
    for (int i = 0; i < 3; ++i) s.push_back(bit());
    while (s.size() < 120000) {
        const int flip = bit() & bit(); // flips with probability 1/4
        s.push_back(s[s.size() - 3] ^ flip);
    }
    BitStream bits;
    for (int v : s) bits.push_bit(v);

    std::vector<SanityResult> res = sanity_tests(bits);
    CHECK(res[0].pass);
    CHECK(res[1].pass);
    CHECK(res[2].name == "autocorr_lag3");
    CHECK_FALSE(res[2].pass);
    CHECK(res[2].statistic > 100.0);
}

TEST_CASE("honest generator passes at the designed rate") {
    int passes = 0;
    for (uint64_t s = 0; s < 100; ++s) {
        BitStream bits = prng_bits(1000 + s, 120000);
        if (sanity_all_pass(sanity_tests(bits))) ++passes;
    }
    // 1% significance on three tests: a seed fails a few percent of the time.
    CHECK(passes >= 96);
    CHECK(passes <= 100);
}

TEST_CASE("short streams are rejected") {
    BitStream bits = prng_bits(9, 99999);
    CHECK(testutil::code_of([&] { sanity_tests(bits); }) == errc::insufficient_data);
}

} // TEST_SUITE

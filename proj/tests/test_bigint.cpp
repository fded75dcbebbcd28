#include <vector>

#include "doctest.h"

#include "core/bigint.hpp"
#include "helpers.hpp"

using namespace qrng;

namespace {

BigUint from_limbs(std::vector<uint64_t> limbs) { return BigUint(std::move(limbs)); }

} // namespace

TEST_SUITE("bigint") {

TEST_CASE("small value round trips") {
    BigUint z;
    CHECK(z.is_zero());
    CHECK(z.to_string() == "0");
    CHECK(z.bit_length() == 0);

    BigUint v(1820);
    CHECK(v.to_u64() == 1820);
    CHECK(v.to_string() == "1820");
    CHECK(v.bit_length() == 11);
    CHECK(!v.is_power_of_two());
    CHECK(BigUint(1024).is_power_of_two());
    CHECK(BigUint(1).is_power_of_two());
}

TEST_CASE("comparison is numeric") {
    BigUint a(5), b(7);
    CHECK(a < b);
    CHECK(a <= b);
    CHECK(b > a);
    CHECK(a == BigUint(5));
    CHECK(from_limbs({0, 1}) > BigUint(~0ull));
    CHECK(from_limbs({~0ull, ~0ull}) < from_limbs({0, 0, 1}));
}

TEST_CASE("add and sub carry across limbs") {
    BigUint a(~0ull);
    a.add_u64(1);
    CHECK(a == from_limbs({0, 1}));
    a.sub(BigUint(1));
    CHECK(a == BigUint(~0ull));

    BigUint b = from_limbs({~0ull, ~0ull});
    b.add(BigUint(1));
    CHECK(b == from_limbs({0, 0, 1}));
    b.sub(from_limbs({1, ~0ull})); // borrows across both limbs
    CHECK(b == BigUint(~0ull));
}

TEST_CASE("multi-limb multiplication") {
    // 1455006074498321127540622940141648166339601021592
    //   * 85968058283706962476764
    const BigUint a = from_limbs({0x76543210fedcba98ull, 0x76543210fedcba98ull, 0xfedcba98ull});
    const BigUint b = from_limbs({0x56789abcdef0fedcull, 0x1234ull});
    const BigUint want = from_limbs({0x6092b3d8c5532aa0ull, 0x7d2a19072fdcc599ull,
                                     0x742333472fdcce03ull, 0x121fa00ad77dull});
    CHECK(BigUint::mul(a, b) == want);
    CHECK(BigUint::mul(b, a) == want);
    CHECK(BigUint::mul(a, BigUint()) == BigUint());
    CHECK(want.to_string() ==
          "125084047015619345376196547571309977765348874699851920840696264962288288");
}

TEST_CASE("long division recovers factor and remainder") {
    const BigUint a = from_limbs({0x76543210fedcba98ull, 0x76543210fedcba98ull, 0xfedcba98ull});
    const BigUint b = from_limbs({0x56789abcdef0fedcull, 0x1234ull});
    BigUint u = BigUint::mul(a, b);
    u.add_u64(0x9999);
    auto [q, r] = BigUint::divmod(u, b);
    CHECK(q == a);
    CHECK(r == BigUint(0x9999));

    auto [q2, r2] = BigUint::divmod(BigUint(5), BigUint(7));
    CHECK(q2.is_zero());
    CHECK(r2 == BigUint(5));
}

TEST_CASE("single-limb division") {
    // 2^192 - 0x1234 over the prime 2^64 - 5
    BigUint u = from_limbs({0xffffffffffffedccull, ~0ull, ~0ull});
    uint64_t rem = u.divmod_u64(0xfffffffffffffffbull);
    CHECK(rem == 0xffffffffffffee44ull);
    CHECK(u == from_limbs({0x18ull, 0x5ull, 0x1ull}));

    BigUint v(1820 * 7);
    v.divexact_u64(7);
    CHECK(v == BigUint(1820));

    BigUint w(1820);
    w.mul_u64(~0ull);
    uint64_t r = w.divmod_u64(~0ull);
    CHECK(r == 0);
    CHECK(w == BigUint(1820));
}

TEST_CASE("binomial fixtures") {
    CHECK(binomial(16, 4) == BigUint(1820));
    CHECK(binomial(52, 5) == BigUint(2598960));
    CHECK(binomial(100, 10) == BigUint(17310309456440ull));
    CHECK(binomial(64, 32) == BigUint(1832624140942590534ull));
    CHECK(binomial(7, 0) == BigUint(1));
    CHECK(binomial(7, 7) == BigUint(1));
    CHECK(binomial(7, 1) == BigUint(7));
    // C(10000, 100) spans 13 limbs; pin width and approximate magnitude
    BigUint big = binomial(10000, 100);
    CHECK(big.bit_length() == 804);
    CHECK(big.log2() == doctest::Approx(803.2897302210367).epsilon(1e-12));
}

TEST_CASE("log2 approximation") {
    CHECK(BigUint(1).log2() == doctest::Approx(0.0));
    CHECK(BigUint(1024).log2() == doctest::Approx(10.0));
    CHECK(binomial(1ull << 22, 2048).log2() ==
          doctest::Approx(25475.092524322983).epsilon(1e-12));
    CHECK(BigUint().log2() < -1e308);
}

} // TEST_SUITE

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qrng {

// Unsigned big integer: little-endian 64-bit limbs, no leading zero limb.
// Supports exactly the operations the combinatorial layer needs; division is
// limited to single-limb divisors, which is all binomial arithmetic requires.
class BigUint {
  public:
    BigUint() = default;
    explicit BigUint(uint64_t v);
    explicit BigUint(std::vector<uint64_t> limbs);

    bool is_zero() const { return limbs_.empty(); }
    bool is_power_of_two() const;
    size_t limb_count() const { return limbs_.size(); }
    uint64_t bit_length() const;
    const std::vector<uint64_t>& limbs() const { return limbs_; }

    // Approximate base-2 logarithm; -inf for zero.
    double log2() const;

    uint64_t to_u64() const;   // value must fit in 64 bits
    std::string to_string() const;

    int compare(const BigUint& o) const;
    bool operator<(const BigUint& o) const { return compare(o) < 0; }
    bool operator<=(const BigUint& o) const { return compare(o) <= 0; }
    bool operator>(const BigUint& o) const { return compare(o) > 0; }
    bool operator==(const BigUint& o) const { return compare(o) == 0; }

    void add_u64(uint64_t v);
    void add(const BigUint& o);
    void sub(const BigUint& o);         // requires *this >= o
    void mul_u64(uint64_t f);
    uint64_t divmod_u64(uint64_t d);    // returns remainder
    void divexact_u64(uint64_t d);      // remainder must be zero

    static BigUint mul(const BigUint& a, const BigUint& b);
    // Quotient and remainder; d must be nonzero.
    static std::pair<BigUint, BigUint> divmod(const BigUint& u, const BigUint& d);

  private:
    void trim();
    std::vector<uint64_t> limbs_;
};

// Exact binomial coefficient C(m, n).
BigUint binomial(uint64_t m, uint64_t n);

} // namespace qrng

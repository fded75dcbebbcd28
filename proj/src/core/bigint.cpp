#include "core/bigint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "core/errors.hpp"

namespace qrng {

namespace {

using u128 = unsigned __int128;

// Reciprocal word for 2/1 division; d must be normalized (top bit set).
inline uint64_t reciprocal_word(uint64_t d) {
    return static_cast<uint64_t>((~u128{0} - (u128{d} << 64)) / d);
}

// Divides (u1:u0) by normalized d given its reciprocal; u1 < d.
inline uint64_t div_2by1(uint64_t& rem, uint64_t u1, uint64_t u0, uint64_t d, uint64_t v) {
    u128 p = u128{v} * u1;
    uint64_t q0 = static_cast<uint64_t>(p) + u0;
    uint64_t q1 = static_cast<uint64_t>(p >> 64) + u1 + (q0 < u0);
    q1 += 1;
    uint64_t r = u0 - q1 * d;
    if (r > q0) {
        q1 -= 1;
        r += d;
    }
    if (r >= d) {
        q1 += 1;
        r -= d;
    }
    rem = r;
    return q1;
}

} // namespace

BigUint::BigUint(uint64_t v) {
    if (v) limbs_.push_back(v);
}

BigUint::BigUint(std::vector<uint64_t> limbs) : limbs_(std::move(limbs)) { trim(); }

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

uint64_t BigUint::bit_length() const {
    if (limbs_.empty()) return 0;
    return 64 * (limbs_.size() - 1) + (64 - std::countl_zero(limbs_.back()));
}

bool BigUint::is_power_of_two() const {
    if (limbs_.empty()) return false;
    for (size_t i = 0; i + 1 < limbs_.size(); ++i)
        if (limbs_[i] != 0) return false;
    return std::has_single_bit(limbs_.back());
}

double BigUint::log2() const {
    if (limbs_.empty()) return -HUGE_VAL;
    size_t n = limbs_.size();
    double top = static_cast<double>(limbs_.back());
    if (n == 1) return std::log2(top);
    double x = top * 0x1.0p64 + static_cast<double>(limbs_[n - 2]);
    return std::log2(x) + 64.0 * static_cast<double>(n - 2);
}

uint64_t BigUint::to_u64() const {
    require(limbs_.size() <= 1, errc::internal, "big integer exceeds 64 bits");
    return limbs_.empty() ? 0 : limbs_[0];
}

int BigUint::compare(const BigUint& o) const {
    if (limbs_.size() != o.limbs_.size()) return limbs_.size() < o.limbs_.size() ? -1 : 1;
    for (size_t i = limbs_.size(); i-- > 0;) {
        if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
    }
    return 0;
}

void BigUint::add_u64(uint64_t v) {
    uint64_t carry = v;
    for (size_t i = 0; carry && i < limbs_.size(); ++i) {
        uint64_t s = limbs_[i] + carry;
        carry = s < carry;
        limbs_[i] = s;
    }
    if (carry) limbs_.push_back(carry);
}

void BigUint::add(const BigUint& o) {
    if (limbs_.size() < o.limbs_.size()) limbs_.resize(o.limbs_.size(), 0);
    uint64_t carry = 0;
    for (size_t i = 0; i < o.limbs_.size(); ++i) {
        const uint64_t a = limbs_[i];
        const uint64_t s = a + o.limbs_[i];
        const uint64_t c1 = s < a;
        limbs_[i] = s + carry;
        carry = c1 | (limbs_[i] < s);
    }
    for (size_t i = o.limbs_.size(); carry && i < limbs_.size(); ++i) {
        limbs_[i] += 1;
        carry = limbs_[i] == 0;
    }
    if (carry) limbs_.push_back(1);
}

void BigUint::sub(const BigUint& o) {
    require(compare(o) >= 0, errc::internal, "big integer underflow");
    uint64_t borrow = 0;
    for (size_t i = 0; i < o.limbs_.size(); ++i) {
        uint64_t t = limbs_[i] - borrow;
        uint64_t b1 = limbs_[i] < borrow;
        uint64_t r = t - o.limbs_[i];
        borrow = b1 | (t < o.limbs_[i]);
        limbs_[i] = r;
    }
    for (size_t i = o.limbs_.size(); borrow && i < limbs_.size(); ++i) {
        uint64_t t = limbs_[i] - borrow;
        borrow = limbs_[i] < borrow;
        limbs_[i] = t;
    }
    trim();
}

void BigUint::mul_u64(uint64_t f) {
    if (f == 0 || limbs_.empty()) {
        limbs_.clear();
        return;
    }
    uint64_t carry = 0;
    for (auto& w : limbs_) {
        u128 p = u128{w} * f + carry;
        w = static_cast<uint64_t>(p);
        carry = static_cast<uint64_t>(p >> 64);
    }
    if (carry) limbs_.push_back(carry);
}

uint64_t BigUint::divmod_u64(uint64_t d) {
    require(d != 0, errc::internal, "division by zero");
    if (limbs_.empty()) return 0;
    const int z = std::countl_zero(d);
    const uint64_t dn = d << z;
    const uint64_t v = reciprocal_word(dn);
    uint64_t r;
    size_t n = limbs_.size();
    if (z == 0) {
        r = 0;
        for (size_t i = n; i-- > 0;) limbs_[i] = div_2by1(r, r, limbs_[i], dn, v);
    } else {
        // Streams the limbs of (x << z); quotient of the shifted pair is x/d.
        r = limbs_[n - 1] >> (64 - z);
        for (size_t i = n; i-- > 1;) {
            uint64_t limb = (limbs_[i] << z) | (limbs_[i - 1] >> (64 - z));
            limbs_[i] = div_2by1(r, r, limb, dn, v);
        }
        limbs_[0] = div_2by1(r, r, limbs_[0] << z, dn, v);
        r >>= z;
    }
    trim();
    return r;
}

void BigUint::divexact_u64(uint64_t d) {
    uint64_t r = divmod_u64(d);
    require(r == 0, errc::internal, "inexact division");
}

BigUint BigUint::mul(const BigUint& a, const BigUint& b) {
    if (a.is_zero() || b.is_zero()) return BigUint();
    std::vector<uint64_t> out(a.limbs_.size() + b.limbs_.size(), 0);
    for (size_t i = 0; i < a.limbs_.size(); ++i) {
        uint64_t carry = 0;
        for (size_t j = 0; j < b.limbs_.size(); ++j) {
            u128 p = u128{a.limbs_[i]} * b.limbs_[j] + out[i + j] + carry;
            out[i + j] = static_cast<uint64_t>(p);
            carry = static_cast<uint64_t>(p >> 64);
        }
        out[i + b.limbs_.size()] = carry;
    }
    return BigUint(std::move(out));
}

std::pair<BigUint, BigUint> BigUint::divmod(const BigUint& u, const BigUint& d) {
    require(!d.is_zero(), errc::internal, "division by zero");
    if (u.compare(d) < 0) return {BigUint(), u};
    if (d.limbs_.size() == 1) {
        BigUint q = u;
        uint64_t r = q.divmod_u64(d.limbs_[0]);
        return {std::move(q), BigUint(r)};
    }

    const size_t n = d.limbs_.size();
    const size_t m = u.limbs_.size() - n;
    const int s = std::countl_zero(d.limbs_.back());

    // Knuth Algorithm D on limbs normalized so the divisor's top bit is set.
    std::vector<uint64_t> dn(n), un(u.limbs_.size() + 1, 0);
    if (s == 0) {
        dn = d.limbs_;
        std::copy(u.limbs_.begin(), u.limbs_.end(), un.begin());
    } else {
        for (size_t i = n; i-- > 1;) dn[i] = (d.limbs_[i] << s) | (d.limbs_[i - 1] >> (64 - s));
        dn[0] = d.limbs_[0] << s;
        const size_t ul = u.limbs_.size();
        un[ul] = u.limbs_[ul - 1] >> (64 - s);
        for (size_t i = ul; i-- > 1;) un[i] = (u.limbs_[i] << s) | (u.limbs_[i - 1] >> (64 - s));
        un[0] = u.limbs_[0] << s;
    }

    const uint64_t v = reciprocal_word(dn[n - 1]);
    std::vector<uint64_t> q(m + 1, 0);

    for (size_t j = m + 1; j-- > 0;) {
        uint64_t qhat, rhat;
        bool rhat_over = false;
        if (un[j + n] == dn[n - 1]) {
            qhat = ~uint64_t{0};
            rhat = un[j + n - 1] + dn[n - 1];
            rhat_over = rhat < dn[n - 1];
        } else {
            qhat = div_2by1(rhat, un[j + n], un[j + n - 1], dn[n - 1], v);
        }
        while (!rhat_over &&
               u128{qhat} * dn[n - 2] > ((u128{rhat} << 64) | un[j + n - 2])) {
            --qhat;
            const uint64_t nr = rhat + dn[n - 1];
            rhat_over = nr < rhat;
            rhat = nr;
        }

        // un[j .. j+n] -= qhat * dn
        uint64_t carry = 0, borrow = 0;
        for (size_t i = 0; i < n; ++i) {
            u128 p = u128{qhat} * dn[i] + carry;
            carry = static_cast<uint64_t>(p >> 64);
            const uint64_t pl = static_cast<uint64_t>(p);
            const uint64_t t = un[i + j] - pl;
            const uint64_t b1 = un[i + j] < pl;
            const uint64_t r = t - borrow;
            const uint64_t b2 = t < borrow;
            un[i + j] = r;
            borrow = b1 | b2;
        }
        {
            const uint64_t t = un[j + n] - carry;
            const uint64_t b1 = un[j + n] < carry;
            const uint64_t r = t - borrow;
            const uint64_t b2 = t < borrow;
            un[j + n] = r;
            borrow = b1 | b2;
        }
        if (borrow) {
            // Estimate was one too large; add the divisor back.
            --qhat;
            uint64_t c2 = 0;
            for (size_t i = 0; i < n; ++i) {
                u128 sum = u128{un[i + j]} + dn[i] + c2;
                un[i + j] = static_cast<uint64_t>(sum);
                c2 = static_cast<uint64_t>(sum >> 64);
            }
            un[j + n] += c2;
        }
        q[j] = qhat;
    }

    std::vector<uint64_t> rem(n);
    if (s == 0) {
        std::copy(un.begin(), un.begin() + ptrdiff_t(n), rem.begin());
    } else {
        for (size_t i = 0; i + 1 < n; ++i) rem[i] = (un[i] >> s) | (un[i + 1] << (64 - s));
        rem[n - 1] = un[n - 1] >> s;
    }
    return {BigUint(std::move(q)), BigUint(std::move(rem))};
}

std::string BigUint::to_string() const {
    if (limbs_.empty()) return "0";
    BigUint t = *this;
    std::string out;
    while (!t.is_zero()) {
        uint64_t r = t.divmod_u64(10000000000000000000ull); // 10^19
        std::string part = std::to_string(r);
        if (!t.is_zero()) part.insert(0, 19 - part.size(), '0');
        out.insert(0, part);
    }
    return out;
}

BigUint binomial(uint64_t m, uint64_t n) {
    require(n <= m, errc::validation, "binomial requires n <= m");
    if (n > m - n) n = m - n;
    BigUint b(1);
    for (uint64_t i = 1; i <= n; ++i) {
        b.mul_u64(m - n + i);
        b.divexact_u64(i);
    }
    return b;
}

} // namespace qrng

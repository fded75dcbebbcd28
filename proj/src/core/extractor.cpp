#include "core/extractor.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace qrng {

void BitStream::push_bit(int bit) {
    if ((bit_count & 7) == 0) bytes.push_back(0);
    if (bit) bytes.back() |= uint8_t(1u << (bit_count & 7));
    ++bit_count;
}

std::string matrix_mode_name(MatrixMode mode) {
    switch (mode) {
        case MatrixMode::per_block: return "per_block";
        case MatrixMode::fixed: return "fixed";
        case MatrixMode::toeplitz: return "toeplitz";
    }
    return "unknown";
}

MatrixMode matrix_mode_from_name(const std::string& name) {
    if (name == "per_block") return MatrixMode::per_block;
    if (name == "fixed") return MatrixMode::fixed;
    if (name == "toeplitz") return MatrixMode::toeplitz;
    fail(errc::validation, "unknown matrix mode: " + name);
}

uint64_t output_length(uint64_t n, double h_low, int b, double margin_bits) {
    require(n > 0, errc::validation, "substring length must be positive");
    require(b > 0, errc::validation, "symbol width must be positive");
    require(std::isfinite(h_low), errc::validation, "h_low must be finite");
    require(h_low > 0.0, errc::insufficient_data,
            "certified entropy is not positive; nothing to extract");
    require(h_low <= double(b) + 1e-12, errc::validation,
            "h_low exceeds the bits encoded per measurement");
    require(margin_bits >= 0.0, errc::validation, "security margin must be non-negative");
    double l = std::floor(double(n) * h_low / double(b) - margin_bits);
    require(l >= 1.0, errc::insufficient_data,
            "security margin leaves no extractable output");
    return uint64_t(l);
}

namespace {

// Words of one matrix row beyond column l-1 must stay zero so the hash
// accumulator never carries bits past the output length.
uint64_t tail_mask(uint64_t l) {
    return (l & 63) ? ((uint64_t(1) << (l & 63)) - 1) : ~uint64_t(0);
}

void hash_words(const uint64_t* x, uint64_t n, const BinaryMatrix& m, uint64_t* out) {
    const size_t wpr = m.words_per_row();
    std::memset(out, 0, wpr * sizeof(uint64_t));
    const uint64_t nwords = (n + 63) / 64;
    for (uint64_t wi = 0; wi < nwords; ++wi) {
        uint64_t w = x[wi];
        while (w) {
            const uint64_t row = wi * 64 + uint64_t(std::countr_zero(w));
            w &= w - 1;
            const uint64_t* r = m.rows.data() + size_t(row) * wpr;
            for (size_t k = 0; k < wpr; ++k) out[k] ^= r[k];
        }
    }
}

void append_bits(BitStream& s, const uint64_t* words, uint64_t nbits) {
    for (uint64_t t = 0; t < nbits; ++t)
        s.push_bit(int((words[t >> 6] >> (t & 63)) & 1));
}

// Toeplitz row i is the reversed window s[i .. i+l-1] of the diagonal seed.
// Stored with the seed already reversed, the row becomes the ascending window
// starting at n-1-i, extracted with a single shift pair per word.
struct ToeplitzSeed {
    std::vector<uint64_t> sr;
    uint64_t n = 0, l = 0;

    ToeplitzSeed(uint64_t key, uint64_t n_, uint64_t l_) : n(n_), l(l_) {
        const uint64_t bits = n + l - 1;
        std::vector<uint64_t> s((bits + 63) / 64);
        for (size_t t = 0; t < s.size(); ++t)
            s[t] = mix64(key + uint64_t(t) * 0x9e3779b97f4a7c15ull);
        sr.assign(s.size() + 1, 0);
        for (uint64_t t = 0; t < bits; ++t) {
            const uint64_t u = bits - 1 - t;
            if ((s[u >> 6] >> (u & 63)) & 1) sr[t >> 6] |= uint64_t(1) << (t & 63);
        }
    }

    void xor_row(uint64_t i, uint64_t* out) const {
        const uint64_t start = n - 1 - i;
        const uint64_t base = start >> 6;
        const unsigned off = unsigned(start & 63);
        const size_t wpr = size_t((l + 63) / 64);
        const uint64_t mask = tail_mask(l);
        for (size_t k = 0; k < wpr; ++k) {
            uint64_t w = sr[base + k] >> off;
            if (off) w |= sr[base + k + 1] << (64 - off);
            if (k + 1 == wpr) w &= mask;
            out[k] ^= w;
        }
    }
};

void toeplitz_hash(const uint64_t* x, const ToeplitzSeed& ts, uint64_t* out) {
    std::memset(out, 0, size_t((ts.l + 63) / 64) * sizeof(uint64_t));
    const uint64_t nwords = (ts.n + 63) / 64;
    for (uint64_t wi = 0; wi < nwords; ++wi) {
        uint64_t w = x[wi];
        while (w) {
            ts.xor_row(wi * 64 + uint64_t(std::countr_zero(w)), out);
            w &= w - 1;
        }
    }
}

std::vector<uint64_t> stream_words(const BitStream& s) {
    std::vector<uint64_t> words((s.bit_count + 63) / 64 + 1, 0);
    for (size_t i = 0; i < s.bytes.size(); ++i)
        words[i >> 3] |= uint64_t(s.bytes[i]) << ((i & 7) * 8);
    if (s.bit_count & 63) words[s.bit_count >> 6] &= tail_mask(s.bit_count);
    return words;
}

} // namespace

BinaryMatrix random_matrix(uint64_t seed, uint64_t n, uint64_t l) {
    require(n > 0 && l > 0, errc::validation, "matrix dimensions must be positive");
    require(l <= n, errc::validation, "output length cannot exceed input length");
    BinaryMatrix m;
    m.n = n;
    m.l = l;
    const size_t wpr = m.words_per_row();
    m.rows.resize(size_t(n) * wpr);
    const uint64_t mask = tail_mask(l);
    // Matrix words are the splitmix64 stream keyed at seed, in storage order.
    size_t idx = 0;
    for (uint64_t i = 0; i < n; ++i) {
        for (size_t w = 0; w < wpr; ++w, ++idx)
            m.rows[idx] = mix64(seed + uint64_t(idx) * 0x9e3779b97f4a7c15ull);
        m.rows[idx - 1] &= mask;
    }
    return m;
}

BinaryMatrix matrix_from_bits(const std::vector<uint8_t>& packed_bits, uint64_t n, uint64_t l) {
    require(n > 0 && l > 0, errc::validation, "matrix dimensions must be positive");
    require(l <= n, errc::validation, "output length cannot exceed input length");
    require(uint64_t(packed_bits.size()) * 8 >= n * l, errc::insufficient_data,
            "true-random matrix mode needs n*l seed bits");
    BinaryMatrix m;
    m.n = n;
    m.l = l;
    const size_t wpr = m.words_per_row();
    m.rows.assign(size_t(n) * wpr, 0);
    for (uint64_t i = 0; i < n; ++i)
        for (uint64_t j = 0; j < l; ++j) {
            const uint64_t t = i * l + j;
            if ((packed_bits[size_t(t >> 3)] >> (t & 7)) & 1)
                m.rows[size_t(i) * wpr + (j >> 6)] |= uint64_t(1) << (j & 63);
        }
    return m;
}

BitStream hash_block(const BitStream& input, const BinaryMatrix& matrix) {
    require(input.bit_count == matrix.n, errc::validation,
            "input length does not match the matrix");
    auto x = stream_words(input);
    std::vector<uint64_t> out(matrix.words_per_row());
    hash_words(x.data(), matrix.n, matrix, out.data());
    BitStream s;
    append_bits(s, out.data(), matrix.l);
    return s;
}

BitStream encode_symbols(const SampleBlock& block, int b) {
    require(b >= 1 && b <= 30, errc::validation, "symbol width out of range");
    const int32_t M = block.partition.m_index;
    const int32_t top = (int32_t(1) << b) - 1;
    const bool tagged = !block.is_check.empty();
    require(!tagged || block.is_check.size() == block.symbols.size(), errc::validation,
            "check tags do not match the symbol count");
    BitStream s;
    for (size_t i = 0; i < block.symbols.size(); ++i) {
        if (tagged && block.is_check[i]) continue;
        int32_t code = block.symbols[i] + M;
        if (code < 0) code = 0;
        if (code > top) code = top;
        for (int w = b - 1; w >= 0; --w) s.push_bit(int((code >> w) & 1));
    }
    return s;
}

ExtractResult extract_bits(const BitStream& encoded, const ExtractorParams& params,
                           double h_low) {
    require(params.n % uint64_t(params.b) == 0, errc::validation,
            "substring length must be divisible by the symbol width");
    const uint64_t n = params.n;
    const uint64_t l = output_length(n, h_low, params.b, params.margin_bits);

    ExtractResult res;
    res.l = l;
    const uint64_t blocks = encoded.bit_count / n;
    res.blocks_hashed = blocks;
    res.input_bits = blocks * n;
    if (blocks == 0) return res;

    const auto enc = stream_words(encoded);
    const uint64_t nwords = (n + 63) / 64;
    std::vector<uint64_t> x(nwords + 1);
    std::vector<uint64_t> out((l + 63) / 64);

    BinaryMatrix fixed;
    if (params.mode == MatrixMode::fixed) fixed = random_matrix(params.matrix_seed, n, l);

    for (uint64_t s = 0; s < blocks; ++s) {
        const uint64_t start = s * n;
        const uint64_t base = start >> 6;
        const unsigned off = unsigned(start & 63);
        for (uint64_t w = 0; w < nwords; ++w) {
            uint64_t v = enc[base + w] >> off;
            if (off) v |= enc[base + w + 1] << (64 - off);
            x[w] = v;
        }
        if (n & 63) x[nwords - 1] &= tail_mask(n);

        switch (params.mode) {
            case MatrixMode::fixed:
                hash_words(x.data(), n, fixed, out.data());
                break;
            case MatrixMode::per_block: {
                auto m = random_matrix(subseed(params.matrix_seed, s), n, l);
                hash_words(x.data(), n, m, out.data());
                break;
            }
            case MatrixMode::toeplitz: {
                ToeplitzSeed ts(subseed(params.matrix_seed, s), n, l);
                toeplitz_hash(x.data(), ts, out.data());
                break;
            }
        }
        append_bits(res.bits, out.data(), l);
    }
    return res;
}

ExtractResult extract_stream(const SampleBlock& block, const ExtractorParams& params,
                             double h_low) {
    return extract_bits(encode_symbols(block, params.b), params, h_low);
}

} // namespace qrng

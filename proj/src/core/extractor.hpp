#pragma once

#include <cstdint>
#include <vector>

#include "core/gaussian.hpp"

namespace qrng {

// Packed bit stream; bit k of the stream is bit (k & 7) of byte k >> 3, so the
// first bit lands in the least significant bit of byte 0.
struct BitStream {
    std::vector<uint8_t> bytes;
    uint64_t bit_count = 0;

    void push_bit(int bit);
    int bit(uint64_t k) const { return (bytes[k >> 3] >> (k & 7)) & 1; }
};

enum class MatrixMode { per_block, fixed, toeplitz };

std::string matrix_mode_name(MatrixMode mode);
MatrixMode matrix_mode_from_name(const std::string& name);

// Dense binary matrix, row-major; bit j of row i lives at bit (j & 63) of
// word i * words_per_row() + (j >> 6). Words beyond column l - 1 are zero.
struct BinaryMatrix {
    uint64_t n = 0;
    uint64_t l = 0;
    std::vector<uint64_t> rows;

    size_t words_per_row() const { return size_t((l + 63) / 64); }
    int at(uint64_t i, uint64_t j) const {
        return int((rows[size_t(i) * words_per_row() + (j >> 6)] >> (j & 63)) & 1);
    }
};

struct ExtractorParams {
    uint64_t n = 10000;   // hashed substring length, bits
    int b = 5;            // bits per encoded symbol; n must be divisible by b
    MatrixMode mode = MatrixMode::per_block;
    uint64_t matrix_seed = 1;
    double margin_bits = 0.0; // subtracted from n*h_low/b before flooring
};

// l = floor(n * h_low / b - margin_bits). h_low <= 0 is not extractable.
uint64_t output_length(uint64_t n, double h_low, int b, double margin_bits = 0.0);

// Deterministic keyed expansion of a 64-bit seed into the n x l matrix.
BinaryMatrix random_matrix(uint64_t seed, uint64_t n, uint64_t l);

// True-random-seed mode: the matrix bits are taken verbatim from a packed bit
// stream (row-major, same bit order as BitStream), which must hold n*l bits.
BinaryMatrix matrix_from_bits(const std::vector<uint8_t>& packed_bits, uint64_t n, uint64_t l);

// output_j = XOR_i input_i * matrix_ij over GF(2). input holds n packed bits.
BitStream hash_block(const BitStream& input, const BinaryMatrix& matrix);

// Offset-binary symbol codes: clamp(k + M, 0, 2^b - 1), b bits each, most
// significant bit first. Check positions are excluded when the block is tagged.
BitStream encode_symbols(const SampleBlock& block, int b);

struct ExtractResult {
    BitStream bits;
    uint64_t blocks_hashed = 0;
    uint64_t l = 0;             // output bits per hashed substring
    uint64_t input_bits = 0;    // encoded data bits consumed (partial tail dropped)
};

// Encode, chunk into n-bit substrings, hash each, concatenate. The trailing
// partial substring is discarded. per_block mode rekeys the matrix for every
// substring; toeplitz draws a fresh n+l-1 bit diagonal seed per substring.
ExtractResult extract_stream(const SampleBlock& block, const ExtractorParams& params,
                             double h_low);

// Same pipeline over symbols already encoded into a packed stream.
ExtractResult extract_bits(const BitStream& encoded, const ExtractorParams& params,
                           double h_low);

} // namespace qrng

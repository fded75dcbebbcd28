#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/bigint.hpp"
#include "core/entropy.hpp"
#include "core/gaussian.hpp"
#include "core/rng.hpp"

namespace qrng {

// Sequential source of seed bits with a hard budget. Every random choice the
// protocol makes is drawn from here, so consumed_bits() is the exact seed
// accounting for a run.
class SeedStream {
  public:
    // Pseudorandom stream; budget_bits = 0 means unlimited.
    static SeedStream prng(uint64_t seed, uint64_t budget_bits = 0);
    // True-random stream over caller-provided bytes; bit i of the stream is
    // bit (i % 8) of byte (i / 8).
    static SeedStream from_bytes(std::vector<uint8_t> data);

    // Next `bits` bits as an integer in [0, 2^bits); bit 0 of the value is the
    // first bit consumed. Exhausting the budget raises insufficient-data.
    BigUint take(uint64_t bits);

    uint64_t consumed_bits() const { return consumed_; }
    uint64_t budget_bits() const { return budget_; }

  private:
    SeedStream() = default;
    bool prng_mode_ = true;
    Xoshiro256 rng_{0};
    std::vector<uint8_t> bytes_;
    uint64_t budget_ = 0; // 0 = unlimited (prng mode only)
    uint64_t consumed_ = 0;
};

// Seed bits needed to pick n_Q check instants among m: ceil(log2 C(m, n_Q)).
// Exact integer arithmetic for m <= 10^4; log-gamma above, falling back to the
// exact path whenever the value sits within 1e-4 of an integer.
uint64_t seed_cost(uint64_t m, uint64_t n_q);

// Maps seed bits to a uniformly chosen size-n_Q subset of [0, m), sorted
// ascending. Draws seed_cost(m, n_Q) bits per attempt, rejection-resampling
// until the value ranks below C(m, n_Q); rank 0 is {0..n_Q-1} and the top rank
// is {m-n_Q..m-1}. Deterministic in the stream state. m <= 2^31.
std::vector<uint64_t> select_check_instants(uint64_t m, uint64_t n_q, SeedStream& seed);

// Rank of a sorted subset under the same bijection; inverse of the unranking
// inside select_check_instants.
BigUint subset_rank(uint64_t m, const std::vector<uint64_t>& subset);

// Entropy certification from the check outcomes of a block. Check positions
// must be tagged as checks when the block carries tags; untagged blocks are
// treated as recorded data split post hoc. The tail error uses the empirical
// second moment of the check outcomes.
EntropyReport certify(const SampleBlock& block, const std::vector<uint64_t>& check_indices,
                      Estimator estimator);

// Same certification on an exact binned distribution (oracle path).
EntropyReport certify(const DiscreteDistribution& exact);

// Net secure bits per measurement: max(0, [(m - n_Q) h_low - t] / m).
double secure_rate(uint64_t m, uint64_t n_q, double h_low, uint64_t t_bits);

// (Extractable bits) / (seed bits) at fixed h_low with n_Q = ceil(sqrt(m)).
double seed_expansion_ratio(uint64_t m, double h_low);

struct ProtocolConfig {
    uint64_t m = 1ull << 20;
    uint64_t n_q = 0;                        // 0: ceil(sqrt(block size)) per block
    Partition partition{5, 7.424621202458749, true};
    Estimator estimator = Estimator::bayesian;
    uint64_t recalibration_block = 1ull << 20;
    uint64_t seed = 1;                       // seed-stream key (prng mode)
    uint64_t seed_budget_bits = 0;           // 0 = unlimited
};

struct BlockTrace {
    uint64_t index = 0;
    uint64_t offset = 0;
    uint64_t size = 0;
    uint64_t n_check = 0;
    uint64_t t_bits = 0;       // seed bits actually consumed by this block
    EntropyReport entropy;     // raw per-block certification (h_low may be < 0)
    double r_sec = 0.0;
    std::vector<int32_t> data_symbols; // forwarded to the extraction stage
};

// Whole-run result. entropy describes the pooled check statistics except that
// h_low (and guessing_prob) is the extraction-weighted average of the per-block
// bounds clamped at zero — the quantity that actually limits extraction — so
// r_sec <= entropy.h_low always holds. extracted_bits is filled by the
// extraction stage.
struct RunReport {
    EntropyReport entropy;
    uint64_t t_bits = 0;
    double r_sec = 0.0;
    uint64_t extracted_bits = 0;
    uint64_t measurements_used = 0;
    bool seed_exhausted = false;
    std::vector<BlockTrace> blocks;
};

// Runs steps I-IV per recalibration block: select check instants from the
// seed, measure (simulated switching), certify, account the rate. Stops with a
// partial report when the seed budget runs out.
RunReport run_protocol(const ProtocolConfig& config, const GaussianState& source,
                       uint64_t sample_seed);

// Same over a recorded block; check instants are applied post hoc when the
// recording carries no tags, and validated against the tags when it does.
RunReport run_protocol(const ProtocolConfig& config, const SampleBlock& recorded);

} // namespace qrng

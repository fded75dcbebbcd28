#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qrng {

// Gaussian source model. Quadrature variances in vacuum units (vacuum = 1/2).
struct GaussianState {
    enum class Kind { vacuum, thermal, squeezed, empirical };

    Kind kind = Kind::vacuum;
    double parameter = 0.0; // mu for thermal, zeta for squeezed, sigma^2 for empirical
    double sigma2_p = 0.5;
    double sigma2_q = 0.5;

    static GaussianState vacuum();
    static GaussianState thermal(double mu);
    static GaussianState squeezed(double zeta);
    static GaussianState empirical(double sigma2);

    double variance(bool q_quadrature) const { return q_quadrature ? sigma2_q : sigma2_p; }
    std::string describe() const;
};

// Squeezed state and the thermal state with mu = (zeta^2 - 1)/2; the pair has
// identical P-quadrature statistics and distinguishable Q statistics.
std::pair<GaussianState, GaussianState> squeezed_thermal_pair(double zeta);

// ADC discretization: 2^j interior bins of width delta across [-p_max, p_max],
// plus overflow outcomes +-(M+1). Centered mode puts bin 0 astride the origin
// and adds half-width edge bins at +-M; offset mode uses bins (k*delta, (k+1)*delta]
// with k in [-M, M-1].
struct Partition {
    int bit_depth = 0;
    double p_max = 0.0;
    double delta = 0.0;
    int m_index = 0; // M = 2^(j-1)
    bool centered = true;

    Partition() = default;
    Partition(int bit_depth, double p_max, bool centered = true);

    // Bin index for a continuous outcome, overflow mapped to +-(M+1).
    int bin_of(double x) const;
    // Nominal representative value of a bin (overflow pinned just past range).
    double bin_center(int k) const;
    // Interior + overflow bin count: 2^j + 3 centered, 2^j + 2 offset.
    int outcome_count() const;
    // Offset partitions have no k = +M slot; index +M is structurally empty.
    bool slot_used(int k) const;
};

// Binned outcome law over a Partition: exact probabilities or empirical counts.
class DiscreteDistribution {
  public:
    static DiscreteDistribution probabilities(const Partition& part, std::vector<double> probs);
    static DiscreteDistribution counts(const Partition& part, std::vector<uint64_t> counts);

    bool is_counts() const { return is_counts_; }
    const Partition& partition() const { return part_; }

    double prob(int k) const { return probs_[slot(k)]; }
    uint64_t count_at(int k) const { return counts_[slot(k)]; }
    uint64_t total_count() const { return total_; }

    // Index range is [-(M+1), M+1]; slot() maps it onto dense storage.
    size_t slot(int k) const;
    size_t slots() const { return size_t(2 * (part_.m_index + 1) + 1); }

    const std::vector<double>& prob_data() const { return probs_; }
    const std::vector<uint64_t>& count_data() const { return counts_; }

  private:
    DiscreteDistribution() = default;
    Partition part_;
    std::vector<double> probs_;
    std::vector<uint64_t> counts_;
    uint64_t total_ = 0;
    bool is_counts_ = false;
};

// Exact Gaussian bin masses for variance sigma2, overflow bins included.
DiscreteDistribution bin_probabilities(double sigma2, const Partition& part);

// Quantized i.i.d. quadrature draws; deterministic in the seed.
struct SampleBlock {
    Partition partition;
    std::vector<int32_t> symbols;
    std::vector<uint8_t> is_check; // 1 where the symbol is a Q-quadrature check
    std::string source;
    uint64_t seed = 0;
};

SampleBlock sample_quadrature(const GaussianState& state, bool q_quadrature,
                              const Partition& part, uint64_t count, uint64_t seed);

// Draws with per-instant quadrature choice: check_mask[i] selects Q at i.
SampleBlock sample_switched(const GaussianState& state, const Partition& part,
                            const std::vector<uint8_t>& check_mask, uint64_t seed);

// Empirical counts of a block's symbols (optionally restricted to checks).
DiscreteDistribution tally(const SampleBlock& block, bool checks_only);

} // namespace qrng

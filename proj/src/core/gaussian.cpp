#include "core/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace qrng {

GaussianState GaussianState::vacuum() {
    return GaussianState{Kind::vacuum, 0.0, 0.5, 0.5};
}

GaussianState GaussianState::thermal(double mu) {
    require(mu >= 0.0, errc::validation, "thermal state requires mu >= 0");
    return GaussianState{Kind::thermal, mu, 0.5 + mu, 0.5 + mu};
}

GaussianState GaussianState::squeezed(double zeta) {
    require(zeta > 0.0, errc::validation, "squeezed state requires zeta > 0");
    return GaussianState{Kind::squeezed, zeta, zeta * zeta / 2.0, 1.0 / (2.0 * zeta * zeta)};
}

GaussianState GaussianState::empirical(double sigma2) {
    require(sigma2 > 0.0, errc::validation, "empirical state requires sigma^2 > 0");
    return GaussianState{Kind::empirical, sigma2, sigma2, sigma2};
}

std::string GaussianState::describe() const {
    switch (kind) {
        case Kind::vacuum: return "vacuum";
        case Kind::thermal: return "thermal(mu=" + std::to_string(parameter) + ")";
        case Kind::squeezed: return "squeezed(zeta=" + std::to_string(parameter) + ")";
        case Kind::empirical: return "empirical(sigma2=" + std::to_string(parameter) + ")";
    }
    return "unknown";
}

std::pair<GaussianState, GaussianState> squeezed_thermal_pair(double zeta) {
    require(zeta > 1.0, errc::validation, "squeezed/thermal pair requires zeta > 1");
    double mu = (zeta * zeta - 1.0) / 2.0;
    return {GaussianState::squeezed(zeta), GaussianState::thermal(mu)};
}

Partition::Partition(int bit_depth_, double p_max_, bool centered_)
    : bit_depth(bit_depth_), p_max(p_max_), centered(centered_) {
    require(bit_depth >= 1 && bit_depth <= 16, errc::validation, "bit depth must be in 1..16");
    require(p_max > 0.0 && std::isfinite(p_max), errc::validation, "p_max must be positive");
    m_index = 1 << (bit_depth - 1);
    delta = p_max * std::ldexp(1.0, 1 - bit_depth); // delta * M = p_max
}

int Partition::bin_of(double x) const {
    require(std::isfinite(x), errc::validation, "non-finite sample");
    const int M = m_index;
    if (centered) {
        if (x > p_max) return M + 1;
        if (x < -p_max) return -(M + 1);
        int k = static_cast<int>(std::floor(x / delta + 0.5));
        return std::clamp(k, -M, M);
    }
    if (x > p_max) return M + 1;
    if (x <= -p_max) return -(M + 1);
    int k = static_cast<int>(std::ceil(x / delta)) - 1;
    return std::clamp(k, -M, M - 1);
}

double Partition::bin_center(int k) const {
    const int M = m_index;
    if (k > M || (!centered && k == M)) return p_max + delta / 2.0;
    if (k < -M) return -(p_max + delta / 2.0);
    return centered ? k * delta : (k + 0.5) * delta;
}

int Partition::outcome_count() const {
    return (1 << bit_depth) + (centered ? 3 : 2);
}

bool Partition::slot_used(int k) const {
    if (k > m_index + 1 || k < -(m_index + 1)) return false;
    return centered || k != m_index;
}

size_t DiscreteDistribution::slot(int k) const {
    int idx = k + part_.m_index + 1;
    require(idx >= 0 && size_t(idx) < slots(), errc::validation, "bin index out of range");
    return size_t(idx);
}

DiscreteDistribution DiscreteDistribution::probabilities(const Partition& part,
                                                         std::vector<double> probs) {
    DiscreteDistribution d;
    d.part_ = part;
    require(probs.size() == d.slots(), errc::validation, "probability vector has wrong length");
    double sum = 0.0;
    for (double p : probs) {
        require(p >= 0.0 && std::isfinite(p), errc::validation, "negative probability");
        sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-12, errc::validation, "probabilities must sum to 1");
    if (!part.centered)
        require(probs[size_t(2 * part.m_index + 1)] == 0.0, errc::validation,
                "offset partitions have no +M bin");
    d.probs_ = std::move(probs);
    return d;
}

DiscreteDistribution DiscreteDistribution::counts(const Partition& part,
                                                  std::vector<uint64_t> counts) {
    DiscreteDistribution d;
    d.part_ = part;
    require(counts.size() == d.slots(), errc::validation, "count vector has wrong length");
    d.total_ = std::accumulate(counts.begin(), counts.end(), uint64_t{0});
    d.counts_ = std::move(counts);
    d.is_counts_ = true;
    return d;
}

namespace {

// P(lo < X <= hi) for X ~ N(0, sd^2); erfc form keeps far-tail differences exact.
double gaussian_mass(double lo, double hi, double sd) {
    const double s = sd * std::sqrt(2.0);
    if (lo >= 0.0 && lo / s > 0.7)
        return 0.5 * (std::erfc(lo / s) - std::erfc(hi / s));
    return 0.5 * (std::erf(hi / s) - std::erf(lo / s));
}

} // namespace

DiscreteDistribution bin_probabilities(double sigma2, const Partition& part) {
    require(sigma2 > 0.0 && std::isfinite(sigma2), errc::validation, "variance must be positive");
    const double sd = std::sqrt(sigma2);
    const int M = part.m_index;
    std::vector<double> probs(size_t(2 * (M + 1) + 1), 0.0);
    auto at = [&](int k) -> double& { return probs[size_t(k + M + 1)]; };

    if (part.centered) {
        for (int k = 0; k <= M; ++k) {
            double lo = (k - 0.5) * part.delta;
            double hi = std::min((k + 0.5) * part.delta, part.p_max);
            double mass = (k == 0) ? 2.0 * gaussian_mass(0.0, hi, sd) : gaussian_mass(lo, hi, sd);
            at(k) = mass;
            if (k > 0) at(-k) = mass;
        }
    } else {
        for (int k = 0; k < M; ++k) {
            double mass = gaussian_mass(k * part.delta, (k + 1) * part.delta, sd);
            at(k) = mass;
            at(-k - 1) = mass;
        }
    }
    double overflow = 0.5 * std::erfc(part.p_max / (sd * std::sqrt(2.0)));
    at(M + 1) = overflow;
    at(-(M + 1)) = overflow;
    return DiscreteDistribution::probabilities(part, std::move(probs));
}

SampleBlock sample_quadrature(const GaussianState& state, bool q_quadrature,
                              const Partition& part, uint64_t count, uint64_t seed) {
    std::vector<uint8_t> mask(count, q_quadrature ? 1 : 0);
    SampleBlock block = sample_switched(state, part, mask, seed);
    block.source = state.describe();
    return block;
}

SampleBlock sample_switched(const GaussianState& state, const Partition& part,
                            const std::vector<uint8_t>& check_mask, uint64_t seed) {
    require(!check_mask.empty(), errc::validation, "sample count must be >= 1");
    const double sd_p = std::sqrt(state.sigma2_p);
    const double sd_q = std::sqrt(state.sigma2_q);
    NormalSampler normal(seed, 0.0, 1.0);
    SampleBlock block;
    block.partition = part;
    block.seed = seed;
    block.source = state.describe();
    block.is_check = check_mask;
    block.symbols.reserve(check_mask.size());
    for (uint8_t tag : check_mask) {
        double x = normal.next() * (tag ? sd_q : sd_p);
        block.symbols.push_back(part.bin_of(x));
    }
    return block;
}

DiscreteDistribution tally(const SampleBlock& block, bool checks_only) {
    const int M = block.partition.m_index;
    std::vector<uint64_t> counts(size_t(2 * (M + 1) + 1), 0);
    for (size_t i = 0; i < block.symbols.size(); ++i) {
        if (checks_only && !block.is_check[i]) continue;
        counts[size_t(block.symbols[i] + M + 1)] += 1;
    }
    return DiscreteDistribution::counts(block.partition, std::move(counts));
}

} // namespace qrng

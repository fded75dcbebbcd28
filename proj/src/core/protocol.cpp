#include "core/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "core/errors.hpp"

namespace qrng {

namespace {

// Binomials for subsets of width <= 64; C(63, 31) still fits in 64 bits.
const std::array<std::array<uint64_t, 65>, 64>& small_binomials() {
    static const auto table = [] {
        std::array<std::array<uint64_t, 65>, 64> c{};
        for (size_t a = 0; a < 64; ++a) {
            c[a][0] = 1;
            for (size_t i = 1; i <= a; ++i)
                c[a][i] = (a == 0) ? 0 : c[a - 1][i - 1] + (i <= a - 1 ? c[a - 1][i] : 0);
        }
        return c;
    }();
    return table;
}

inline uint64_t binom_small(uint64_t a, uint64_t i) {
    if (i > a) return 0;
    return small_binomials()[a][i];
}

// Colexicographic unranking over [lo, lo+width); appends ascending indices.
void unrank_colex_small(uint64_t lo, uint64_t width, uint64_t n, uint64_t rank,
                        std::vector<uint64_t>& out) {
    const size_t base = out.size();
    uint64_t a = width - 1;
    for (uint64_t i = n; i >= 1; --i) {
        while (binom_small(a, i) > rank) --a;
        rank -= binom_small(a, i);
        out.push_back(lo + a);
        if (a > 0) --a;
    }
    require(rank == 0, errc::internal, "unrank rank residue");
    std::reverse(out.begin() + ptrdiff_t(base), out.end());
}

// Splits [lo, lo+width) in half and decomposes the rank over the number of
// elements falling in the right half (Vandermonde convolution); each half
// recurses with its own sub-rank, so the whole map stays a bijection.
void unrank_subset(uint64_t lo, uint64_t width, uint64_t n, BigUint rank,
                   std::vector<uint64_t>& out) {
    if (n == 0) return;
    if (n == width) {
        for (uint64_t i = 0; i < width; ++i) out.push_back(lo + i);
        return;
    }
    if (width <= 64) {
        unrank_colex_small(lo, width, n, rank.to_u64(), out);
        return;
    }
    const uint64_t wl = width / 2;
    const uint64_t wr = width - wl;
    const uint64_t kmin = n > wl ? n - wl : 0;
    const uint64_t kmax = std::min(n, wr);

    // T(k) = C(wl, n-k) * C(wr, k); at kmin one factor is 1.
    BigUint term = (kmin == 0) ? binomial(wl, n) : binomial(wr, kmin);
    uint64_t k = kmin;
    while (term <= rank) {
        rank.sub(term);
        require(k < kmax, errc::internal, "unrank scan overran");
        term.mul_u64((n - k) * (wr - k));
        term.divexact_u64((wl - (n - k) + 1) * (k + 1));
        ++k;
    }
    auto [right_rank, left_rank] = BigUint::divmod(rank, binomial(wl, n - k));
    unrank_subset(lo, wl, n - k, std::move(left_rank), out);
    unrank_subset(lo + wl, wr, k, std::move(right_rank), out);
}

// Forward rank; exact mirror of unrank_subset.
BigUint rank_subset(uint64_t lo, uint64_t width, const uint64_t* elems, uint64_t n) {
    if (n == 0 || n == width) return BigUint();
    if (width <= 64) {
        uint64_t rank = 0;
        for (uint64_t i = 0; i < n; ++i) rank += binom_small(elems[i] - lo, i + 1);
        return BigUint(rank);
    }
    const uint64_t wl = width / 2;
    const uint64_t wr = width - wl;
    const uint64_t kmin = n > wl ? n - wl : 0;

    const uint64_t* split = std::lower_bound(elems, elems + n, lo + wl);
    const uint64_t nl = uint64_t(split - elems);
    const uint64_t k = n - nl;

    BigUint rank;
    BigUint term = (kmin == 0) ? binomial(wl, n) : binomial(wr, kmin);
    for (uint64_t j = kmin; j < k; ++j) {
        rank.add(term);
        term.mul_u64((n - j) * (wr - j));
        term.divexact_u64((wl - (n - j) + 1) * (j + 1));
    }
    BigUint within = BigUint::mul(rank_subset(lo + wl, wr, split, k), binomial(wl, nl));
    within.add(rank_subset(lo, wl, elems, nl));
    rank.add(within);
    return rank;
}

uint64_t isqrt_ceil(uint64_t x) {
    uint64_t r = uint64_t(std::sqrt(double(x)));
    while (r > 0 && (r - 1) * (r - 1) >= x) --r;
    while (r * r < x) ++r;
    return r;
}

uint64_t cost_from_exact(const BigUint& c) {
    return c.is_power_of_two() ? c.bit_length() - 1 : c.bit_length();
}

// Certification from empirical check counts; shared by block and pooled paths.
EntropyReport certify_counts(const DiscreteDistribution& counts, Estimator est) {
    const Partition& part = counts.partition();
    const double h_max = estimate_max_entropy(counts, est);
    EntropyReport er = min_entropy_lower_bound(part.delta, part.delta, h_max);
    er.estimator = est;
    er.n_check = counts.total_count();

    uint64_t top = 0;
    double second_moment = 0.0;
    for (int k = -(part.m_index + 1); k <= part.m_index + 1; ++k) {
        if (!part.slot_used(k)) continue;
        const uint64_t ck = counts.count_at(k);
        top = std::max(top, ck);
        const double center = part.bin_center(k);
        second_moment += double(ck) * center * center;
    }
    const double n = double(counts.total_count());
    er.h_inf = -std::log2(double(top) / n);
    const double sigma2 = second_moment / n;
    er.tail_error = sigma2 > 0.0
                        ? tail_error_bound(std::sqrt(sigma2), part, counts.total_count())
                        : 0.0;
    return er;
}

DiscreteDistribution tally_checks(const SampleBlock& block,
                                  const std::vector<uint64_t>& check_indices) {
    const Partition& part = block.partition;
    std::vector<uint64_t> counts(size_t(2 * (part.m_index + 1) + 1), 0);
    for (uint64_t idx : check_indices) {
        require(idx < block.symbols.size(), errc::validation,
                "check index beyond block length");
        counts[size_t(block.symbols[idx] + part.m_index + 1)] += 1;
    }
    return DiscreteDistribution::counts(part, std::move(counts));
}

} // namespace

SeedStream SeedStream::prng(uint64_t seed, uint64_t budget_bits) {
    SeedStream s;
    s.prng_mode_ = true;
    s.rng_ = Xoshiro256(seed);
    s.budget_ = budget_bits;
    return s;
}

SeedStream SeedStream::from_bytes(std::vector<uint8_t> data) {
    require(!data.empty(), errc::validation, "seed bytes must be non-empty");
    SeedStream s;
    s.prng_mode_ = false;
    s.budget_ = 8 * uint64_t(data.size());
    s.bytes_ = std::move(data);
    return s;
}

BigUint SeedStream::take(uint64_t bits) {
    require(bits >= 1, errc::validation, "bit draw must be positive");
    if (budget_ != 0)
        require(bits <= budget_ - consumed_, errc::insufficient_data, "seed exhausted");
    std::vector<uint64_t> limbs((bits + 63) / 64, 0);
    if (prng_mode_) {
        for (auto& w : limbs) w = rng_.next();
    } else {
        for (uint64_t i = 0; i < bits; ++i) {
            const uint64_t src = consumed_ + i;
            const uint64_t bit = (bytes_[src >> 3] >> (src & 7)) & 1;
            limbs[i >> 6] |= bit << (i & 63);
        }
    }
    if (bits % 64) limbs.back() &= ~uint64_t{0} >> (64 - bits % 64);
    consumed_ += bits;
    return BigUint(std::move(limbs));
}

uint64_t seed_cost(uint64_t m, uint64_t n_q) {
    require(n_q > 0 && n_q < m, errc::validation, "seed cost requires 0 < n_Q < m");
    if (m <= 10000) return cost_from_exact(binomial(m, n_q));
    const double lg = (std::lgamma(double(m) + 1.0) - std::lgamma(double(n_q) + 1.0) -
                       std::lgamma(double(m - n_q) + 1.0)) /
                      std::log(2.0);
    // Rounding guard: near-integer values fall back to exact arithmetic.
    if (std::abs(lg - std::round(lg)) < 1e-4) return cost_from_exact(binomial(m, n_q));
    return uint64_t(std::ceil(lg));
}

std::vector<uint64_t> select_check_instants(uint64_t m, uint64_t n_q, SeedStream& seed) {
    require(n_q > 0 && n_q < m, errc::validation, "selection requires 0 < n_Q < m");
    require(m <= (uint64_t{1} << 31), errc::validation, "m above 2^31 unsupported");
    const BigUint count = binomial(m, n_q);
    const uint64_t t = cost_from_exact(count);
    BigUint rank = seed.take(t);
    while (!(rank < count)) rank = seed.take(t);
    std::vector<uint64_t> out;
    out.reserve(size_t(n_q));
    unrank_subset(0, m, n_q, std::move(rank), out);
    return out;
}

BigUint subset_rank(uint64_t m, const std::vector<uint64_t>& subset) {
    require(std::is_sorted(subset.begin(), subset.end()), errc::validation,
            "subset must be sorted");
    require(subset.empty() || subset.back() < m, errc::validation, "subset element >= m");
    for (size_t i = 1; i < subset.size(); ++i)
        require(subset[i] != subset[i - 1], errc::validation, "subset has duplicates");
    return rank_subset(0, m, subset.data(), subset.size());
}

EntropyReport certify(const SampleBlock& block, const std::vector<uint64_t>& check_indices,
                      Estimator estimator) {
    require(!check_indices.empty(), errc::insufficient_data, "no check measurements");
    require(estimator != Estimator::exact, errc::validation,
            "empirical certification requires plugin or bayesian estimator");
    if (!block.is_check.empty()) {
        for (uint64_t idx : check_indices) {
            require(idx < block.is_check.size(), errc::validation,
                    "check index beyond block length");
            require(block.is_check[idx] != 0, errc::validation,
                    "check index not tagged as a Q measurement");
        }
    }
    return certify_counts(tally_checks(block, check_indices), estimator);
}

EntropyReport certify(const DiscreteDistribution& exact) {
    require(!exact.is_counts(), errc::validation, "exact certification needs probabilities");
    const Partition& part = exact.partition();
    EntropyReport er = min_entropy_lower_bound(part.delta, part.delta, max_entropy(exact));
    er.estimator = Estimator::exact;
    er.h_inf = classical_min_entropy(exact);
    double second_moment = 0.0;
    for (int k = -(part.m_index + 1); k <= part.m_index + 1; ++k) {
        if (!part.slot_used(k)) continue;
        const double center = part.bin_center(k);
        second_moment += exact.prob(k) * center * center;
    }
    // Per-measurement tail proxy (N = 1).
    er.tail_error =
        second_moment > 0.0 ? tail_error_bound(std::sqrt(second_moment), part, 1) : 0.0;
    return er;
}

double secure_rate(uint64_t m, uint64_t n_q, double h_low, uint64_t t_bits) {
    require(m > n_q, errc::validation, "secure rate requires m > n_Q");
    const double net = (double(m) - double(n_q)) * h_low - double(t_bits);
    return std::max(0.0, net / double(m));
}

double seed_expansion_ratio(uint64_t m, double h_low) {
    require(h_low > 0.0, errc::validation, "expansion ratio requires h_low > 0");
    const uint64_t n_q = isqrt_ceil(m);
    require(n_q < m, errc::validation, "m too small for n_Q = ceil(sqrt(m))");
    const double produced = (double(m) - double(n_q)) * h_low;
    return produced / double(seed_cost(m, n_q));
}

namespace {

// Shared run loop; `measure` yields the block at [offset, offset+size) with
// check positions flagged in the mask.
template <typename MeasureFn>
RunReport run_core(const ProtocolConfig& cfg, MeasureFn&& measure) {
    require(cfg.m >= 4, errc::validation, "run needs at least 4 measurements");
    require(cfg.recalibration_block >= 4, errc::validation,
            "recalibration block must be >= 4");
    require(cfg.partition.bit_depth >= 1, errc::validation, "partition not configured");

    // Block plan: every block of size in [B, 2B).
    std::vector<std::pair<uint64_t, uint64_t>> plan;
    const uint64_t block = std::min(cfg.recalibration_block, cfg.m);
    uint64_t off = 0;
    while (cfg.m - off >= 2 * block) {
        plan.push_back({off, block});
        off += block;
    }
    plan.push_back({off, cfg.m - off});

    SeedStream seed = SeedStream::prng(cfg.seed, cfg.seed_budget_bits);
    RunReport run;
    const Partition& part = cfg.partition;
    std::vector<uint64_t> pooled(size_t(2 * (part.m_index + 1) + 1), 0);
    double weighted_h = 0.0, weight_sum = 0.0;

    for (size_t bi = 0; bi < plan.size(); ++bi) {
        const auto [offset, size] = plan[bi];
        const uint64_t n_q = cfg.n_q ? cfg.n_q : isqrt_ceil(size);
        require(n_q >= 1 && n_q < size, errc::validation,
                "n_Q must satisfy 1 <= n_Q < block size");

        const uint64_t before = seed.consumed_bits();
        std::vector<uint64_t> checks;
        try {
            checks = select_check_instants(size, n_q, seed);
        } catch (const Error& e) {
            if (e.code() == errc::insufficient_data) {
                run.seed_exhausted = true;
                break;
            }
            throw;
        }

        std::vector<uint8_t> mask(size_t(size), 0);
        for (uint64_t c : checks) mask[size_t(c)] = 1;
        SampleBlock samples = measure(offset, size, mask, uint64_t(bi));
        require(samples.symbols.size() == size, errc::internal, "measure size mismatch");

        BlockTrace trace;
        trace.index = bi;
        trace.offset = offset;
        trace.size = size;
        trace.n_check = n_q;
        trace.entropy = certify(samples, checks, cfg.estimator);
        trace.t_bits = seed.consumed_bits() - before;
        trace.r_sec = secure_rate(size, n_q, trace.entropy.h_low, trace.t_bits);
        trace.data_symbols.reserve(size_t(size - n_q));
        for (uint64_t i = 0; i < size; ++i)
            if (!mask[size_t(i)]) trace.data_symbols.push_back(samples.symbols[size_t(i)]);
        for (uint64_t c : checks)
            pooled[size_t(samples.symbols[size_t(c)] + part.m_index + 1)] += 1;

        const double w = double(size - n_q);
        weighted_h += w * std::max(0.0, trace.entropy.h_low);
        weight_sum += w;
        run.measurements_used += size;
        run.blocks.push_back(std::move(trace));
    }

    run.t_bits = seed.consumed_bits();
    if (!run.blocks.empty()) {
        run.entropy = certify_counts(DiscreteDistribution::counts(part, std::move(pooled)),
                                     cfg.estimator);
        // Rate-determining bound: extraction-weighted average of clamped
        // per-block values; keeps r_sec <= h_low unconditionally.
        run.entropy.h_low = weighted_h / weight_sum;
        run.entropy.guessing_prob = std::min(1.0, std::exp2(-run.entropy.h_low));
        run.r_sec = std::max(0.0, (weighted_h - double(run.t_bits)) /
                                      double(run.measurements_used));
    }
    return run;
}

} // namespace

RunReport run_protocol(const ProtocolConfig& config, const GaussianState& source,
                       uint64_t sample_seed) {
    return run_core(config, [&](uint64_t offset, uint64_t size,
                                const std::vector<uint8_t>& mask, uint64_t bi) {
        (void)offset;
        (void)size;
        return sample_switched(source, config.partition, mask, subseed(sample_seed, bi));
    });
}

RunReport run_protocol(const ProtocolConfig& config, const SampleBlock& recorded) {
    require(recorded.symbols.size() >= config.m, errc::insufficient_data,
            "recorded block shorter than configured run length");
    require(recorded.partition.bit_depth == config.partition.bit_depth &&
                recorded.partition.centered == config.partition.centered &&
                recorded.partition.p_max == config.partition.p_max,
            errc::validation, "recorded partition differs from configured partition");
    return run_core(config, [&](uint64_t offset, uint64_t size,
                                const std::vector<uint8_t>& mask, uint64_t) {
        SampleBlock slice;
        slice.partition = recorded.partition;
        slice.source = recorded.source;
        slice.seed = recorded.seed;
        slice.symbols.assign(recorded.symbols.begin() + ptrdiff_t(offset),
                             recorded.symbols.begin() + ptrdiff_t(offset + size));
        if (!recorded.is_check.empty()) {
            slice.is_check.assign(recorded.is_check.begin() + ptrdiff_t(offset),
                                  recorded.is_check.begin() + ptrdiff_t(offset + size));
            for (uint64_t i = 0; i < size; ++i)
                require(slice.is_check[size_t(i)] == mask[size_t(i)], errc::validation,
                        "recorded quadrature tags disagree with selected check instants");
        }
        return slice;
    });
}

} // namespace qrng

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "core/bigint.hpp"
#include "core/entropy.hpp"
#include "core/errors.hpp"
#include "core/gaussian.hpp"
#include "core/protocol.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace qrng;

namespace {

// Feeds an explicit rank into the unranking map, little-endian bit order.
std::vector<uint64_t> select_at_rank(uint64_t m, uint64_t n, uint64_t rank) {
    const uint64_t t = seed_cost(m, n);
    std::vector<uint8_t> bytes(size_t((t + 7) / 8), 0);
    for (uint64_t i = 0; i < 64 && i < 8 * bytes.size(); ++i)
        if ((rank >> i) & 1) bytes[size_t(i / 8)] |= uint8_t(1u << (i % 8));
    SeedStream s = SeedStream::from_bytes(std::move(bytes));
    return select_check_instants(m, n, s);
}

uint64_t rank_as_u64(uint64_t m, const std::vector<uint64_t>& subset) {
    return subset_rank(m, subset).to_u64();
}

} // namespace

TEST_SUITE("protocol") {

TEST_CASE("seed stream: bit order and budget accounting") {
    SeedStream s = SeedStream::from_bytes({0xA5});
    CHECK(s.budget_bits() == 8);
    CHECK(s.take(1).to_string() == "1");
    CHECK(s.take(3).to_string() == "2");
    CHECK(s.take(4).to_string() == "10");
    CHECK(s.consumed_bits() == 8);
    CHECK(testutil::code_of([&] { s.take(1); }) == errc::insufficient_data);

    CHECK(testutil::code_of([] { SeedStream::from_bytes({}); }) == errc::validation);
    SeedStream z = SeedStream::from_bytes({0x00});
    CHECK(testutil::code_of([&] { z.take(0); }) == errc::validation);

    SeedStream p = SeedStream::prng(9, 100);
    p.take(64);
    p.take(36);
    CHECK(p.consumed_bits() == 100);
    CHECK(testutil::code_of([&] { p.take(1); }) == errc::insufficient_data);

    SeedStream a = SeedStream::prng(7);
    SeedStream b = SeedStream::prng(7);
    CHECK(a.take(130).to_string() == b.take(130).to_string());
    SeedStream c = SeedStream::prng(8);
    CHECK(a.take(130).to_string() != c.take(130).to_string());
}

TEST_CASE("seed_cost: fixtures across both evaluation paths") {
    CHECK(seed_cost(2, 1) == 1);
    CHECK(seed_cost(16, 4) == 11);
    CHECK(seed_cost(100, 10) == 44);
    CHECK(seed_cost(1024, 32) == 202);
    CHECK(seed_cost(10000, 100) == 804);
    CHECK(seed_cost(uint64_t{1} << 22, 2048) == 25476);
    CHECK(seed_cost(615514112, 24810) == 397975);

    CHECK(testutil::code_of([] { seed_cost(10, 0); }) == errc::validation);
    CHECK(testutil::code_of([] { seed_cost(10, 10); }) == errc::validation);
}

TEST_CASE("subset selection: exhaustive bijection for m <= 12") {
    for (uint64_t m = 2; m <= 12; ++m) {
        for (uint64_t n = 1; n < m; ++n) {
            const uint64_t count = binomial(m, n).to_u64();
            for (uint64_t r = 0; r < count; ++r) {
                std::vector<uint64_t> sub = select_at_rank(m, n, r);
                REQUIRE(sub.size() == n);
                CHECK(std::is_sorted(sub.begin(), sub.end()));
                CHECK(sub.back() < m);
                for (size_t i = 1; i < sub.size(); ++i) CHECK(sub[i] != sub[i - 1]);
                CHECK(rank_as_u64(m, sub) == r);
            }
        }
    }
}

TEST_CASE("subset selection: rank anchors") {
    CHECK(select_at_rank(5, 2, 0) == std::vector<uint64_t>{0, 1});
    CHECK(select_at_rank(5, 2, 9) == std::vector<uint64_t>{3, 4});
    CHECK(select_at_rank(12, 4, 0) == std::vector<uint64_t>{0, 1, 2, 3});
    CHECK(select_at_rank(12, 4, 494) == std::vector<uint64_t>{8, 9, 10, 11});
}

TEST_CASE("subset selection: uniform coverage at m=6, n=3") {
    std::vector<uint64_t> hits(6, 0);
    for (uint64_t r = 0; r < 20; ++r)
        for (uint64_t v : select_at_rank(6, 3, r)) hits[size_t(v)] += 1;
    for (uint64_t h : hits) CHECK(h == 10); // C(5,2) appearances per index
}

TEST_CASE("subset selection: full round-trip at m=100, n=3") {
    for (uint64_t r = 0; r < 161700; ++r) {
        std::vector<uint64_t> sub = select_at_rank(100, 3, r);
        REQUIRE(sub.size() == 3);
        CHECK(rank_as_u64(100, sub) == r);
    }
}

TEST_CASE("subset selection: large draws are valid and deterministic") {
    struct Case {
        uint64_t m, n;
    };
    for (Case cs : {Case{520, 5}, Case{4096, 37}, Case{65536, 257}}) {
        SeedStream s1 = SeedStream::prng(3);
        SeedStream s2 = SeedStream::prng(3);
        std::vector<uint64_t> a = select_check_instants(cs.m, cs.n, s1);
        std::vector<uint64_t> b = select_check_instants(cs.m, cs.n, s2);
        CHECK(a == b);
        REQUIRE(a.size() == cs.n);
        CHECK(std::is_sorted(a.begin(), a.end()));
        CHECK(a.back() < cs.m);
        for (size_t i = 1; i < a.size(); ++i) CHECK(a[i] != a[i - 1]);
        CHECK(subset_rank(cs.m, a) < binomial(cs.m, cs.n));
        std::vector<uint64_t> again =
            select_at_rank(cs.m, cs.n, 0); // rank 0 sanity alongside
        CHECK(again.front() == 0);
    }

    SeedStream big1 = SeedStream::prng(11);
    SeedStream big2 = SeedStream::prng(11);
    std::vector<uint64_t> g1 = select_check_instants(uint64_t{1} << 22, 2048, big1);
    std::vector<uint64_t> g2 = select_check_instants(uint64_t{1} << 22, 2048, big2);
    CHECK(g1 == g2);
    REQUIRE(g1.size() == 2048);
    CHECK(std::is_sorted(g1.begin(), g1.end()));
    CHECK(g1.back() < (uint64_t{1} << 22));

    CHECK(testutil::code_of([] {
        SeedStream s = SeedStream::prng(1);
        select_check_instants(10, 0, s);
    }) == errc::validation);
    CHECK(testutil::code_of([] {
        SeedStream s = SeedStream::prng(1);
        select_check_instants((uint64_t{1} << 31) + 1, 2, s);
    }) == errc::validation);

    CHECK(testutil::code_of([] { subset_rank(10, {3, 1}); }) == errc::validation);
    CHECK(testutil::code_of([] { subset_rank(10, {1, 10}); }) == errc::validation);
    CHECK(testutil::code_of([] { subset_rank(10, {1, 1, 2}); }) == errc::validation);
}

TEST_CASE("secure_rate and seed_expansion_ratio") {
    CHECK(secure_rate(615514112, 24810, 1.3629, 397975) ==
          doctest::Approx(1.362198491227769).epsilon(1e-12));
    CHECK(secure_rate(100, 10, 0.001, 1000) == 0.0);
    CHECK(secure_rate(100, 10, -0.5, 0) == 0.0);
    CHECK(testutil::code_of([] { secure_rate(10, 10, 1.0, 0); }) == errc::validation);

    CHECK(seed_expansion_ratio(615514112, 1.3629) ==
          doctest::Approx(2107.7966447536).epsilon(1e-10));
    double prev = 0.0;
    for (int k = 10; k <= 24; k += 2) {
        double r = seed_expansion_ratio(uint64_t{1} << k, 1.3629);
        CHECK(r > 1.0);
        CHECK(r > prev);
        prev = r;
    }
    CHECK(testutil::code_of([] { seed_expansion_ratio(1 << 20, 0.0); }) == errc::validation);
    CHECK(testutil::code_of([] { seed_expansion_ratio(2, 1.0); }) == errc::validation);
}

TEST_CASE("certify: sampled checks approach the exact law") {
    Partition part(8, 12.8, false); // delta = 0.1
    GaussianState vac = GaussianState::vacuum();
    EntropyReport exact = certify(bin_probabilities(0.5, part));

    SampleBlock blk = sample_quadrature(vac, true, part, 1000000, 424242);
    std::vector<uint64_t> idx(blk.symbols.size());
    std::iota(idx.begin(), idx.end(), 0);
    EntropyReport sampled = certify(blk, idx, Estimator::plugin);

    CHECK(sampled.n_check == 1000000);
    CHECK(sampled.estimator == Estimator::plugin);
    CHECK(std::abs(sampled.h_low - exact.h_low) < 0.05);
    CHECK(std::abs(sampled.h_inf - exact.h_inf) < 0.05);
    CHECK(sampled.c.log2_inv_c == doctest::Approx(exact.c.log2_inv_c).epsilon(1e-12));

    // The Dirichlet prior inflates h_max by O(K/sqrt(N)) over ~260 outcomes,
    // so the bayesian window is wider but still anchored to the exact law.
    EntropyReport bayes = certify(blk, idx, Estimator::bayesian);
    CHECK(bayes.h_max >= sampled.h_max);
    CHECK(std::abs(bayes.h_low - exact.h_low) < 0.1);
}

TEST_CASE("certify: bayesian dominates plugin on sparse counts") {
    Partition part(5, 7.424621202458749, false);
    GaussianState st = GaussianState::empirical(0.677);
    EntropyReport exact = certify(bin_probabilities(0.677, part));

    SampleBlock blk = sample_quadrature(st, true, part, 25000, 31337);
    std::vector<uint64_t> idx(blk.symbols.size());
    std::iota(idx.begin(), idx.end(), 0);
    EntropyReport plug = certify(blk, idx, Estimator::plugin);
    EntropyReport bayes = certify(blk, idx, Estimator::bayesian);

    CHECK(bayes.h_max >= plug.h_max);
    CHECK(std::abs(plug.h_max - exact.h_max) < 0.1);
    CHECK(std::abs(bayes.h_max - exact.h_max) < 0.1);
}

TEST_CASE("certify: squeezed and thermal twins split only in Q") {
    auto [sq, th] = squeezed_thermal_pair(2.0);
    Partition part(5, 3.52, false); // delta = 0.22

    EntropyReport sq_p = certify(bin_probabilities(sq.sigma2_p, part));
    EntropyReport th_p = certify(bin_probabilities(th.sigma2_p, part));
    CHECK(sq_p.h_inf == doctest::Approx(th_p.h_inf).epsilon(1e-12));

    EntropyReport sq_q = certify(bin_probabilities(sq.sigma2_q, part));
    EntropyReport th_q = certify(bin_probabilities(th.sigma2_q, part));
    CHECK(th_q.h_inf - sq_q.h_inf > 1.0);
}

TEST_CASE("certify: rejection paths") {
    Partition part(4, 6.4, false);
    GaussianState st = GaussianState::empirical(0.7);
    SampleBlock blk = sample_quadrature(st, true, part, 64, 5);

    std::vector<uint64_t> idx(blk.symbols.size());
    std::iota(idx.begin(), idx.end(), 0);
    CHECK(testutil::code_of([&] { certify(blk, {}, Estimator::bayesian); }) ==
          errc::insufficient_data);
    CHECK(testutil::code_of([&] { certify(blk, idx, Estimator::exact); }) == errc::validation);
    CHECK(testutil::code_of([&] { certify(blk, {9999}, Estimator::plugin); }) ==
          errc::validation);

    std::vector<uint8_t> mask(64, 0);
    mask[3] = 1;
    SampleBlock mixed = sample_switched(st, part, mask, 6);
    CHECK(testutil::code_of([&] { certify(mixed, {2}, Estimator::plugin); }) ==
          errc::validation); // untagged index named as check

    DiscreteDistribution cd = tally(blk, false);
    CHECK(testutil::code_of([&] { certify(cd); }) == errc::validation);
}

TEST_CASE("run_protocol: block plan and rate accounting") {
    ProtocolConfig cfg;
    cfg.m = 3149;
    cfg.recalibration_block = 1024;
    cfg.n_q = 256;
    cfg.partition = Partition(5, 7.424621202458749, false);
    cfg.estimator = Estimator::bayesian;
    cfg.seed = 4;
    GaussianState st = GaussianState::empirical(0.677);

    RunReport run = run_protocol(cfg, st, 40);
    REQUIRE(run.blocks.size() == 3);
    CHECK(run.blocks[0].offset == 0);
    CHECK(run.blocks[0].size == 1024);
    CHECK(run.blocks[1].offset == 1024);
    CHECK(run.blocks[1].size == 1024);
    CHECK(run.blocks[2].offset == 2048);
    CHECK(run.blocks[2].size == 1101);
    CHECK(run.measurements_used == 3149);
    CHECK_FALSE(run.seed_exhausted);
    CHECK(run.entropy.n_check == 3 * 256);

    uint64_t t_sum = 0;
    double weighted = 0.0, weights = 0.0;
    for (const BlockTrace& b : run.blocks) {
        CHECK(b.n_check == 256);
        CHECK(b.data_symbols.size() == b.size - b.n_check);
        t_sum += b.t_bits;
        double expect =
            std::max(0.0, (double(b.size - b.n_check) * b.entropy.h_low - double(b.t_bits)) /
                              double(b.size));
        CHECK(b.r_sec == doctest::Approx(expect).epsilon(1e-12));
        weighted += double(b.size - b.n_check) * std::max(0.0, b.entropy.h_low);
        weights += double(b.size - b.n_check);
    }
    CHECK(run.t_bits == t_sum);
    CHECK(run.entropy.h_low == doctest::Approx(weighted / weights).epsilon(1e-12));
    CHECK(run.r_sec ==
          doctest::Approx(std::max(0.0, (weighted - double(run.t_bits)) / 3149.0))
              .epsilon(1e-12));
    CHECK(run.r_sec <= run.entropy.h_low);

    RunReport again = run_protocol(cfg, st, 40);
    CHECK(again.entropy.h_low == run.entropy.h_low);
    CHECK(again.t_bits == run.t_bits);
    REQUIRE(again.blocks.size() == 3);
    CHECK(again.blocks[2].data_symbols == run.blocks[2].data_symbols);

    RunReport other = run_protocol(cfg, st, 41);
    CHECK(other.blocks[0].data_symbols != run.blocks[0].data_symbols);
}

TEST_CASE("run_protocol: seed budget exhaustion") {
    ProtocolConfig cfg;
    cfg.m = 8192;
    cfg.recalibration_block = 4096;
    cfg.partition = Partition(5, 7.424621202458749, false);
    cfg.seed = 12;
    GaussianState st = GaussianState::empirical(0.677);

    // Replay the stream to learn the exact bit spend of each selection.
    SeedStream probe = SeedStream::prng(cfg.seed);
    select_check_instants(4096, 64, probe);
    const uint64_t t1 = probe.consumed_bits();
    select_check_instants(4096, 64, probe);
    const uint64_t t2 = probe.consumed_bits() - t1;

    cfg.seed_budget_bits = t1 + t2;
    RunReport full = run_protocol(cfg, st, 50);
    CHECK_FALSE(full.seed_exhausted);
    CHECK(full.blocks.size() == 2);
    CHECK(full.t_bits == t1 + t2);

    cfg.seed_budget_bits = t1 + 10;
    RunReport partial = run_protocol(cfg, st, 50);
    CHECK(partial.seed_exhausted);
    REQUIRE(partial.blocks.size() == 1);
    CHECK(partial.measurements_used == 4096);
    CHECK(partial.t_bits == t1);

    cfg.seed_budget_bits = 10;
    RunReport none = run_protocol(cfg, st, 50);
    CHECK(none.seed_exhausted);
    CHECK(none.blocks.empty());
    CHECK(none.measurements_used == 0);
    CHECK(none.r_sec == 0.0);
}

TEST_CASE("run_protocol: config validation") {
    GaussianState st = GaussianState::empirical(0.677);
    ProtocolConfig cfg;
    cfg.partition = Partition(4, 6.4, false);

    ProtocolConfig bad = cfg;
    bad.m = 3;
    CHECK(testutil::code_of([&] { run_protocol(bad, st, 1); }) == errc::validation);

    bad = cfg;
    bad.recalibration_block = 2;
    CHECK(testutil::code_of([&] { run_protocol(bad, st, 1); }) == errc::validation);

    bad = cfg;
    bad.partition = Partition();
    CHECK(testutil::code_of([&] { run_protocol(bad, st, 1); }) == errc::validation);

    bad = cfg;
    bad.m = 4096;
    bad.recalibration_block = 4096;
    bad.n_q = 4096;
    CHECK(testutil::code_of([&] { run_protocol(bad, st, 1); }) == errc::validation);
}

TEST_CASE("run_protocol: recorded blocks") {
    Partition part(5, 7.424621202458749, false);
    GaussianState st = GaussianState::empirical(0.677);

    SampleBlock recorded = sample_quadrature(st, false, part, 3000, 999);
    recorded.is_check.clear(); // untagged recording, split applied post hoc

    ProtocolConfig cfg;
    cfg.m = 3000;
    cfg.recalibration_block = 4096;
    cfg.partition = part;
    cfg.seed = 17;

    RunReport r1 = run_protocol(cfg, recorded);
    RunReport r2 = run_protocol(cfg, recorded);
    REQUIRE(r1.blocks.size() == 1);
    CHECK(r1.entropy.h_low == r2.entropy.h_low);
    CHECK(r1.blocks[0].data_symbols == r2.blocks[0].data_symbols);
    CHECK(r1.blocks[0].n_check == 55); // ceil(sqrt(3000))

    // The same selection certified by hand matches the run.
    SeedStream replay = SeedStream::prng(cfg.seed);
    std::vector<uint64_t> checks = select_check_instants(3000, 55, replay);
    EntropyReport manual = certify(recorded, checks, cfg.estimator);
    CHECK(manual.h_low == doctest::Approx(r1.blocks[0].entropy.h_low).epsilon(1e-12));

    // Tagged recording must agree with the seeded selection exactly.
    SampleBlock tagged = recorded;
    tagged.is_check.assign(3000, 0);
    for (uint64_t c : checks) tagged.is_check[size_t(c)] = 1;
    RunReport r3 = run_protocol(cfg, tagged);
    CHECK(r3.entropy.h_low == doctest::Approx(r1.entropy.h_low).epsilon(1e-12));

    SampleBlock flipped = tagged;
    flipped.is_check[size_t(checks[0])] = 0;
    CHECK(testutil::code_of([&] { run_protocol(cfg, flipped); }) == errc::validation);

    SampleBlock zeros = recorded;
    zeros.is_check.assign(3000, 0);
    CHECK(testutil::code_of([&] { run_protocol(cfg, zeros); }) == errc::validation);
    SampleBlock ones = recorded;
    ones.is_check.assign(3000, 1);
    CHECK(testutil::code_of([&] { run_protocol(cfg, ones); }) == errc::validation);

    ProtocolConfig wrong = cfg;
    wrong.partition = Partition(5, 7.424621202458749, true);
    CHECK(testutil::code_of([&] { run_protocol(wrong, recorded); }) == errc::validation);

    ProtocolConfig longer = cfg;
    longer.m = 3001;
    CHECK(testutil::code_of([&] { run_protocol(longer, recorded); }) == errc::insufficient_data);
}

} // TEST_SUITE

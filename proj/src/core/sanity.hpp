#pragma once

#include <string>
#include <vector>

#include "core/extractor.hpp"

namespace qrng {

struct SanityResult {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

// Three-test battery at 1% overall significance per test: monobit |S|/sqrt(n),
// runs-count z-score, and lag-k autocorrelation z for k in 1..16 (reported as
// the worst lag; the threshold carries the 16-way Bonferroni correction).
// Needs at least 1e5 bits.
std::vector<SanityResult> sanity_tests(const BitStream& bits);

bool sanity_all_pass(const std::vector<SanityResult>& results);

} // namespace qrng

#pragma once

#include <cstdint>
#include <string>

#include "core/gaussian.hpp"

namespace qrng {

// Measurement-incompatibility constant of the entropic uncertainty bound:
// c = (dq*dp / 2pi) * S0(1, dq*dp/4)^2, with S0 the 0th radial prolate
// spheroidal wavefunction of the first kind.
struct OverlapConstant {
    double delta_q = 0.0;
    double delta_p = 0.0;
    double c = 0.0;
    double s0 = 0.0;
    double log2_inv_c = 0.0; // -log2(c), the bound's additive term
};

OverlapConstant overlap_constant(double delta_q, double delta_p);

enum class Estimator { exact, plugin, bayesian };

std::string estimator_name(Estimator e);
Estimator estimator_from_name(const std::string& name);

// Certified-entropy summary for one block of check data.
struct EntropyReport {
    double h_inf = 0.0;       // classical min-entropy, bits per measurement
    double h_max = 0.0;       // max-entropy (Renyi-1/2) estimate, bits
    double h_low = 0.0;       // h_low = -log2(c) - h_max; may be negative
    double guessing_prob = 0.0; // 2^{-h_low} capped at 1
    OverlapConstant c;
    double tail_error = 0.0;
    Estimator estimator = Estimator::exact;
    uint64_t n_check = 0;
};

// -log2 of the largest bin mass; probability form required.
double classical_min_entropy(const DiscreteDistribution& dist);

// 2*log2 sum_k sqrt(p_k) over interior and overflow bins; probability form.
double max_entropy(const DiscreteDistribution& dist);

// Max-entropy from empirical counts. plugin = relative frequencies;
// bayesian = posterior means (n_k + 1/2)/(N + K/2) under a Dirichlet(1/2)
// prior over the K realizable outcomes.
double estimate_max_entropy(const DiscreteDistribution& counts, Estimator estimator);

// h_low = -log2(c) - h_max; negative values reported as-is.
EntropyReport min_entropy_lower_bound(double delta_q, double delta_p, double h_max);

// Small-delta closed forms for a thermal-like source of variance (1+2mu)/2.
struct AnalyticEntropies {
    double h_inf_approx = 0.0;
    double h_low_approx = 0.0;
    double asymptotic_gap = 0.0; // log2(1+2mu)
    bool approximation_valid = true; // false when delta exceeds sigma
};

AnalyticEntropies analytic_entropies(double mu, double delta);

// Jacobi theta_3(0, e^{-t}) for t > 0.
double theta3_exp(double t);

// Finite-range error proxy: sqrt(N) * P(|X| > p_max) for X ~ N(0, sigma^2).
double tail_error_bound(double sigma, const Partition& part, uint64_t n_samples);

} // namespace qrng

#include "core/entropy.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/spheroidal.hpp"

namespace qrng {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
} // namespace

OverlapConstant overlap_constant(double delta_q, double delta_p) {
    require(delta_q > 0.0 && delta_p > 0.0 && std::isfinite(delta_q) && std::isfinite(delta_p),
            errc::validation, "bin widths must be positive");
    OverlapConstant oc;
    oc.delta_q = delta_q;
    oc.delta_p = delta_p;
    double cs = delta_q * delta_p / 4.0;
    // Past cs = 25 the eigenvalue sits within 1e-12 of 1, below the rejection
    // threshold, and the radial series degrades; reject before evaluating.
    require(cs <= 25.0, errc::validation,
            "overlap constant saturates at these bin widths; the bound is vacuous");
    oc.s0 = prolate_radial1_00(cs);
    oc.c = (delta_q * delta_p / (2.0 * kPi)) * oc.s0 * oc.s0;
    require(oc.c > 0.0, errc::internal, "overlap constant must be positive");
    require(oc.c < 1.0 - 1e-12, errc::validation,
            "overlap constant saturates at these bin widths; the bound is vacuous");
    oc.log2_inv_c = -std::log2(oc.c);
    return oc;
}

std::string estimator_name(Estimator e) {
    switch (e) {
        case Estimator::exact: return "exact";
        case Estimator::plugin: return "plugin";
        case Estimator::bayesian: return "bayesian";
    }
    return "unknown";
}

Estimator estimator_from_name(const std::string& name) {
    if (name == "exact") return Estimator::exact;
    if (name == "plugin") return Estimator::plugin;
    if (name == "bayesian") return Estimator::bayesian;
    fail(errc::validation, "unknown estimator: " + name);
}

double classical_min_entropy(const DiscreteDistribution& dist) {
    require(!dist.is_counts(), errc::validation, "probability-form distribution required");
    double pmax = 0.0;
    for (double p : dist.prob_data()) pmax = std::max(pmax, p);
    require(pmax > 0.0, errc::validation, "empty distribution");
    return -std::log2(pmax);
}

double max_entropy(const DiscreteDistribution& dist) {
    require(!dist.is_counts(), errc::validation, "probability-form distribution required");
    double s = 0.0;
    for (double p : dist.prob_data()) s += std::sqrt(p);
    return 2.0 * std::log2(s);
}

double estimate_max_entropy(const DiscreteDistribution& counts, Estimator estimator) {
    require(counts.is_counts(), errc::validation, "count-form distribution required");
    const uint64_t n = counts.total_count();
    require(n >= 2, errc::insufficient_data, "max-entropy estimation needs at least 2 counts");

    double s = 0.0;
    if (estimator == Estimator::plugin) {
        for (uint64_t c : counts.count_data()) s += std::sqrt(double(c) / double(n));
    } else if (estimator == Estimator::bayesian) {
        // Dirichlet(1/2) prior over the K realizable outcomes, overflow included.
        const Partition& part = counts.partition();
        const double K = double(part.outcome_count());
        const double denom = double(n) + K / 2.0;
        const int M = part.m_index;
        for (int k = -(M + 1); k <= M + 1; ++k) {
            if (!part.slot_used(k)) continue;
            s += std::sqrt((double(counts.count_at(k)) + 0.5) / denom);
        }
    } else {
        fail(errc::validation, "exact estimator requires a probability-form distribution");
    }
    return 2.0 * std::log2(s);
}

EntropyReport min_entropy_lower_bound(double delta_q, double delta_p, double h_max) {
    require(h_max >= 0.0, errc::validation, "h_max must be non-negative");
    EntropyReport rep;
    rep.c = overlap_constant(delta_q, delta_p);
    rep.h_max = h_max;
    rep.h_low = rep.c.log2_inv_c - h_max;
    rep.guessing_prob = std::min(1.0, std::exp2(-rep.h_low));
    return rep;
}

double theta3_exp(double t) {
    require(t > 0.0, errc::validation, "theta_3 argument must be positive");
    // Direct lattice sum for t >= pi; Jacobi imaginary transformation
    // theta_3(0, e^{-t}) = sqrt(pi/t) * theta_3(0, e^{-pi^2/t}) otherwise.
    if (t < kPi) return std::sqrt(kPi / t) * theta3_exp(kPi * kPi / t);
    double s = 1.0;
    for (int k = 1; k < 40; ++k) {
        double term = 2.0 * std::exp(-t * double(k) * double(k));
        s += term;
        if (term < 1e-18) break;
    }
    return s;
}

AnalyticEntropies analytic_entropies(double mu, double delta) {
    require(mu >= 0.0, errc::validation, "mean photon number must be non-negative");
    require(delta > 0.0, errc::validation, "bin width must be positive");
    const double var2 = 1.0 + 2.0 * mu; // 2 sigma^2
    AnalyticEntropies out;
    out.h_inf_approx = -std::log2(delta / std::sqrt(kPi * var2));
    double theta = theta3_exp(delta * delta / (2.0 * var2));
    out.h_low_approx = out.h_inf_approx - 2.0 * std::log2(delta / std::sqrt(2.0 * kPi) * theta);
    out.asymptotic_gap = std::log2(var2);
    out.approximation_valid = delta <= std::sqrt(var2 / 2.0);
    return out;
}

double tail_error_bound(double sigma, const Partition& part, uint64_t n_samples) {
    require(sigma > 0.0, errc::validation, "sigma must be positive");
    require(n_samples >= 1, errc::validation, "sample count must be >= 1");
    double p_m = std::erfc(part.p_max / (sigma * std::sqrt(2.0)));
    return std::sqrt(double(n_samples)) * p_m;
}

} // namespace qrng

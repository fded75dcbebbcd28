#include "core/spheroidal.hpp"

#include <cmath>
#include <vector>

#include "core/errors.hpp"

namespace qrng {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Legendre-series coefficients of the m = 0 spheroidal wave equation,
// restricted to even order r. The expansion S(x) = sum_r d_r P_r(x) turns the
// differential equation into A_r d_{r+2} + (B_r - chi) d_r + C_r d_{r-2} = 0.
struct Recurrence {
    double c2;
    double A(int r) const {
        return double(r + 2) * double(r + 1) * c2 / (double(2 * r + 3) * double(2 * r + 5));
    }
    double B(int r) const {
        return double(r) * double(r + 1) +
               c2 * (2.0 * double(r) * double(r + 1) - 1.0) /
                   (double(2 * r - 1) * double(2 * r + 3));
    }
    double C(int r) const {
        return c2 * double(r) * double(r - 1) / (double(2 * r - 3) * double(2 * r - 1));
    }
};

// Spherical Bessel j_0..j_n at x > 0. Ascending power series per order for
// x <= 1; downward Miller recurrence with sum normalization
// Sum (2k+1) j_k^2 = 1 otherwise. Deep-underflow orders come out as clean
// zeros, which the truncated Legendre series relies on.
std::vector<double> sph_bessel_array(int n, double x) {
    std::vector<double> out(size_t(n) + 1, 0.0);
    if (x <= 1.0) {
        double lead = 1.0; // x^k / (2k+1)!!
        for (int k = 0; k <= n; ++k) {
            if (k > 0) lead *= x / double(2 * k + 1);
            if (lead == 0.0) break;
            double sum = 1.0, term = 1.0;
            for (int s = 1; s < 60; ++s) {
                term *= -0.5 * x * x / (double(s) * double(2 * k + 2 * s + 1));
                sum += term;
                if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            }
            out[size_t(k)] = lead * sum;
        }
        return out;
    }
    const int start = n + 24 + int(x + 8.0 * std::sqrt(double(n) + x + 1.0));
    double above = 0.0;      // b_{k+1}
    double here = 1e-280;    // b_k, arbitrary seed scale
    double norm = 0.0;       // running sum of (2k+1) b_k^2
    for (int k = start; k >= 0; --k) {
        norm += (2.0 * k + 1.0) * here * here;
        if (k <= n) out[size_t(k)] = here;
        double below = (2.0 * k + 1.0) / x * here - above;
        above = here;
        here = below;
        if (std::abs(here) > 1e130) {
            const double s = 1e-130;
            here *= s;
            above *= s;
            norm *= s * s;
            for (int j = std::min(k, n); j <= n; ++j) out[size_t(j)] *= s;
        }
    }
    const double factor = 1.0 / std::sqrt(norm);
    for (auto& v : out) v *= factor;
    return out;
}

// Smallest eigenvalue of the symmetric tridiagonal (diag, offdiag^2) via
// Sturm-sequence bisection; offdiag2[k] couples rows k and k+1.
double smallest_eigenvalue(const std::vector<double>& diag, const std::vector<double>& offdiag2) {
    const size_t n = diag.size();
    auto count_below = [&](double x) {
        int cnt = 0;
        double d = diag[0] - x;
        if (d == 0.0) d = -1e-300;
        cnt += d < 0.0;
        for (size_t k = 1; k < n; ++k) {
            d = diag[k] - x - offdiag2[k - 1] / d;
            if (d == 0.0) d = -1e-300;
            cnt += d < 0.0;
        }
        return cnt;
    };
    double radius = 0.0;
    for (size_t k = 0; k < n; ++k) {
        double row = std::abs(diag[k]);
        if (k > 0) row += std::sqrt(offdiag2[k - 1]);
        if (k + 1 < n) row += std::sqrt(offdiag2[k]);
        radius = std::max(radius, row);
    }
    double lo = -radius, hi = radius;
    for (int it = 0; it < 250 && lo < hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (count_below(mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double prolate_radial1_00(double c, double* chi00) {
    require(c > 0.0 && std::isfinite(c), errc::validation, "spheroidal parameter must be positive");

    const Recurrence rec{c * c};
    const int K = 40 + int(2.0 * c); // even orders r = 0, 2, ..., 2(K-1)

    std::vector<double> diag(K), offdiag2(K - 1);
    for (int k = 0; k < K; ++k) diag[k] = rec.B(2 * k);
    for (int k = 0; k + 1 < K; ++k) offdiag2[k] = rec.A(2 * k) * rec.C(2 * k + 2);

    const double chi = smallest_eigenvalue(diag, offdiag2);
    if (chi00) *chi00 = chi;

    // Backward recurrence selects the minimal (decaying-in-r) solution; it
    // grows toward r = 0, so periodic rescaling keeps values finite.
    std::vector<double> d(K);
    d[K - 1] = 1.0;
    d[K - 2] = -(rec.B(2 * (K - 1)) - chi) * d[K - 1] / rec.C(2 * (K - 1));
    for (int k = K - 2; k >= 1; --k) {
        d[k - 1] = -((rec.B(2 * k) - chi) * d[k] + rec.A(2 * k) * d[k + 1]) / rec.C(2 * k);
        if (std::abs(d[k - 1]) > 1e250) {
            for (int j = k - 1; j < K; ++j) d[j] *= 1e-250;
        }
    }

    const std::vector<double> bessel = sph_bessel_array(2 * (K - 1), c);
    double num = 0.0, den = 0.0;
    for (int k = 0; k < K; ++k) {
        den += d[k];
        num += (k % 2 == 0 ? d[k] : -d[k]) * bessel[size_t(2 * k)];
    }
    require(den != 0.0 && std::isfinite(num / den), errc::internal,
            "spheroidal series failed to converge");
    return num / den;
}

double sinc_kernel_top_eigenvalue(double c) {
    double r = prolate_radial1_00(c);
    return (2.0 * c / kPi) * r * r;
}

} // namespace qrng

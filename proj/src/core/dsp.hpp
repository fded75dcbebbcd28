#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qrng {

struct SignalStream {
    std::vector<double> samples;
    double sample_rate = 0.0; // Hz
    std::string origin = "simulated";
};

// Multiplies by a real cosine carrier at f0; sample rate unchanged.
SignalStream downmix(const SignalStream& in, double f0);

// Linear-phase windowed-sinc low-pass, unity DC gain. Output drops the
// taps-1 startup transient (valid-mode convolution).
SignalStream fir_lowpass(const SignalStream& in, double cutoff, int taps);

// Keeps every factor-th sample.
SignalStream downsample(const SignalStream& in, int factor);

// Normalized autocorrelation rho_0..rho_max_lag, rho_0 = 1.
std::vector<double> autocorrelation(const SignalStream& in, int max_lag);

// Kaiser-windowed sinc taps (sum normalized to 1); exposed for response tests.
std::vector<double> lowpass_taps(double cutoff, double sample_rate, int taps);

// Linear shot-noise fit over the detected linear region.
struct CalibrationFit {
    double slope = 0.0;        // V^2/W
    double intercept = 0.0;    // V^2, classical-noise floor
    double slope_se = 0.0;     // standard errors of the fit
    double intercept_se = 0.0;
    double p_low = 0.0, p_high = 0.0; // linear range, W
    bool saturation_detected = false;
};

// points: (LO power W, measured variance V^2). Grows the fitted prefix until
// a point's residual exceeds 3x the linear-region residual spread.
CalibrationFit shot_noise_calibration(std::vector<std::pair<double, double>> points);

// White Gaussian noise stream (simulated receiver input).
SignalStream gaussian_noise(double variance, double sample_rate, uint64_t count, uint64_t seed);

// Gaussian noise with an exactly flat band-limited spectrum (Fourier
// synthesis): power uniform over |f| <= bandwidth, zero beyond. Its
// autocorrelation is sinc(2*bandwidth*k/rate); decimating on the sinc zeros
// decorrelates the stream.
SignalStream bandlimited_noise(double variance, double bandwidth, double sample_rate,
                               uint64_t count, uint64_t seed);

} // namespace qrng

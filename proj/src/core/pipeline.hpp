#pragma once

#include <string>

#include "json.hpp"

#include "core/dsp.hpp"
#include "core/extractor.hpp"
#include "core/protocol.hpp"
#include "core/report.hpp"

namespace qrng {

// Simulated Gaussian source or a raw capture file to ingest.
struct SourceSpec {
    std::string kind = "vacuum"; // vacuum | thermal | squeezed | empirical | file
    double parameter = 0.0;      // mu | zeta | sigma^2
    std::string path;            // raw i16 file for kind == "file"
    uint64_t seed = 1;           // sampling seed for simulated kinds
};

struct DspParams {
    double sample_rate = 5e9; // Hz, before decimation
    double f0 = 0.0;          // downmix carrier; 0 = already at baseband
    double cutoff = 625e6;    // FIR low-pass cutoff, Hz
    int taps = 129;
    int downsample = 4;
    double bandwidth = 625e6; // simulated band-limited noise bandwidth, Hz
    double variance = 1.0;    // simulated noise variance
    uint64_t count = 1u << 20; // samples to synthesize when no input file
};

struct OutputPaths {
    std::string report;       // JSON run report
    std::string bits;         // packed extracted bits
    std::string raw;          // raw i16 stream (simulate / downconvert)
    std::string blocks_csv;   // per-block trace
    std::string autocorr_csv; // lag, rho rows
    std::string sweep_csv;    // sweep grid rows
};

struct PipelineConfig {
    SourceSpec source;
    DspParams dsp;
    ProtocolConfig protocol;   // partition lives here
    ExtractorParams extractor; // extractor.b == 0 means "use partition bit depth"
    OutputPaths output;
};

// Strict parse: unknown keys and out-of-range values are validation errors.
// Missing keys keep defaults. config_to_json(config_from_json(j)) is total.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::string& path);

GaussianState state_from_source(const SourceSpec& source);

// Command runners; each returns the JSON it wrote (or would write) so callers
// can print or post-process without re-reading files.

// Quadrature waveform of the simulated source, written as raw i16 with the
// partition range as full scale.
nlohmann::json run_simulate(const PipelineConfig& cfg);

// Downmix, low-pass, decimate; emits the processed raw stream and its
// autocorrelation trace. Simulated band-limited noise stands in for hardware
// input when no file is given.
nlohmann::json run_downconvert(const PipelineConfig& cfg);

// Certification only: protocol run, JSON report, per-block CSV.
nlohmann::json run_certify(const PipelineConfig& cfg);

// Full pipeline: certify, then per-block two-universal extraction, sanity
// tests on the concatenated output, bit file, and extended report. Blocks
// whose certified bound is not positive contribute no output; per-measurement
// entropy is capped at the encoded width b before sizing the output.
nlohmann::json run_extract(const PipelineConfig& cfg);

// Reproduction grids: "overlap" (delta, c, -log2 c), "entropy" (bit depth x
// check fraction, mean certified bound over 200 random check subsets), and
// "variance" (exact bounds vs. source variance at the configured partition).
nlohmann::json run_sweep(const PipelineConfig& cfg, const std::string& grid);

// Fast invariant battery plus a hash-throughput measurement; "ok" is the
// conjunction of every check.
nlohmann::json run_selftest(const PipelineConfig& cfg);

} // namespace qrng

// Command-line front end. All work happens behind the C API; this file only
// marshals flags into the JSON configuration and prints results.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "qrng.h"

namespace {

using nlohmann::json;

struct Options {
    std::string config_path;
    json patch = json::object();
    std::string grid = "overlap";
};

void set_path(json& j, const char* section, const char* key, const json& value) {
    j[section][key] = value;
}

// Registers a flag that lands at config[section][key] when the user passes it.
template <typename T>
void add_opt(CLI::App* cmd, Options& opt, const std::string& flag, const char* section,
             const char* key, const std::string& help) {
    auto cb = [&opt, section, key](const T& value) { set_path(opt.patch, section, key, value); };
    cmd->add_option_function<T>(flag, cb, help);
}

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path, "JSON configuration file; flags override it");

    add_opt<std::string>(cmd, opt, "--source-kind", "source", "kind",
                         "vacuum|thermal|squeezed|empirical|file");
    add_opt<double>(cmd, opt, "--source-parameter", "source", "parameter",
                    "mu, zeta, or sigma^2 of the simulated state");
    add_opt<std::string>(cmd, opt, "--source-path", "source", "path", "raw i16 input file");
    add_opt<uint64_t>(cmd, opt, "--source-seed", "source", "seed", "sampling seed");

    add_opt<double>(cmd, opt, "--sample-rate", "dsp", "sample_rate", "input rate, Hz");
    add_opt<double>(cmd, opt, "--f0", "dsp", "f0", "downmix carrier, Hz (0 = baseband)");
    add_opt<double>(cmd, opt, "--cutoff", "dsp", "cutoff", "FIR cutoff, Hz");
    add_opt<int>(cmd, opt, "--taps", "dsp", "taps", "FIR tap count (odd)");
    add_opt<int>(cmd, opt, "--downsample", "dsp", "downsample", "decimation factor");
    add_opt<double>(cmd, opt, "--bandwidth", "dsp", "bandwidth", "simulated noise bandwidth, Hz");
    add_opt<double>(cmd, opt, "--noise-variance", "dsp", "variance", "simulated noise variance");
    add_opt<uint64_t>(cmd, opt, "--count", "dsp", "count", "samples to synthesize");

    add_opt<int>(cmd, opt, "--bit-depth", "partition", "bit_depth", "ADC bits per sample");
    add_opt<double>(cmd, opt, "--p-max", "partition", "p_max", "partition full scale");
    add_opt<bool>(cmd, opt, "--centered", "partition", "centered",
                  "true: bin astride origin; false: offset binning");

    add_opt<uint64_t>(cmd, opt, "--m", "protocol", "m", "measurements per run");
    add_opt<uint64_t>(cmd, opt, "--n-q", "protocol", "n_q",
                      "check instants per block (0 = ceil(sqrt(block)))");
    add_opt<std::string>(cmd, opt, "--estimator", "protocol", "estimator",
                         "exact|plugin|bayesian");
    add_opt<uint64_t>(cmd, opt, "--recalibration-block", "protocol", "recalibration_block",
                      "nominal block size B; blocks span [B, 2B)");
    add_opt<uint64_t>(cmd, opt, "--protocol-seed", "protocol", "seed", "seed-stream key");
    add_opt<uint64_t>(cmd, opt, "--seed-budget-bits", "protocol", "seed_budget_bits",
                      "hard seed budget (0 = unlimited)");

    add_opt<uint64_t>(cmd, opt, "--extractor-n", "extractor", "n", "hashed substring bits");
    add_opt<int>(cmd, opt, "--extractor-b", "extractor", "b",
                 "bits per symbol (0 = partition depth)");
    add_opt<std::string>(cmd, opt, "--matrix-mode", "extractor", "mode",
                         "per_block|fixed|toeplitz");
    add_opt<uint64_t>(cmd, opt, "--matrix-seed", "extractor", "matrix_seed", "matrix PRG key");
    add_opt<double>(cmd, opt, "--margin-bits", "extractor", "margin_bits",
                    "security margin subtracted before flooring l");

    add_opt<std::string>(cmd, opt, "--report", "output", "report", "JSON report path");
    add_opt<std::string>(cmd, opt, "--bits", "output", "bits", "packed output bits path");
    add_opt<std::string>(cmd, opt, "--raw", "output", "raw", "raw i16 output path");
    add_opt<std::string>(cmd, opt, "--blocks-csv", "output", "blocks_csv", "per-block CSV path");
    add_opt<std::string>(cmd, opt, "--autocorr-csv", "output", "autocorr_csv",
                         "autocorrelation CSV path");
    add_opt<std::string>(cmd, opt, "--sweep-csv", "output", "sweep_csv", "sweep CSV path");
}

json merge(const json& base, const json& patch) {
    json out = base;
    for (const auto& [section, overrides] : patch.items())
        for (const auto& [key, value] : overrides.items()) out[section][key] = value;
    return out;
}

int fail_with(qrng_status status) {
    std::fprintf(stderr, "error: %s\n", qrng_last_error());
    return int(status);
}

int execute(const Options& opt, const std::string& command) {
    json base = json::object();
    if (!opt.config_path.empty()) {
        qrng_run* probe = nullptr;
        // Parse the file through the library so path and schema errors carry
        // the same codes as every other failure.
        qrng_status st = qrng_run_create_from_file(opt.config_path.c_str(), &probe);
        if (st != QRNG_OK) return fail_with(st);
        qrng_run_destroy(probe);
        std::FILE* f = std::fopen(opt.config_path.c_str(), "rb");
        if (!f) {
            std::fprintf(stderr, "error: cannot open %s\n", opt.config_path.c_str());
            return int(QRNG_ERR_IO);
        }
        std::string text;
        char buf[4096];
        size_t got;
        while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, got);
        std::fclose(f);
        base = json::parse(text, nullptr, false);
        if (base.is_discarded()) {
            std::fprintf(stderr, "error: malformed JSON config\n");
            return int(QRNG_ERR_VALIDATION);
        }
    }

    const std::string config = merge(base, opt.patch).dump();
    qrng_run* run = nullptr;
    qrng_status st = qrng_run_create(config.c_str(), &run);
    if (st != QRNG_OK) return fail_with(st);

    st = qrng_run_execute(run, command.c_str());
    if (st != QRNG_OK) {
        qrng_run_destroy(run);
        return fail_with(st);
    }

    const char* result = qrng_run_result_json(run);
    std::printf("%s\n", result ? result : "{}");

    int code = 0;
    if (command == "selftest") {
        const json j = json::parse(result, nullptr, false);
        if (!j.is_discarded() && j.contains("ok") && !j.at("ok").get<bool>())
            code = int(QRNG_ERR_INTERNAL);
    }
    qrng_run_destroy(run);
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Source-device-independent quantum RNG pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qrng_version()));

    Options opt;
    struct Cmd {
        const char* name;
        const char* help;
    };
    const Cmd cmds[] = {
        {"simulate", "Write a simulated quadrature waveform as raw i16"},
        {"downconvert", "Downmix, low-pass, decimate a raw stream"},
        {"certify", "Run the certification protocol and emit the report"},
        {"extract", "Full pipeline: certify, extract, sanity-test, report"},
        {"sweep", "Reproduction grids (overlap | entropy | variance)"},
        {"selftest", "Fast invariant battery"},
    };
    for (const Cmd& c : cmds) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        add_common(sub, opt);
        if (std::string(c.name) == "sweep")
            sub->add_option("--grid", opt.grid, "overlap | entropy | variance");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the usage message
        return int(QRNG_ERR_VALIDATION);
    }

    const std::string name = app.get_subcommands().front()->get_name();
    return execute(opt, name == "sweep" ? "sweep:" + opt.grid : name);
}

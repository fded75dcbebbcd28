#include "qrng.h"

#include <memory>
#include <new>
#include <string>

#include "core/entropy.hpp"
#include "core/errors.hpp"
#include "core/extractor.hpp"
#include "core/pipeline.hpp"
#include "core/protocol.hpp"

namespace {

thread_local std::string g_last_error;

template <typename Fn>
qrng_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return QRNG_OK;
    } catch (const qrng::Error& e) {
        g_last_error = e.what();
        return qrng_status(int(e.code()));
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return QRNG_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return QRNG_ERR_INTERNAL;
    }
}

bool bad_arg(bool ok, const char* what) {
    if (ok) return false;
    g_last_error = what;
    return true;
}

} // namespace

struct qrng_run {
    qrng::PipelineConfig config;
    std::string result;
    bool has_result = false;
};

extern "C" {

const char* qrng_last_error(void) { return g_last_error.c_str(); }

const char* qrng_version(void) { return "1.0.0"; }

qrng_status qrng_overlap_constant(double delta_q, double delta_p, double* c,
                                  double* neg_log2_c) {
    if (bad_arg(c || neg_log2_c, "null output pointer")) return QRNG_ERR_VALIDATION;
    return guarded([&] {
        const qrng::OverlapConstant oc = qrng::overlap_constant(delta_q, delta_p);
        if (c) *c = oc.c;
        if (neg_log2_c) *neg_log2_c = oc.log2_inv_c;
    });
}

qrng_status qrng_min_entropy_bound(double delta_q, double delta_p, double h_max,
                                   double* h_low) {
    if (bad_arg(h_low != nullptr, "null output pointer")) return QRNG_ERR_VALIDATION;
    return guarded(
        [&] { *h_low = qrng::min_entropy_lower_bound(delta_q, delta_p, h_max).h_low; });
}

qrng_status qrng_seed_cost(uint64_t m, uint64_t n_q, uint64_t* bits) {
    if (bad_arg(bits != nullptr, "null output pointer")) return QRNG_ERR_VALIDATION;
    return guarded([&] { *bits = qrng::seed_cost(m, n_q); });
}

qrng_status qrng_secure_rate(uint64_t m, uint64_t n_q, double h_low, uint64_t t_bits,
                             double* rate) {
    if (bad_arg(rate != nullptr, "null output pointer")) return QRNG_ERR_VALIDATION;
    return guarded([&] { *rate = qrng::secure_rate(m, n_q, h_low, t_bits); });
}

qrng_status qrng_seed_expansion_ratio(uint64_t m, double h_low, double* ratio) {
    if (bad_arg(ratio != nullptr, "null output pointer")) return QRNG_ERR_VALIDATION;
    return guarded([&] { *ratio = qrng::seed_expansion_ratio(m, h_low); });
}

qrng_status qrng_output_length(uint64_t n, double h_low, int b, uint64_t* l) {
    if (bad_arg(l != nullptr, "null output pointer")) return QRNG_ERR_VALIDATION;
    return guarded([&] { *l = qrng::output_length(n, h_low, b); });
}

qrng_status qrng_run_create(const char* config_json, qrng_run** out) {
    if (bad_arg(config_json && out, "null argument")) return QRNG_ERR_VALIDATION;
    *out = nullptr;
    return guarded([&] {
        nlohmann::json j = nlohmann::json::parse(config_json, nullptr, false);
        qrng::require(!j.is_discarded(), qrng::errc::validation, "malformed JSON config");
        auto run = std::make_unique<qrng_run>();
        run->config = qrng::config_from_json(j);
        *out = run.release();
    });
}

qrng_status qrng_run_create_from_file(const char* config_path, qrng_run** out) {
    if (bad_arg(config_path && out, "null argument")) return QRNG_ERR_VALIDATION;
    *out = nullptr;
    return guarded([&] {
        auto run = std::make_unique<qrng_run>();
        run->config = qrng::load_config(config_path);
        *out = run.release();
    });
}

qrng_status qrng_run_execute(qrng_run* run, const char* command) {
    if (bad_arg(run && command, "null argument")) return QRNG_ERR_VALIDATION;
    return guarded([&] {
        const std::string cmd = command;
        nlohmann::json j;
        if (cmd == "simulate") j = qrng::run_simulate(run->config);
        else if (cmd == "downconvert") j = qrng::run_downconvert(run->config);
        else if (cmd == "certify") j = qrng::run_certify(run->config);
        else if (cmd == "extract") j = qrng::run_extract(run->config);
        else if (cmd == "selftest") j = qrng::run_selftest(run->config);
        else if (cmd.rfind("sweep:", 0) == 0) j = qrng::run_sweep(run->config, cmd.substr(6));
        else qrng::fail(qrng::errc::validation, "unknown command: " + cmd);
        run->result = j.dump(2);
        run->has_result = true;
    });
}

const char* qrng_run_result_json(const qrng_run* run) {
    return (run && run->has_result) ? run->result.c_str() : nullptr;
}

void qrng_run_destroy(qrng_run* run) { delete run; }

} // extern "C"

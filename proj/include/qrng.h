#ifndef QRNG_H
#define QRNG_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; nonzero values double as CLI exit codes. */
typedef enum qrng_status {
    QRNG_OK = 0,
    QRNG_ERR_VALIDATION = 2,
    QRNG_ERR_INSUFFICIENT_DATA = 3,
    QRNG_ERR_IO = 4,
    QRNG_ERR_INTERNAL = 5
} qrng_status;

/* Message for the calling thread's most recent failure; never NULL. */
const char* qrng_last_error(void);

const char* qrng_version(void);

/* ---- scalar helpers ------------------------------------------------ */

/* Measurement-incompatibility constant c(delta_q, delta_p) and -log2(c). */
qrng_status qrng_overlap_constant(double delta_q, double delta_p, double* c,
                                  double* neg_log2_c);

/* Certified bound h_low = -log2(c) - h_max. */
qrng_status qrng_min_entropy_bound(double delta_q, double delta_p, double h_max,
                                   double* h_low);

/* Seed bits to choose n_q check instants among m: ceil(log2 C(m, n_q)). */
qrng_status qrng_seed_cost(uint64_t m, uint64_t n_q, uint64_t* bits);

/* Net secure bits per measurement: max(0, ((m - n_q) h_low - t_bits) / m). */
qrng_status qrng_secure_rate(uint64_t m, uint64_t n_q, double h_low, uint64_t t_bits,
                             double* rate);

/* Extractable-to-consumed seed ratio at n_q = ceil(sqrt(m)). */
qrng_status qrng_seed_expansion_ratio(uint64_t m, double h_low, double* ratio);

/* Extractor output bits per n-bit substring: floor(n * h_low / b). */
qrng_status qrng_output_length(uint64_t n, double h_low, int b, uint64_t* l);

/* ---- pipeline runs -------------------------------------------------- */

/* A run owns a validated configuration and the result of its last command.
 * Configuration schema: JSON with optional sections source, dsp, partition,
 * protocol, extractor, output (see README); unknown keys are rejected. */
typedef struct qrng_run qrng_run;

qrng_status qrng_run_create(const char* config_json, qrng_run** out);
qrng_status qrng_run_create_from_file(const char* config_path, qrng_run** out);

/* command: simulate | downconvert | certify | extract | selftest |
 * sweep:overlap | sweep:entropy | sweep:variance. On success the result JSON
 * is retained on the handle. */
qrng_status qrng_run_execute(qrng_run* run, const char* command);

/* JSON result of the last successful execute, or NULL if none. The pointer
 * stays valid until the next execute on the same handle or destroy. */
const char* qrng_run_result_json(const qrng_run* run);

void qrng_run_destroy(qrng_run* run);

#ifdef __cplusplus
}
#endif

#endif /* QRNG_H */

/* Compiled as C99 to prove the public header and library link without C++. */
#include <stdio.h>
#include <string.h>

#include "qrng.h"

int main(void) {
    if (qrng_version() == NULL || strlen(qrng_version()) == 0) {
        fprintf(stderr, "version missing\n");
        return 1;
    }
    uint64_t l = 0;
    if (qrng_output_length(10000, 1.3629, 5, &l) != QRNG_OK || l != 2725) {
        fprintf(stderr, "output_length mismatch: %llu\n", (unsigned long long)l);
        return 1;
    }
    if (qrng_output_length(10000, 1.3629, 5, NULL) != QRNG_ERR_VALIDATION) {
        fprintf(stderr, "null output pointer not rejected\n");
        return 1;
    }
    if (qrng_last_error() == NULL) {
        fprintf(stderr, "last_error returned NULL\n");
        return 1;
    }
    double rate = 0.0;
    if (qrng_secure_rate(615514112, 24810, 1.3629, 397975, &rate) != QRNG_OK) {
        fprintf(stderr, "secure_rate failed: %s\n", qrng_last_error());
        return 1;
    }
    printf("capi_link ok: version %s, l=%llu, rate=%.12f\n", qrng_version(),
           (unsigned long long)l, rate);
    return 0;
}

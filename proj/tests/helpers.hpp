#pragma once

#include <string>

#include "core/errors.hpp"

namespace testutil {

// Error category raised by f, or errc{0} when f returns normally.
template <typename F>
qrng::errc code_of(F&& f) {
    try {
        f();
    } catch (const qrng::Error& e) {
        return e.code();
    }
    return static_cast<qrng::errc>(0);
}

inline std::string scratch_dir() {
    std::string dir = "/tmp/qrng_test_scratch";
    return dir;
}

} // namespace testutil

#pragma once

#include <stdexcept>
#include <string>

namespace qrng {

// Error categories; numeric values double as CLI exit codes.
enum class errc {
    validation = 2,
    insufficient_data = 3,
    io = 4,
    internal = 5,
};

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
    if (!cond) fail(code, what);
}

} // namespace qrng

#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace pvarlab {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest decimal form that is still exact: 17 significant digits.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace pvarlab

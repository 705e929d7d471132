#pragma once

#include <stdexcept>
#include <string>

namespace aw {

// Bad parameters, infeasible plans, malformed configs.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Quadrature or series failed to meet its accuracy target.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw config_error(what);
}

}  // namespace aw

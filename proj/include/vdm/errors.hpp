#pragma once

#include <stdexcept>
#include <string>

namespace vdm {

/// A trajectory failed to reach a steady state within the allotted time.
struct NotConverged : std::runtime_error {
    NotConverged(const std::string& what, double residual_)
        : std::runtime_error(what), residual(residual_) {}
    double residual;
};

struct MemoryCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Truncated-Fock or truncated-excitation basis leaked beyond tolerance.
struct CutoffExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace vdm

#pragma once

#include <stdexcept>
#include <string>

namespace gridkr {

/// A hop class whose aliased spectral mass vanishes: the kernel matrix is
/// singular and interpolation is undefined. We surface this instead of
/// regularizing.
class DegenerateClassError : public std::runtime_error {
public:
    explicit DegenerateClassError(const std::string& what) : std::runtime_error(what) {}
};

/// Kernel matrix numerically singular (smallest circulant eigenvalue below
/// the relative floor).
class SingularKernelError : public std::runtime_error {
public:
    explicit SingularKernelError(const std::string& what) : std::runtime_error(what) {}
};

/// Quadrature failed its node-doubling convergence check.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gridkr

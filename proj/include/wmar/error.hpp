#pragma once

#include <stdexcept>
#include <string>

namespace wmar {

/// Base error for all library failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// Raised when the lag-0 Gram matrix is too ill-conditioned to invert.
/// Carries the offending eigenvalue for diagnostics.
class GramSingularError : public Error {
public:
    GramSingularError(const std::string& what_arg, double eigenvalue)
        : Error(what_arg), eigenvalue_(eigenvalue) {}

    double offending_eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

} // namespace wmar

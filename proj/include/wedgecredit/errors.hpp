// SPDX-License-Identifier: Apache-2.0

#ifndef WEDGECREDIT_ERRORS_HPP
#define WEDGECREDIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wedge {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input outside the mathematical domain of an operation (e.g. a default
// boundary that is not positive where a logarithm is required).
class DomainError : public Error {
public:
    using Error::Error;
};

// An iteration hit its cap without meeting the residual tolerance.
class NonConvergence : public Error {
public:
    using Error::Error;
};

// Result exceeds the representable range; caller should switch to a
// scaled variant.
class OverflowError : public Error {
public:
    using Error::Error;
};

// Hypergeometric series does not terminate and lies outside the
// supported convergence region.
class NonTerminatingError : public Error {
public:
    using Error::Error;
};

// Alternating-series cancellation ate more digits than the tolerance
// allows; the caller should fall back to quadrature.
class PrecisionLossError : public Error {
public:
    using Error::Error;
};

// Eigenmode series hit the mode cap before the tail bound.
class SeriesNotConverged : public Error {
public:
    using Error::Error;
};

// Adaptive quadrature could not reach the requested tolerance.
class QuadratureError : public Error {
public:
    using Error::Error;
};

// Singular tridiagonal or dense system during a PDE solve.
class LinAlgFailure : public Error {
public:
    using Error::Error;
};

// Regularized price representation failed to reproduce its own
// boundary data.
class BoundaryMismatch : public Error {
public:
    using Error::Error;
};

// Configuration file violates the documented schema. Message carries
// the full list of violations, one per line.
class SchemaError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace wedge

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace opcalc {

// Base class for every error thrown by this library. Catching opcalc::Error
// is enough to intercept anything we raise on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument values: negative widths, orders out of range, malformed
// configuration keys. Detected before any numerical work starts.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& msg) : Error(msg) {}
};

// Structurally valid input outside the mathematical domain of the routine,
// e.g. a decay exponent too small for the requested norm to be finite.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A shifted solve or matrix factorization hit a (numerically) singular
// matrix, e.g. resolvent evaluation at a point of the spectrum.
class SingularityError : public Error {
public:
    explicit SingularityError(const std::string& msg) : Error(msg) {}
};

// An iterative or adaptive procedure exhausted its refinement budget
// without meeting the requested tolerance.
class AccuracyError : public Error {
public:
    explicit AccuracyError(const std::string& msg) : Error(msg) {}
};

// A requested computation exceeds an explicit size or memory cap.
class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& msg) : Error(msg) {}
};

// A quantity that must stay bounded for the computation to make sense is
// growing without sign of settling (divergent sums, non-decaying tails).
class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

} // namespace opcalc

#pragma once

#include <stdexcept>
#include <string>

namespace ttstream {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or extent mismatch (reshape products, contraction bonds, mode sizes).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Non-finite data, SVD backend failure, or other numerical breakdown.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Operation requires a container state that does not hold
/// (e.g. projection through a non-orthonormal train).
class StateError : public Error {
public:
    using Error::Error;
};

/// Malformed serialized data: bad magic, truncation, inconsistent ranks.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Observation or increment range out of bounds.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Invalid run or stream configuration (infeasible ranks, bad flag combos).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Memory or other resource exhaustion, with context attached by the thrower.
class ResourceError : public Error {
public:
    using Error::Error;
};

} // namespace ttstream

#pragma once

#include <stdexcept>
#include <string>

namespace lrq {

/// Precondition violated by the caller (bad shape, empty input, out-of-range parameter).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative kernel failed to converge or produced non-finite values.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or incompatible file contents.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lrq

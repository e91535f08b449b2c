#pragma once

#include <stdexcept>
#include <string>

namespace spectral_hull {

// Bad input or violated precondition. CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Eigensolver failure or a post-build invariant breach. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace spectral_hull

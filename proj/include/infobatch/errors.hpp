#pragma once

#include <stdexcept>
#include <string>

namespace infobatch {

// Error kinds surfaced by the library. The CLI maps them onto exit codes.

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class OutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A stored or incoming value is non-finite or violates a normalization contract.
class DataCorruption : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Forward/backward pass or optimizer update produced a non-finite value.
class NumericOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace infobatch

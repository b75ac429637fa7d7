#pragma once

#include <stdexcept>
#include <string>

namespace binfac {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape or size contract violated.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Linear system numerically singular under the pivot threshold.
class SingularError : public Error {
public:
    using Error::Error;
};

// Sign-component decomposition exhausted its retry budget.
class DecompositionError : public Error {
public:
    using Error::Error;
};

// Invalid user-facing configuration (masks, schedules, batch sizes).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed external byte stream (IDX files, checkpoints).
class FormatError : public Error {
public:
    using Error::Error;
};

// Filesystem failure (missing input, unwritable output).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace binfac

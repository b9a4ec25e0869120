#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace unimos {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad inputs: invalid specs, shape mismatches, label values outside the
/// allowed set, malformed configuration.
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Malformed on-disk payload. Carries the byte offset where decoding failed.
struct FormatError : Error {
    FormatError(const std::string& msg, std::size_t byte_offset)
        : Error(msg + " (byte offset " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    std::size_t offset;
};

/// Non-finite values where finite ones are required (losses, gradients).
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

/// Filesystem-level failures: unreadable/unwritable paths.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace unimos

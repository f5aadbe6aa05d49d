#pragma once

#include <stdexcept>
#include <string>

namespace riesznet {

/// Base class for all engine errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched tensor/image dimensions or an invalid size request.
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

/// NaN/Inf encountered, divergence, or an undefined measure.
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

/// Bad configuration value, unknown key, or failed validation.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// File read/write failures, unsupported formats, corrupt headers.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace riesznet

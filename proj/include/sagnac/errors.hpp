#pragma once

#include <stdexcept>
#include <string>

namespace sagnac {

/// Base for every error raised by the simulator core.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physically meaningless input: zero state, non-positive geometry,
/// non-unitary matrix where a lossless one is required, and so on.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The caller violated an operation's stated precondition (e.g. a time step
/// too coarse to resolve the discharge edge).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A waveform did not contain the requested 10 %/90 % threshold crossings.
class NoEdgeError : public DomainError {
public:
    NoEdgeError() : DomainError("no edge found") {}
};

/// Visibility of exactly one maps to an unbounded on/off contrast.
class InfiniteContrast : public DomainError {
public:
    InfiniteContrast() : DomainError("infinite contrast") {}
};

/// Scene configuration problem; carries the offending line and key.
class ConfigError : public Error {
public:
    ConfigError(int line, std::string key, const std::string& what)
        : Error(format(line, key, what)), line_(line), key_(std::move(key)) {}

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    static std::string format(int line, const std::string& key, const std::string& what) {
        std::string msg = "config";
        if (line > 0) msg += " line " + std::to_string(line);
        if (!key.empty()) msg += " key '" + key + "'";
        return msg + ": " + what;
    }

    int line_;
    std::string key_;
};

}  // namespace sagnac

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace scroll {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid run configuration or flag value (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Shape mismatch: window outside canvas, tile size mismatch, empty crop.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Denoiser backend failure (CLI exit code 3).
class BackendError : public Error {
public:
    using Error::Error;
};

// Unreadable or unwritable file (CLI exit code 4).
class IoError : public Error {
public:
    using Error::Error;
};

// Malformed prompt operator syntax; carries the byte offset of the
// offending character.
class PromptParseError : public Error {
public:
    PromptParseError(const std::string& what, std::size_t offset)
        : Error(what + " (byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Layout JSON that does not match the schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

// LLM transport failure: endpoint unreachable or timed out.
class TransportError : public Error {
public:
    using Error::Error;
};

// Layout prediction exhausted its retries; keeps every raw response
// for audit (CLI exit code 5).
class PredictionError : public Error {
public:
    PredictionError(const std::string& what, std::vector<std::string> raw)
        : Error(what), raw_responses_(std::move(raw)) {}

    const std::vector<std::string>& raw_responses() const { return raw_responses_; }

private:
    std::vector<std::string> raw_responses_;
};

}  // namespace scroll

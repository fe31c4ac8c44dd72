#pragma once

#include <stdexcept>
#include <string>

namespace reveal {

// Bad user-supplied configuration or CLI usage. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Input file violates an expected schema (missing/unknown columns, bad cells).
class SchemaError : public ConfigError {
public:
    explicit SchemaError(const std::string& what) : ConfigError(what) {}
};

// Numerical or algorithmic failure at runtime. Maps to exit code 1.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace reveal

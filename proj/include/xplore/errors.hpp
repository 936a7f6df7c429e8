#pragma once

#include <stdexcept>
#include <string>

namespace xplore {

// Bad user-supplied configuration (sizes, ranges, unknown modes).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// API misuse: dimension mismatches, calling backward without forward, etc.
struct ContractError : std::logic_error {
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// Filesystem-level failure (missing/unwritable files).
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// File exists but its contents are not a valid/known schema.
struct SchemaError : IoError {
  explicit SchemaError(const std::string& what) : IoError(what) {}
};

// Numerical failure (divergence, non-finite loss).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace xplore

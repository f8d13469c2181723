#pragma once

#include <stdexcept>
#include <string>

namespace realm {

/// Base class for all realm errors. Subclasses map to the CLI's exit-code
/// classes: config (2), data (3), compute/backend (4).
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller violated an operation precondition (bad dims, empty input, ...).
class InvalidInputError : public Error {
public:
  explicit InvalidInputError(const std::string& msg) : Error(msg) {}
};

/// Missing or inconsistent configuration (paths, weights, flags).
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Malformed dataset content: schema violations, duplicate ids, bad files.
class DataError : public Error {
public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

/// An embedding or annotation backend failed (network, model, provider).
class BackendError : public Error {
public:
  explicit BackendError(const std::string& msg) : Error(msg) {}
};

/// A provider response could not be decomposed into (verdict, description).
class ParseError : public Error {
public:
  ParseError(const std::string& msg, std::string raw)
      : Error(msg), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

private:
  std::string raw_;
};

/// Numerical failure during training or evaluation (NaN loss, divergence).
class ComputeError : public Error {
public:
  explicit ComputeError(const std::string& msg) : Error(msg) {}
};

}  // namespace realm

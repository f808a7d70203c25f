#pragma once

#include <stdexcept>
#include <string>

namespace injectbench {

/// Base class for all errors raised by the harness.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad inputs: malformed records, out-of-range parameters, missing files.
/// The CLI maps these to exit code 1.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Failures talking to a model service: transport, status, malformed
/// payloads. The CLI maps these to exit code 2.
class ServiceError : public Error {
public:
  using Error::Error;
};

/// The scorer could not split the returned tokens exactly at the
/// context/continuation boundary. Reported distinctly from other
/// payload problems so callers can tell prompt issues from wire issues.
class TokenBoundaryError : public ServiceError {
public:
  using ServiceError::ServiceError;
};

/// A completion payload that failed to parse. Keeps the raw payload so
/// it can be logged for manual inspection.
class PayloadError : public ValidationError {
public:
  PayloadError(const std::string& message, std::string raw_payload)
      : ValidationError(message), raw_(std::move(raw_payload)) {}

  const std::string& raw_payload() const { return raw_; }

private:
  std::string raw_;
};

}  // namespace injectbench

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nca {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- field / matrix ---

struct ZeroInverseError : Error {
  ZeroInverseError() : Error("zero has no multiplicative inverse") {}
};

struct SingularMatrixError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

// --- network model ---

struct ParseError : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

// --- transfer analysis ---

struct PreconditionError : Error {
  using Error::Error;
};

struct MincutViolationError : Error {
  using Error::Error;
};

// --- code construction ---

struct SingularBlockError : Error {
  using Error::Error;
};

struct RankFailureError : Error {
  using Error::Error;
};

struct InvalidPairError : Error {
  using Error::Error;
};

/// Design search gave up: every attempt failed construction or verification.
struct ExhaustedError : Error {
  ExhaustedError(unsigned attempts, std::string last_failure)
      : Error("design search exhausted after " + std::to_string(attempts) +
              " attempts; last failure: " + last_failure),
        attempts(attempts),
        last_failure(std::move(last_failure)) {}
  unsigned attempts;
  std::string last_failure;
};

/// The network's classification admits no aligned design (rank-1 or broken A1).
struct CaseRejectedError : Error {
  explicit CaseRejectedError(std::string tag)
      : Error("network rejected for code design: " + tag), tag(std::move(tag)) {}
  std::string tag;
};

// --- simulation ---

struct DigestMismatchError : Error {
  using Error::Error;
};

}  // namespace nca

#pragma once

#include <cstdint>

#include "nca/errors.hpp"

namespace nca::gf {

/// A prime-field element. Values are always reduced to [0, p).
using Elem = std::uint64_t;

/// Deterministic Miller-Rabin primality test, exact for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

/// Arithmetic context for F_p. The modulus is kept below 2^32 so that
/// products of reduced elements fit in 64 bits.
class FieldContext {
 public:
  /// Throws ValidationError unless p is prime, p > 2 and p < 2^32.
  explicit FieldContext(Elem p);

  Elem p() const { return p_; }

  Elem add(Elem a, Elem b) const {
    Elem s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p_ - b; }
  Elem neg(Elem a) const { return a == 0 ? 0 : p_ - a; }
  Elem mul(Elem a, Elem b) const { return (a * b) % p_; }

  /// Modular inverse; throws ZeroInverseError for a = 0.
  Elem inv(Elem a) const;

  /// a^e by repeated squaring.
  Elem pow(Elem a, std::uint64_t e) const;

  /// Reduce an arbitrary 64-bit value into [0, p).
  Elem reduce(std::uint64_t v) const { return v % p_; }

 private:
  Elem p_;
};

}  // namespace nca::gf

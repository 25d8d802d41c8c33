#pragma once

#include <cstdint>
#include <string_view>

#include "nca/field.hpp"

// Seedable counter-based generator used everywhere randomness is needed.
// The algorithm is fixed as part of the artifact file formats: a 64-bit
// state advances by the golden-ratio increment and each output is the
// finalizer mix of the new state (splitmix64). Independent streams are
// derived from a master seed and a label so that results do not depend on
// evaluation order or thread count.

namespace nca::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// FNV-1a over the label text; used to turn test/stage names into stream labels.
constexpr std::uint64_t label(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Derive a child seed from (seed, label). Chainable.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t lbl) {
  return mix64(seed ^ mix64(lbl));
}

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t lbl) {
  return SplitMix64(derive(seed, lbl));
}

/// Unbiased draw from [0, bound) by rejection. bound >= 1.
inline std::uint64_t uniform_below(SplitMix64& g, std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Accept only below the largest multiple of bound.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = g.next();
  } while (v >= limit);
  return v % bound;
}

inline gf::Elem uniform_field(SplitMix64& g, const gf::FieldContext& ctx) {
  return uniform_below(g, ctx.p());
}

inline gf::Elem uniform_nonzero(SplitMix64& g, const gf::FieldContext& ctx) {
  return 1 + uniform_below(g, ctx.p() - 1);
}

}  // namespace nca::rng

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nca/align.hpp"
#include "nca/network.hpp"

namespace nca::sim {

using gf::Elem;

/// One block of messages: n+1 symbols for session 1, n for sessions 2 and 3.
struct MessageBlock {
  std::vector<Elem> z1, z2, z3;
  std::uint64_t index = 0;
};

struct ChannelInputs {
  std::vector<Elem> x1, x2, x3;  // length 2n+1 each
};

struct ChannelOutputs {
  std::vector<Elem> y1, y2, y3;  // length 2n+1 each
};

/// x_i = V_i z_i. Throws DimensionError on length mismatch.
ChannelInputs encode_block(const MessageBlock& msg,
                           const align::CodeDesign& design);

/// Carry the input blocks through the network edge by edge: channel use k
/// applies row k of the coefficient schedule, every edge holds one field
/// symbol, and each destination combines its in-edges. This is a second,
/// direct computation of the relation the transfer blocks model. The field
/// is the one the schedule was sampled over; the overload without a context
/// uses the network's document prime.
ChannelOutputs propagate(const gf::FieldContext& ctx, const net::Network& net,
                         const align::SymbolExtension& ext,
                         const ChannelInputs& inputs);
ChannelOutputs propagate(const net::Network& net,
                         const align::SymbolExtension& ext,
                         const ChannelInputs& inputs);

/// Zero-forcing decode: d = W_i y_i, keeping the leading message
/// coordinates (n+1 for session 1, n for sessions 2 and 3).
std::vector<Elem> decode_block(std::span<const Elem> y,
                               const align::CodeDesign& design, int session);

struct SimulationReport {
  std::uint64_t blocks = 0;
  std::array<std::uint64_t, 3> successes{};
  std::array<std::optional<align::Fraction>, 3> rates;  // unset when blocks=0
  std::optional<std::uint64_t> first_failure;
  std::uint64_t seed = 0;
};

/// Random messages per block, encode -> propagate -> decode, success being
/// exact recovery of all three messages. Throws DigestMismatchError when the
/// design was built for a different network.
SimulationReport run_simulation(const net::Network& net,
                                const align::CodeDesign& design,
                                std::uint64_t blocks, std::uint64_t seed);

}  // namespace nca::sim

#include "nca/sim.hpp"

#include "nca/rng.hpp"

namespace nca::sim {

namespace {

constexpr std::uint64_t kBlockLabel = rng::label("message-block");

std::vector<Elem> column_times(const gf::FieldContext& ctx,
                               const gf::FieldMatrix& m,
                               std::span<const Elem> v) {
  auto out = gf::mat_vec(ctx, m, v);
  return out.data;
}

}  // namespace

ChannelInputs encode_block(const MessageBlock& msg,
                           const align::CodeDesign& design) {
  const gf::FieldContext ctx(design.p);
  if (msg.z1.size() != design.n + 1 || msg.z2.size() != design.n ||
      msg.z3.size() != design.n)
    throw DimensionError("message lengths do not match the design's n");
  return {column_times(ctx, design.pre.V1, msg.z1),
          column_times(ctx, design.pre.V2, msg.z2),
          column_times(ctx, design.pre.V3, msg.z3)};
}

ChannelOutputs propagate(const gf::FieldContext& ctx, const net::Network& net,
                         const align::SymbolExtension& ext,
                         const ChannelInputs& inputs) {
  const std::size_t len = ext.length();
  if (inputs.x1.size() != len || inputs.x2.size() != len ||
      inputs.x3.size() != len)
    throw DimensionError("input blocks must have 2n+1 symbols");
  const net::CoefficientIndex index(net);
  const net::PropagationPlan plan(net, index);
  if (ext.rows.cols != plan.coeff_count)
    throw DimensionError("coefficient schedule width mismatch");

  const std::array<const std::vector<Elem>*, 3> x{&inputs.x1, &inputs.x2,
                                                  &inputs.x3};
  ChannelOutputs out;
  out.y1.assign(len, 0);
  out.y2.assign(len, 0);
  out.y3.assign(len, 0);
  std::array<std::vector<Elem>*, 3> y{&out.y1, &out.y2, &out.y3};

  std::vector<Elem> edge_val(net.edge_count());
  for (std::size_t k = 0; k < len; ++k) {
    const auto xi = ext.rows.row(k);
    for (const auto& step : plan.steps) {
      const std::size_t out_count = step.out_slots.size();
      for (std::size_t oi = 0; oi < out_count; ++oi) {
        Elem acc = 0;
        for (std::size_t ii = 0; ii < step.in_slots.size(); ++ii) {
          const Elem w = xi[step.coeff_base + ii * out_count + oi];
          const Elem v =
              step.in_slots[ii] == net::kInjectSlot
                  ? (*x[net.source_session(step.node) - 1])[k]
                  : edge_val[step.in_slots[ii]];
          acc = ctx.add(acc, ctx.mul(w, v));
        }
        if (step.out_slots[oi] == net::kCombineSlot)
          (*y[net.destination_session(step.node) - 1])[k] = acc;
        else
          edge_val[step.out_slots[oi]] = acc;
      }
    }
  }
  return out;
}

ChannelOutputs propagate(const net::Network& net,
                         const align::SymbolExtension& ext,
                         const ChannelInputs& inputs) {
  return propagate(gf::FieldContext(net.field_prime()), net, ext, inputs);
}

std::vector<Elem> decode_block(std::span<const Elem> y,
                               const align::CodeDesign& design, int session) {
  if (session < 1 || session > 3)
    throw DimensionError("session index must be 1..3");
  const gf::FieldContext ctx(design.p);
  const gf::FieldMatrix& w =
      session == 1 ? design.W1 : (session == 2 ? design.W2 : design.W3);
  if (y.size() != w.cols) throw DimensionError("received block length mismatch");
  auto d = gf::mat_vec(ctx, w, y);
  const std::size_t keep = session == 1 ? design.n + 1 : design.n;
  return {d.data.begin(), d.data.begin() + keep};
}

SimulationReport run_simulation(const net::Network& net,
                                const align::CodeDesign& design,
                                std::uint64_t blocks, std::uint64_t seed) {
  if (net::content_digest(net) != design.network_digest)
    throw DigestMismatchError(
        "design was built for a different network (digest " +
        design.network_digest + " vs " + net::content_digest(net) + ")");
  const gf::FieldContext ctx(design.p);

  SimulationReport rep;
  rep.blocks = blocks;
  rep.seed = seed;
  const std::uint64_t block_base = rng::derive(seed, kBlockLabel);
  for (std::uint64_t b = 0; b < blocks; ++b) {
    rng::SplitMix64 g(rng::derive(block_base, b));
    MessageBlock msg;
    msg.index = b;
    msg.z1.resize(design.n + 1);
    msg.z2.resize(design.n);
    msg.z3.resize(design.n);
    for (auto& v : msg.z1) v = rng::uniform_field(g, ctx);
    for (auto& v : msg.z2) v = rng::uniform_field(g, ctx);
    for (auto& v : msg.z3) v = rng::uniform_field(g, ctx);

    auto outputs = propagate(ctx, net, design.z, encode_block(msg, design));
    bool ok1 = decode_block(outputs.y1, design, 1) == msg.z1;
    bool ok2 = decode_block(outputs.y2, design, 2) == msg.z2;
    bool ok3 = decode_block(outputs.y3, design, 3) == msg.z3;
    rep.successes[0] += ok1;
    rep.successes[1] += ok2;
    rep.successes[2] += ok3;
    if (!(ok1 && ok2 && ok3) && !rep.first_failure) rep.first_failure = b;
  }
  if (blocks > 0) {
    const std::uint64_t uses = blocks * (2 * design.n + 1);
    rep.rates[0] = align::reduced(rep.successes[0] * (design.n + 1), uses);
    rep.rates[1] = align::reduced(rep.successes[1] * design.n, uses);
    rep.rates[2] = align::reduced(rep.successes[2] * design.n, uses);
  }
  return rep;
}

}  // namespace nca::sim

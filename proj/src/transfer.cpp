#include "nca/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "nca/rng.hpp"

namespace nca::transfer {

namespace {

constexpr std::uint64_t kTrivialityLabel = rng::label("triviality");
constexpr std::uint64_t kProportionalityLabel = rng::label("proportionality");
constexpr std::uint64_t kRatioLabel = rng::label("ratio");
constexpr std::uint64_t kRankProbeLabel = rng::label("rank-probe");
constexpr std::uint64_t kAsymmetryLabel = rng::label("asymmetry");

std::vector<Elem> sample_assignment(rng::SplitMix64& g,
                                    const gf::FieldContext& ctx,
                                    std::size_t width) {
  std::vector<Elem> a(width);
  for (auto& x : a) x = rng::uniform_field(g, ctx);
  return a;
}

/// Schwartz-Zippel failure bound for `samples` independent evaluations of a
/// polynomial with total degree at most `degree`.
double sz_bound(unsigned degree, Elem p, unsigned samples) {
  if (degree == 0) return 0.0;
  double per = std::min(1.0, static_cast<double>(degree) / static_cast<double>(p));
  return std::pow(per, static_cast<double>(samples));
}

void check_index(int i, int j) {
  if (i < 1 || i > 3 || j < 1 || j > 3)
    throw PreconditionError("entry indices must be 1..3");
}

}  // namespace

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::CertifiedNonzero: return "CertifiedNonzero";
    case VerdictKind::LikelyZero: return "LikelyZero";
    case VerdictKind::CertifiedDistinct: return "CertifiedDistinct";
    case VerdictKind::LikelyProportional: return "LikelyProportional";
    case VerdictKind::LikelyConstant: return "LikelyConstant";
    case VerdictKind::CertifiedNonconstant: return "CertifiedNonconstant";
    case VerdictKind::CertifiedAsymmetric: return "CertifiedAsymmetric";
    case VerdictKind::Unverified: return "Unverified";
  }
  return "?";
}

const char* to_string(Assumption a) {
  switch (a) {
    case Assumption::A2: return "A2";
    case Assumption::A3: return "A3";
    case Assumption::A4: return "A4";
  }
  return "?";
}

NetworkEvaluator::NetworkEvaluator(const net::Network& net, gf::Elem prime)
    : net_(net), ctx_(prime), index_(net), plan_(net, index_) {
  // Longest S_j -> D_i path in edges; the entry's total degree is that plus
  // one (injection and combining weights included, one weight per hop).
  for (int j = 0; j < 3; ++j) {
    const int src = net.sessions()[j].source;
    std::vector<long> dist(net.node_count(), -1);
    dist[src] = 0;
    for (int v : net.topo_order()) {
      if (dist[v] < 0) continue;
      for (int e : net.out_edges(v)) {
        int head = net.edges()[e].second;
        dist[head] = std::max(dist[head], dist[v] + 1);
      }
    }
    for (int i = 0; i < 3; ++i) {
      long d = dist[net.sessions()[i].destination];
      degree_[i][j] = d < 0 ? 0u : static_cast<unsigned>(d + 1);
    }
  }
}

gf::FieldMatrix NetworkEvaluator::eval(std::span<const Elem> xi) const {
  if (xi.size() != width())
    throw DimensionError("assignment length does not match coefficient count");
  // One propagation pass carries all three source impulses at once: each
  // edge holds the 3-vector of per-source gains.
  std::vector<std::array<Elem, 3>> edge_val(net_.edge_count(), {0, 0, 0});
  gf::FieldMatrix m(3, 3);
  for (const auto& step : plan_.steps) {
    const std::size_t out_count = step.out_slots.size();
    for (std::size_t oi = 0; oi < out_count; ++oi) {
      std::array<Elem, 3> acc{0, 0, 0};
      for (std::size_t ii = 0; ii < step.in_slots.size(); ++ii) {
        const Elem w = xi[step.coeff_base + ii * out_count + oi];
        if (w == 0) continue;
        if (step.in_slots[ii] == net::kInjectSlot) {
          int j = net_.source_session(step.node) - 1;
          acc[j] = ctx_.add(acc[j], w);  // unit impulse from source j
        } else {
          const auto& up = edge_val[step.in_slots[ii]];
          for (int c = 0; c < 3; ++c)
            acc[c] = ctx_.add(acc[c], ctx_.mul(w, up[c]));
        }
      }
      if (step.out_slots[oi] == net::kCombineSlot) {
        int i = net_.destination_session(step.node) - 1;
        for (int c = 0; c < 3; ++c) m.at(i, c) = acc[c];
      } else {
        edge_val[step.out_slots[oi]] = acc;
      }
    }
  }
  return m;
}

VirtualEvaluator::VirtualEvaluator(const Evaluator& base,
                                   std::vector<std::pair<int, int>> pairs)
    : base_(base), pairs_(std::move(pairs)) {
  if (pairs_.empty())
    throw InvalidPairError("virtual interference needs at least one pair");
  std::sort(pairs_.begin(), pairs_.end());
  if (std::adjacent_find(pairs_.begin(), pairs_.end()) != pairs_.end())
    throw InvalidPairError("duplicate virtual pair");
  for (auto [i, j] : pairs_) {
    check_index(i, j);
    if (i == j)
      throw InvalidPairError("diagonal entries cannot be virtualized");
  }
}

gf::FieldMatrix VirtualEvaluator::eval(std::span<const Elem> xi) const {
  if (xi.size() != width())
    throw DimensionError("assignment length does not match evaluator width");
  gf::FieldMatrix m = base_.eval(xi.first(base_.width()));
  for (std::size_t k = 0; k < pairs_.size(); ++k)
    m.at(pairs_[k].first - 1, pairs_[k].second - 1) = xi[base_.width() + k];
  return m;
}

unsigned VirtualEvaluator::degree_bound(int i, int j) const {
  for (const auto& pr : pairs_)
    if (pr.first == i && pr.second == j) return 1;
  return base_.degree_bound(i, j);
}

TransferEvaluation evaluate_transfer(const net::Network& net,
                                     std::span<const Elem> xi) {
  NetworkEvaluator ev(net);
  return TransferEvaluation{ev.eval(xi), {xi.begin(), xi.end()}};
}

IdentityVerdict triviality_test(const Evaluator& ev, int i, int j,
                                unsigned samples, std::uint64_t seed) {
  check_index(i, j);
  if (samples < 1) throw PreconditionError("samples must be at least 1");
  auto g = rng::substream(rng::derive(seed, kTrivialityLabel),
                          static_cast<std::uint64_t>(i * 4 + j));
  for (unsigned k = 0; k < samples; ++k) {
    auto a = sample_assignment(g, ev.field(), ev.width());
    if (ev.eval(a).at(i - 1, j - 1) != 0)
      return {VerdictKind::CertifiedNonzero, {std::move(a)}, 0.0, {}};
  }
  return {VerdictKind::LikelyZero,
          {},
          sz_bound(ev.degree_bound(i, j), ev.field().p(), samples),
          {}};
}

IdentityVerdict proportionality_test(const Evaluator& ev, int i, int j,
                                     unsigned samples, std::uint64_t seed) {
  check_index(i, j);
  if (i == j)
    throw PreconditionError("proportionality compares distinct entries");
  const std::uint64_t base =
      rng::derive(rng::derive(seed, kProportionalityLabel),
                  static_cast<std::uint64_t>(i * 4 + j));
  if (triviality_test(ev, i, i, samples, rng::derive(base, rng::label("pre-ii")))
          .kind != VerdictKind::CertifiedNonzero ||
      triviality_test(ev, i, j, samples, rng::derive(base, rng::label("pre-ij")))
          .kind != VerdictKind::CertifiedNonzero)
    throw PreconditionError("both entries must be certified nonzero");

  const auto& ctx = ev.field();
  auto g = rng::SplitMix64(rng::derive(base, rng::label("pairs")));
  for (unsigned k = 0; k < samples; ++k) {
    auto xa = sample_assignment(g, ctx, ev.width());
    auto xb = sample_assignment(g, ctx, ev.width());
    auto ma = ev.eval(xa);
    auto mb = ev.eval(xb);
    Elem cross = ctx.sub(ctx.mul(ma.at(i - 1, i - 1), mb.at(i - 1, j - 1)),
                         ctx.mul(mb.at(i - 1, i - 1), ma.at(i - 1, j - 1)));
    if (cross != 0)
      return {VerdictKind::CertifiedDistinct,
              {std::move(xa), std::move(xb)},
              0.0,
              {}};
  }
  unsigned degree = ev.degree_bound(i, i) + ev.degree_bound(i, j);
  return {VerdictKind::LikelyProportional,
          {},
          sz_bound(degree, ctx.p(), samples),
          {}};
}

namespace {

struct RatioParts {
  Elem a, b;
};

RatioParts ratio_parts(const gf::FieldContext& ctx, const gf::FieldMatrix& m) {
  // a = m12 m23 m31, b = m21 m13 m32 (1-based entries).
  Elem a = ctx.mul(ctx.mul(m.at(0, 1), m.at(1, 2)), m.at(2, 0));
  Elem b = ctx.mul(ctx.mul(m.at(1, 0), m.at(0, 2)), m.at(2, 1));
  return {a, b};
}

unsigned ratio_degree(const Evaluator& ev) {
  return ev.degree_bound(1, 2) + ev.degree_bound(2, 3) + ev.degree_bound(3, 1) +
         ev.degree_bound(2, 1) + ev.degree_bound(1, 3) + ev.degree_bound(3, 2);
}

void require_offdiagonal_nonzero(const Evaluator& ev, unsigned samples,
                                 std::uint64_t seed) {
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      if (i == j) continue;
      if (triviality_test(ev, i, j, samples, seed).kind !=
          VerdictKind::CertifiedNonzero)
        throw PreconditionError("entry (" + std::to_string(i) + "," +
                                std::to_string(j) +
                                ") is not certified nonzero");
    }
}

}  // namespace

IdentityVerdict ratio_constancy_test(const Evaluator& ev, unsigned samples,
                                     std::uint64_t seed) {
  const std::uint64_t base = rng::derive(seed, kRatioLabel);
  require_offdiagonal_nonzero(ev, samples, rng::derive(base, rng::label("pre")));

  const auto& ctx = ev.field();
  auto g = rng::SplitMix64(rng::derive(base, rng::label("pairs")));
  std::optional<Elem> c_tilde;
  for (unsigned k = 0; k < samples; ++k) {
    auto xa = sample_assignment(g, ctx, ev.width());
    auto xb = sample_assignment(g, ctx, ev.width());
    auto ra = ratio_parts(ctx, ev.eval(xa));
    auto rb = ratio_parts(ctx, ev.eval(xb));
    Elem cross = ctx.sub(ctx.mul(ra.a, rb.b), ctx.mul(rb.a, ra.b));
    if (cross != 0)
      return {VerdictKind::CertifiedNonconstant,
              {std::move(xa), std::move(xb)},
              0.0,
              {}};
    if (!c_tilde && ra.b != 0) c_tilde = ctx.mul(ra.a, ctx.inv(ra.b));
    if (!c_tilde && rb.b != 0) c_tilde = ctx.mul(rb.a, ctx.inv(rb.b));
  }
  // All cross-products agreed; report the common ratio from a point with
  // nonzero denominator (extra draws in the rare case none was seen).
  for (unsigned k = 0; !c_tilde && k < 4 * samples; ++k) {
    auto x = sample_assignment(g, ctx, ev.width());
    auto r = ratio_parts(ctx, ev.eval(x));
    if (r.b != 0) c_tilde = ctx.mul(r.a, ctx.inv(r.b));
  }
  if (!c_tilde) return {VerdictKind::Unverified, {}, 1.0, {}};
  return {VerdictKind::LikelyConstant,
          {},
          sz_bound(2 * ratio_degree(ev), ctx.p(), samples),
          c_tilde};
}

namespace {

struct AsymmetryEntries {
  std::array<std::pair<int, int>, 2> num;
  std::array<std::pair<int, int>, 2> den;
};

AsymmetryEntries assumption_entries(Assumption which) {
  switch (which) {
    case Assumption::A2: return {{{{1, 1}, {3, 2}}}, {{{1, 2}, {3, 1}}}};
    case Assumption::A3: return {{{{2, 2}, {3, 1}}}, {{{2, 1}, {3, 2}}}};
    case Assumption::A4: return {{{{3, 3}, {2, 1}}}, {{{2, 3}, {3, 1}}}};
  }
  throw PreconditionError("unknown assumption");
}

}  // namespace

IdentityVerdict asymmetry_certificate(const Evaluator& ev, Assumption which,
                                      std::uint64_t budget,
                                      std::uint64_t seed) {
  const std::uint64_t base = rng::derive(
      rng::derive(seed, kAsymmetryLabel), static_cast<std::uint64_t>(which));
  require_offdiagonal_nonzero(ev, 32, rng::derive(base, rng::label("pre")));

  const auto& ctx = ev.field();
  const auto entries = assumption_entries(which);
  const std::size_t width = ev.width();
  const std::uint64_t sweep_seed = rng::derive(base, rng::label("sweep"));
  constexpr unsigned kSweep = 64;        // points per round
  constexpr unsigned kRoundPairCap = 8;  // examined pairs per round
  constexpr std::size_t kBucketCap = 4;  // stored representatives per h value
  const std::uint64_t max_evals = 64 * budget;

  // Points are regenerated from (round, sweep index) when a witness is
  // needed, so buckets stay small.
  auto point_at = [&](std::uint32_t round, std::uint32_t idx) {
    auto g = rng::substream(sweep_seed, round);
    auto a = sample_assignment(g, ctx, width);
    Elem v = 0;
    for (std::uint32_t k = 0; k <= idx; ++k) v = rng::uniform_field(g, ctx);
    a[round % width] = v;
    return a;
  };
  auto eval_point = [&](std::span<const Elem> a, Elem& h, Elem& gval,
                        bool& has_g) {
    auto m = ev.eval(a);
    auto r = ratio_parts(ctx, m);
    if (r.b == 0) return false;  // no level-set value at this point
    h = ctx.mul(r.a, ctx.inv(r.b));
    Elem num = ctx.mul(m.at(entries.num[0].first - 1, entries.num[0].second - 1),
                       m.at(entries.num[1].first - 1, entries.num[1].second - 1));
    Elem den = ctx.mul(m.at(entries.den[0].first - 1, entries.den[0].second - 1),
                       m.at(entries.den[1].first - 1, entries.den[1].second - 1));
    has_g = den != 0;
    gval = has_g ? ctx.mul(num, ctx.inv(den)) : 0;
    return true;
  };

  struct Stored {
    Elem g;
    std::uint32_t round;
    std::uint32_t idx;
  };
  std::unordered_map<Elem, std::vector<Stored>> buckets;
  std::uint64_t evals = 0, pairs = 0;

  for (std::uint32_t round = 0; evals < max_evals && pairs < budget; ++round) {
    auto g = rng::substream(sweep_seed, round);
    auto a = sample_assignment(g, ctx, width);
    const std::size_t coord = round % width;
    unsigned round_pairs = 0;
    for (std::uint32_t w = 0; w < kSweep && evals < max_evals; ++w) {
      a[coord] = rng::uniform_field(g, ctx);
      ++evals;
      Elem h, gval;
      bool has_g;
      if (!eval_point(a, h, gval, has_g) || !has_g) continue;
      auto& bucket = buckets[h];
      for (const auto& other : bucket) {
        if (round_pairs >= kRoundPairCap || pairs >= budget) break;
        ++pairs;
        ++round_pairs;
        if (other.g != gval) {
          auto wa = point_at(other.round, other.idx);
          auto wb = a;
          return {VerdictKind::CertifiedAsymmetric,
                  {std::move(wa), std::move(wb)},
                  0.0,
                  {}};
        }
      }
      if (bucket.size() < kBucketCap) bucket.push_back({gval, round, w});
    }
  }
  return {VerdictKind::Unverified, {}, 1.0, {}};
}

std::size_t probe_rank(const Evaluator& ev, unsigned probes,
                       std::uint64_t seed) {
  auto g = rng::substream(seed, kRankProbeLabel);
  std::size_t best = 0;
  for (unsigned k = 0; k < probes; ++k) {
    auto a = sample_assignment(g, ev.field(), ev.width());
    best = std::max(best, gf::mat_rank(ev.field(), ev.eval(a)));
  }
  return best;
}

std::string Classification::tag() const {
  switch (kind) {
    case Kind::CaseI_GenericRatio: return "CaseI_GenericRatio";
    case Kind::CaseI_ConstantRatio: return "CaseI_ConstantRatio";
    case Kind::CaseII: return "CaseII";
    case Kind::Degenerate_Rank1: return "Degenerate_Rank1";
    case Kind::BrokenA1: return "BrokenA1";
  }
  return "?";
}

Classification classify(const Evaluator& ev, std::uint64_t seed,
                        const ClassifyOptions& opts) {
  std::array<std::array<VerdictKind, 3>, 3> trivial{};
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      trivial[i - 1][j - 1] =
          triviality_test(ev, i, j, opts.samples, seed).kind;

  for (int i = 1; i <= 3; ++i)
    if (trivial[i - 1][i - 1] == VerdictKind::LikelyZero)
      throw MincutViolationError(
          "session " + std::to_string(i) +
          " has an identically zero transfer function (no usable path)");

  std::vector<std::pair<int, int>> trivial_pairs;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      if (i != j && trivial[i - 1][j - 1] == VerdictKind::LikelyZero)
        trivial_pairs.emplace_back(i, j);

  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      if (i == j || trivial[i - 1][j - 1] == VerdictKind::LikelyZero) continue;
      if (proportionality_test(ev, i, j, opts.samples, seed).kind ==
          VerdictKind::LikelyProportional)
        return {Classification::Kind::BrokenA1, {}, {}, std::pair{i, j}};
    }

  if (probe_rank(ev, opts.rank_probes, seed) == 1)
    return {Classification::Kind::Degenerate_Rank1, {}, {}, {}};

  if (!trivial_pairs.empty())
    return {Classification::Kind::CaseII, {}, std::move(trivial_pairs), {}};

  auto ratio = ratio_constancy_test(ev, opts.samples, seed);
  if (ratio.kind == VerdictKind::CertifiedNonconstant)
    return {Classification::Kind::CaseI_GenericRatio, {}, {}, {}};
  if (ratio.kind == VerdictKind::LikelyConstant)
    return {Classification::Kind::CaseI_ConstantRatio, ratio.ratio, {}, {}};
  throw Error("ratio constancy could not be determined");
}

Classification classify(const net::Network& net, std::uint64_t seed,
                        const ClassifyOptions& opts) {
  NetworkEvaluator ev(net);
  return classify(ev, seed, opts);
}

AnalysisReport analyze(const net::Network& net, const AnalysisOptions& opts) {
  NetworkEvaluator ev(net);
  AnalysisReport rep;
  rep.seed = opts.seed;
  rep.samples = opts.samples;
  for (int i = 1; i <= 3; ++i) rep.mincuts[i - 1] = mincut(net, i);

  ClassifyOptions copts;
  copts.samples = opts.samples;
  rep.classification = classify(ev, opts.seed, copts);
  rep.observed_rank = probe_rank(ev, copts.rank_probes, opts.seed);

  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      if (i == j) continue;
      auto t = triviality_test(ev, i, j, opts.samples, opts.seed);
      rep.a1[i - 1][j - 1] =
          t.kind == VerdictKind::LikelyZero
              ? t
              : proportionality_test(ev, i, j, opts.samples, opts.seed);
    }

  const auto& tp = rep.classification.trivial_pairs;
  std::unique_ptr<VirtualEvaluator> virt;
  const Evaluator* asym_ev = &ev;
  if (!tp.empty()) {
    virt = std::make_unique<VirtualEvaluator>(ev, tp);
    asym_ev = virt.get();
  }
  rep.ratio = ratio_constancy_test(*asym_ev, opts.samples, opts.seed);
  for (Assumption a : {Assumption::A2, Assumption::A3, Assumption::A4})
    rep.asymmetry.emplace(
        to_string(a),
        asymmetry_certificate(*asym_ev, a, opts.asym_budget, opts.seed));
  return rep;
}

}  // namespace nca::transfer

#include "nca/align.hpp"

#include <future>
#include <numeric>
#include <sstream>

#include "nca/rng.hpp"

namespace nca::align {

namespace {

constexpr std::uint64_t kAttemptLabel = rng::label("attempt");
constexpr std::uint64_t kThetaLabel = rng::label("theta");
constexpr std::uint64_t kAugRatioLabel = rng::label("aug-ratio");

void require_positive_n(unsigned n) {
  if (n < 1) throw ValidationError("extension parameter n must be at least 1");
}

void require_nonzero_entries(const DiagonalBlocks& blocks) {
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      for (std::size_t k = 0; k < blocks.length(); ++k)
        if (blocks.diag(i, j)[k] == 0)
          throw SingularBlockError(
              "block (" + std::to_string(i) + "," + std::to_string(j) +
              ") has a zero entry at channel use " + std::to_string(k));
}

struct CaseScalars {
  std::vector<Elem> t, r, s;  // per channel use
};

// t = (m12 m23 m31) / (m21 m13 m32), r = m31/m32, s = m21/m23, entrywise.
CaseScalars case_scalars(const gf::FieldContext& ctx,
                         const DiagonalBlocks& blocks) {
  const std::size_t len = blocks.length();
  CaseScalars cs;
  cs.t.resize(len);
  cs.r.resize(len);
  cs.s.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    Elem a = ctx.mul(ctx.mul(blocks.diag(1, 2)[k], blocks.diag(2, 3)[k]),
                     blocks.diag(3, 1)[k]);
    Elem b = ctx.mul(ctx.mul(blocks.diag(2, 1)[k], blocks.diag(1, 3)[k]),
                     blocks.diag(3, 2)[k]);
    cs.t[k] = ctx.mul(a, ctx.inv(b));
    cs.r[k] = ctx.mul(blocks.diag(3, 1)[k], ctx.inv(blocks.diag(3, 2)[k]));
    cs.s[k] = ctx.mul(blocks.diag(2, 1)[k], ctx.inv(blocks.diag(2, 3)[k]));
  }
  return cs;
}

}  // namespace

gf::FieldMatrix DiagonalBlocks::to_matrix(int i, int j) const {
  gf::FieldMatrix m(length(), length());
  for (std::size_t k = 0; k < length(); ++k) m.at(k, k) = diag(i, j)[k];
  return m;
}

DiagonalBlocks build_blocks(const transfer::Evaluator& ev,
                            const SymbolExtension& ext) {
  if (ext.rows.rows != ext.length())
    throw DimensionError("symbol extension must have 2n+1 rows");
  if (ext.rows.cols != ev.width())
    throw DimensionError("assignment width does not match evaluator");
  DiagonalBlocks blocks;
  blocks.n = ext.n;
  for (auto& row : blocks.d)
    for (auto& v : row) v.assign(ext.length(), 0);
  for (std::size_t k = 0; k < ext.length(); ++k) {
    auto m = ev.eval(ext.rows.row(k));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) blocks.d[i][j][k] = m.at(i, j);
  }
  return blocks;
}

DiagonalBlocks build_blocks(const net::Network& net,
                            const SymbolExtension& ext) {
  transfer::NetworkEvaluator ev(net);
  return build_blocks(ev, ext);
}

PrecodingSet build_precoding_case1(const gf::FieldContext& ctx,
                                   const DiagonalBlocks& blocks, unsigned n) {
  require_positive_n(n);
  require_nonzero_entries(blocks);
  const std::size_t len = blocks.length();
  auto cs = case_scalars(ctx, blocks);
  for (std::size_t l = 0; l < len; ++l)
    for (std::size_t m = l + 1; m < len; ++m)
      if (cs.t[l] == cs.t[m])
        throw RankFailureError("repeated ratio value at channel uses " +
                               std::to_string(l) + " and " + std::to_string(m));

  PrecodingSet pre;
  pre.construction = transfer::Classification::Kind::CaseI_GenericRatio;
  pre.V1 = gf::FieldMatrix(len, n + 1);
  pre.V2 = gf::FieldMatrix(len, n);
  pre.V3 = gf::FieldMatrix(len, n);
  for (std::size_t k = 0; k < len; ++k) {
    Elem pw = 1;
    for (unsigned j = 0; j <= n; ++j) {
      pre.V1.at(k, j) = pw;
      if (j < n) pre.V2.at(k, j) = ctx.mul(cs.r[k], pw);
      if (j >= 1) pre.V3.at(k, j - 1) = ctx.mul(cs.s[k], ctx.mul(pw, cs.t[k]));
      pw = ctx.mul(pw, cs.t[k]);
    }
  }
  if (gf::mat_rank(ctx, pre.V1) != n + 1)
    throw RankFailureError("power-basis precoder lost column rank");
  return pre;
}

PrecodingSet build_precoding_case2(const gf::FieldContext& ctx,
                                   const DiagonalBlocks& blocks, unsigned n,
                                   Elem c_tilde, const gf::FieldMatrix& v1) {
  require_positive_n(n);
  require_nonzero_entries(blocks);
  const std::size_t len = blocks.length();
  if (v1.rows != len || v1.cols != n + 1)
    throw DimensionError("V1 must be (2n+1) x (n+1)");
  if (gf::mat_rank(ctx, v1) != n + 1)
    throw RankFailureError("sampled precoder is rank deficient");
  auto cs = case_scalars(ctx, blocks);

  PrecodingSet pre;
  pre.construction = transfer::Classification::Kind::CaseI_ConstantRatio;
  pre.c_tilde = c_tilde;
  pre.V1 = v1;
  pre.V2 = gf::FieldMatrix(len, n);
  pre.V3 = gf::FieldMatrix(len, n);
  for (std::size_t k = 0; k < len; ++k)
    for (unsigned j = 0; j < n; ++j) {
      pre.V2.at(k, j) = ctx.mul(cs.r[k], v1.at(k, j));
      pre.V3.at(k, j) = ctx.mul(c_tilde, ctx.mul(cs.s[k], v1.at(k, j)));
    }
  return pre;
}

PrecodingSet build_precoding_case2(const gf::FieldContext& ctx,
                                   const DiagonalBlocks& blocks, unsigned n,
                                   Elem c_tilde, std::uint64_t theta_seed) {
  require_positive_n(n);
  gf::FieldMatrix v1(blocks.length(), n + 1);
  rng::SplitMix64 g(theta_seed);
  for (auto& x : v1.data) x = rng::uniform_field(g, ctx);
  auto pre = build_precoding_case2(ctx, blocks, n, c_tilde, v1);
  pre.theta_seed = theta_seed;
  return pre;
}

std::unique_ptr<transfer::VirtualEvaluator> virtualize(
    const transfer::Evaluator& ev, std::vector<std::pair<int, int>> pairs) {
  return std::make_unique<transfer::VirtualEvaluator>(ev, std::move(pairs));
}

std::string ConditionReport::summary() const {
  auto flag = [](bool b) { return b ? "ok" : "FAIL"; };
  std::ostringstream os;
  os << "d1.align=" << flag(d1_alignment) << " d1.decode=" << flag(d1_decode)
     << " d2.contain=" << flag(d2_containment)
     << " d2.decode=" << flag(d2_decode)
     << " d3.contain=" << flag(d3_containment)
     << " d3.decode=" << flag(d3_decode);
  return os.str();
}

ConditionReport verify_conditions(const gf::FieldContext& ctx,
                                  const DiagonalBlocks& blocks,
                                  const PrecodingSet& pre, unsigned n) {
  auto scaled = [&](int i, int j, const gf::FieldMatrix& v) {
    return gf::diag_scale(ctx, blocks.diag(i, j), v);
  };
  auto rank = [&](const gf::FieldMatrix& m) { return gf::mat_rank(ctx, m); };

  ConditionReport rep;
  // D1: both interference images must share one n-dim subspace, and the
  // signal image must be injective and disjoint from it.
  {
    auto sig = scaled(1, 1, pre.V1);
    auto i2 = scaled(1, 2, pre.V2);
    auto i3 = scaled(1, 3, pre.V3);
    bool z2 = blocks.zero_block(1, 2), z3 = blocks.zero_block(1, 3);
    auto intf = gf::hstack(i2, i3);
    std::size_t rc = rank(intf);
    rep.d1_alignment = (z2 && z3) || (rc == n && (z2 || rank(i2) == n) &&
                                      (z3 || rank(i3) == n));
    rep.d1_decode =
        rank(sig) == n + 1 && rank(gf::hstack(sig, intf)) == n + 1 + rc;
  }
  // D2: interference from source 3 must land inside the source-1 image.
  {
    auto sig = scaled(2, 2, pre.V2);
    auto i1 = scaled(2, 1, pre.V1);
    auto i3 = scaled(2, 3, pre.V3);
    bool z1 = blocks.zero_block(2, 1), z3 = blocks.zero_block(2, 3);
    auto intf = gf::hstack(i1, i3);
    std::size_t rc = rank(intf);
    rep.d2_containment =
        z1 ? z3 : (rank(i1) == n + 1 && rc == n + 1);
    rep.d2_decode =
        rank(sig) == n && rank(gf::hstack(sig, intf)) == n + rc;
  }
  // D3: interference from source 2 must land inside the source-1 image.
  {
    auto sig = scaled(3, 3, pre.V3);
    auto i1 = scaled(3, 1, pre.V1);
    auto i2 = scaled(3, 2, pre.V2);
    bool z1 = blocks.zero_block(3, 1), z2 = blocks.zero_block(3, 2);
    auto intf = gf::hstack(i1, i2);
    std::size_t rc = rank(intf);
    rep.d3_containment =
        z1 ? z2 : (rank(i1) == n + 1 && rc == n + 1);
    rep.d3_decode =
        rank(sig) == n && rank(gf::hstack(sig, intf)) == n + rc;
  }
  return rep;
}

std::string Fraction::str() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

Fraction reduced(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw DimensionError("fraction with zero denominator");
  std::uint64_t g = std::gcd(num, den);
  return Fraction{num / (g ? g : 1), den / (g ? g : 1)};
}

ConditionReport verify_design(const net::Network& net, const CodeDesign& d) {
  const gf::FieldContext ctx(d.p);
  transfer::NetworkEvaluator real_ev(net, d.p);
  if (d.pre.virtual_values.empty())
    return verify_conditions(ctx, build_blocks(real_ev, d.z), d.pre, d.n);

  std::vector<std::pair<int, int>> pairs;
  for (const auto& [pr, _] : d.pre.virtual_values) pairs.push_back(pr);
  transfer::VirtualEvaluator virt(real_ev, pairs);
  SymbolExtension aug{d.n, gf::FieldMatrix(d.z.length(),
                                           d.z.rows.cols + pairs.size())};
  for (std::size_t k = 0; k < d.z.length(); ++k) {
    for (std::size_t c = 0; c < d.z.rows.cols; ++c)
      aug.rows.at(k, c) = d.z.rows.at(k, c);
    std::size_t c = d.z.rows.cols;
    for (const auto& [_, value] : d.pre.virtual_values)
      aug.rows.at(k, c++) = value;
  }
  return verify_conditions(ctx, build_blocks(virt, aug), d.pre, d.n);
}

ConditionReport verify_design_real(const net::Network& net,
                                   const CodeDesign& d) {
  const gf::FieldContext ctx(d.p);
  transfer::NetworkEvaluator real_ev(net, d.p);
  return verify_conditions(ctx, build_blocks(real_ev, d.z), d.pre, d.n);
}

Elem recommended_prime(const net::Network& net, unsigned n) {
  (void)net;
  require_positive_n(n);
  const std::uint64_t bound = 9ull + 12ull * n + 12ull * (2ull * n + 1);
  std::uint64_t target = 64 * bound;
  const std::uint64_t cap = 2147483647ull;  // 2^31 - 1, itself prime
  if (target >= cap) return cap;
  while (!gf::is_prime_u64(target)) ++target;
  return target;
}

namespace {

struct AttemptOutcome {
  std::optional<CodeDesign> design;
  std::string failure;
};

}  // namespace

CodeDesign search_design(const net::Network& net, const SearchOptions& opts) {
  require_positive_n(opts.n);
  const Elem p = opts.p != 0 ? opts.p : recommended_prime(net, opts.n);
  const gf::FieldContext ctx(p);
  const unsigned n = opts.n;
  const std::size_t len = 2 * n + 1;

  transfer::NetworkEvaluator real_ev(net, p);
  auto cls = transfer::classify(real_ev, opts.seed);
  using Kind = transfer::Classification::Kind;
  if (cls.kind == Kind::Degenerate_Rank1 || cls.kind == Kind::BrokenA1)
    throw CaseRejectedError(cls.tag());

  std::unique_ptr<transfer::VirtualEvaluator> virt;
  const transfer::Evaluator* ev = &real_ev;
  if (cls.kind == Kind::CaseII) {
    virt = virtualize(real_ev, cls.trivial_pairs);
    ev = virt.get();
  }

  // Pick the construction from the (possibly virtualized) ratio behaviour.
  bool power_construction = true;
  Elem c_tilde = 0;
  if (cls.kind == Kind::CaseI_ConstantRatio) {
    power_construction = false;
    c_tilde = *cls.c_tilde;
  } else if (cls.kind == Kind::CaseII) {
    auto ratio = transfer::ratio_constancy_test(
        *ev, 32, rng::derive(opts.seed, kAugRatioLabel));
    if (ratio.kind == transfer::VerdictKind::LikelyConstant) {
      power_construction = false;
      c_tilde = *ratio.ratio;
    }
  }

  const std::size_t s = real_ev.width();
  const auto& pairs = cls.trivial_pairs;
  const std::string digest = net::content_digest(net);

  auto run_attempt = [&](unsigned t) -> AttemptOutcome {
    const std::uint64_t aseed =
        rng::derive(rng::derive(opts.seed, kAttemptLabel), t);
    rng::SplitMix64 g(aseed);

    SymbolExtension real_ext{n, gf::FieldMatrix(len, s)};
    for (auto& x : real_ext.rows.data) x = rng::uniform_field(g, ctx);

    std::map<std::pair<int, int>, Elem> eta;
    for (const auto& pr : pairs) eta[pr] = rng::uniform_field(g, ctx);

    SymbolExtension aug_ext{n, gf::FieldMatrix(len, s + pairs.size())};
    for (std::size_t k = 0; k < len; ++k) {
      for (std::size_t c = 0; c < s; ++c)
        aug_ext.rows.at(k, c) = real_ext.rows.at(k, c);
      std::size_t c = s;
      for (const auto& pr : pairs) aug_ext.rows.at(k, c++) = eta.at(pr);
    }

    auto blocks = build_blocks(*ev, aug_ext);
    PrecodingSet pre;
    try {
      pre = power_construction
                ? build_precoding_case1(ctx, blocks, n)
                : build_precoding_case2(ctx, blocks, n, c_tilde,
                                        rng::derive(aseed, kThetaLabel));
    } catch (const Error& e) {
      return {std::nullopt, e.what()};
    }
    pre.virtual_values = eta;

    auto rep = verify_conditions(ctx, blocks, pre, n);
    if (!rep.all_ok()) return {std::nullopt, rep.summary()};

    auto scaled = [&](int i, int j, const gf::FieldMatrix& v) {
      return gf::diag_scale(ctx, blocks.diag(i, j), v);
    };
    CodeDesign d;
    try {
      d.W1 = gf::mat_inverse(
          ctx, gf::hstack(scaled(1, 1, pre.V1), scaled(1, 2, pre.V2)));
      d.W2 = gf::mat_inverse(
          ctx, gf::hstack(scaled(2, 2, pre.V2), scaled(2, 1, pre.V1)));
      d.W3 = gf::mat_inverse(
          ctx, gf::hstack(scaled(3, 3, pre.V3), scaled(3, 1, pre.V1)));
    } catch (const SingularMatrixError& e) {
      return {std::nullopt, e.what()};
    }
    d.network_digest = digest;
    d.n = n;
    d.p = p;
    d.classification = cls;
    d.z = std::move(real_ext);
    d.pre = std::move(pre);
    d.rates = {Fraction{n + 1, 2 * n + 1}, Fraction{n, 2 * n + 1},
               Fraction{n, 2 * n + 1}};
    d.seed = opts.seed;
    d.attempt = t;
    return {std::move(d), {}};
  };

  const unsigned stride = std::max(1u, opts.threads);
  std::string last_failure = "no attempts made";
  for (unsigned base = 0; base < opts.max_attempts; base += stride) {
    const unsigned count = std::min(stride, opts.max_attempts - base);
    std::vector<AttemptOutcome> outcomes(count);
    if (count == 1) {
      outcomes[0] = run_attempt(base);
    } else {
      std::vector<std::future<AttemptOutcome>> futs;
      futs.reserve(count);
      for (unsigned k = 0; k < count; ++k)
        futs.push_back(std::async(std::launch::async, run_attempt, base + k));
      for (unsigned k = 0; k < count; ++k) outcomes[k] = futs[k].get();
    }
    for (unsigned k = 0; k < count; ++k) {
      if (outcomes[k].design) return std::move(*outcomes[k].design);
      last_failure = outcomes[k].failure;
    }
  }
  throw ExhaustedError(opts.max_attempts, last_failure);
}

}  // namespace nca::align

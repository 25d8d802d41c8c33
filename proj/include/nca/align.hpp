#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nca/matrix.hpp"
#include "nca/network.hpp"
#include "nca/transfer.hpp"

namespace nca::align {

using gf::Elem;

/// Coefficient assignments for one block of 2n+1 consecutive channel uses;
/// row k is the full assignment used in channel use k.
struct SymbolExtension {
  unsigned n = 0;
  gf::FieldMatrix rows;  // (2n+1) x width

  std::size_t length() const { return 2 * n + 1; }
};

/// The nine per-block transfer matrices. Each is diagonal, entry (k,k) being
/// the (i,j) transfer value under channel use k's assignment, so only the
/// diagonals are stored.
struct DiagonalBlocks {
  unsigned n = 0;
  std::array<std::array<std::vector<Elem>, 3>, 3> d;

  std::size_t length() const { return 2 * n + 1; }
  const std::vector<Elem>& diag(int i, int j) const {
    return d[i - 1][j - 1];
  }
  bool zero_block(int i, int j) const {
    for (Elem v : diag(i, j))
      if (v != 0) return false;
    return true;
  }
  gf::FieldMatrix to_matrix(int i, int j) const;
};

DiagonalBlocks build_blocks(const transfer::Evaluator& ev,
                            const SymbolExtension& ext);
DiagonalBlocks build_blocks(const net::Network& net,
                            const SymbolExtension& ext);

/// Precoders for the three sources: V1 is (2n+1)x(n+1), V2 and V3 are
/// (2n+1)xn, all full column rank.
struct PrecodingSet {
  gf::FieldMatrix V1, V2, V3;
  transfer::Classification::Kind construction =
      transfer::Classification::Kind::CaseI_GenericRatio;
  std::optional<Elem> c_tilde;                   // constant-ratio construction
  std::map<std::pair<int, int>, Elem> virtual_values;
  std::optional<std::uint64_t> theta_seed;       // constant-ratio construction
};

/// Ratio-power construction: with t_k the per-use value of
/// (m12 m23 m31)/(m21 m13 m32), V1's columns are the entrywise powers
/// t^0..t^n, V2 = R V1 restricted to its first n columns, V3 = S V1
/// restricted to its last n columns, R = M31/M32 and S = M21/M23.
/// Throws SingularBlockError when any block entry is zero and
/// RankFailureError when two t_k coincide (the power columns then lose rank).
PrecodingSet build_precoding_case1(const gf::FieldContext& ctx,
                                   const DiagonalBlocks& blocks, unsigned n);

/// Constant-ratio construction: V1 is free, V2 = R V1 A, V3 = c~ S V1 A with
/// A selecting V1's first n columns. The matrix overload uses the supplied
/// V1; the seed overload samples V1 uniformly.
PrecodingSet build_precoding_case2(const gf::FieldContext& ctx,
                                   const DiagonalBlocks& blocks, unsigned n,
                                   Elem c_tilde, const gf::FieldMatrix& v1);
PrecodingSet build_precoding_case2(const gf::FieldContext& ctx,
                                   const DiagonalBlocks& blocks, unsigned n,
                                   Elem c_tilde, std::uint64_t theta_seed);

/// Replace identically-zero off-diagonal entries with fresh variables so the
/// generic construction applies; see transfer::VirtualEvaluator.
std::unique_ptr<transfer::VirtualEvaluator> virtualize(
    const transfer::Evaluator& ev, std::vector<std::pair<int, int>> pairs);

/// Alignment and decodability checks for one destination each:
///   d1_alignment    interference at D1 collapses into an n-dim subspace
///   d1_decode       signal block injective and disjoint from interference
///   d2_containment  D3-interference at D2 lies inside the D1-signal image
///   d2_decode       as d1_decode for D2
///   d3_*            analogous for D3
/// A structurally zero interference block is trivially aligned/contained.
struct ConditionReport {
  bool d1_alignment = false;
  bool d1_decode = false;
  bool d2_containment = false;
  bool d2_decode = false;
  bool d3_containment = false;
  bool d3_decode = false;

  bool all_ok() const {
    return d1_alignment && d1_decode && d2_containment && d2_decode &&
           d3_containment && d3_decode;
  }
  std::string summary() const;
};

ConditionReport verify_conditions(const gf::FieldContext& ctx,
                                  const DiagonalBlocks& blocks,
                                  const PrecodingSet& pre, unsigned n);

struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  bool operator==(const Fraction&) const = default;
  std::string str() const;
  double value() const { return static_cast<double>(num) / den; }
};

Fraction reduced(std::uint64_t num, std::uint64_t den);

/// A complete validated code: coefficient schedule, precoders and the exact
/// zero-forcing decode matrices, pinned to one network by content digest.
struct CodeDesign {
  std::string network_digest;
  unsigned n = 0;
  Elem p = 0;
  transfer::Classification classification;
  SymbolExtension z;  // (2n+1) x s, real coefficients only
  PrecodingSet pre;
  gf::FieldMatrix W1, W2, W3;  // inverses of the stacked receive matrices
  std::array<Fraction, 3> rates;
  std::uint64_t seed = 0;
  unsigned attempt = 0;
};

/// Rebuild the blocks a design was constructed against (virtual entries
/// substituted at their recorded values) and re-check every condition.
ConditionReport verify_design(const net::Network& net, const CodeDesign& d);

/// Re-check the conditions against the real network blocks, i.e. with
/// structurally zero interference left at zero.
ConditionReport verify_design_real(const net::Network& net,
                                   const CodeDesign& d);

/// Conservative per-variable degree bound for an n-extension design, and the
/// smallest prime at least 64 times it (capped at 2^31 - 1). Callers may
/// override with any larger prime.
Elem recommended_prime(const net::Network& net, unsigned n);

struct SearchOptions {
  unsigned n = 1;
  Elem p = 0;  // 0: use recommended_prime
  std::uint64_t seed = 0;
  unsigned max_attempts = 64;
  unsigned threads = 1;
};

/// Randomized search for a valid design: sample a coefficient schedule,
/// build the precoders for the classified case, verify every condition, and
/// invert the receive matrices. Deterministic given (network, options);
/// attempt t draws from a stream derived from (seed, t), and the lowest
/// successful attempt index wins regardless of thread count.
/// Throws CaseRejectedError for degenerate networks and ExhaustedError when
/// no attempt passes.
CodeDesign search_design(const net::Network& net, const SearchOptions& opts);

}  // namespace nca::align

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nca/matrix.hpp"
#include "nca/network.hpp"

namespace nca::transfer {

using gf::Elem;

/// The 3x3 transfer matrix evaluated at one coefficient assignment.
struct TransferEvaluation {
  gf::FieldMatrix values;        // entry (i,j): end-to-end gain S_{j+1} -> D_{i+1}
  std::vector<Elem> assignment;  // the point it was evaluated at
};

/// Point evaluation of the nine transfer entries. Entries are never expanded
/// symbolically; every test below works from evaluations alone.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual const gf::FieldContext& field() const = 0;
  /// Length of an assignment vector.
  virtual std::size_t width() const = 0;
  /// 3x3 entry matrix at the given assignment.
  virtual gf::FieldMatrix eval(std::span<const Elem> assignment) const = 0;
  /// Total-degree bound of entry (i,j), 1-based; 0 means identically zero.
  virtual unsigned degree_bound(int i, int j) const = 0;
};

/// Evaluation by symbol propagation along the DAG in topological order.
class NetworkEvaluator : public Evaluator {
 public:
  NetworkEvaluator(const net::Network& net, gf::Elem prime);
  explicit NetworkEvaluator(const net::Network& net)
      : NetworkEvaluator(net, net.field_prime()) {}

  const gf::FieldContext& field() const override { return ctx_; }
  std::size_t width() const override { return plan_.coeff_count; }
  gf::FieldMatrix eval(std::span<const Elem> assignment) const override;
  unsigned degree_bound(int i, int j) const override {
    return degree_[i - 1][j - 1];
  }

  const net::Network& network() const { return net_; }

 private:
  const net::Network& net_;
  gf::FieldContext ctx_;
  net::CoefficientIndex index_;
  net::PropagationPlan plan_;
  std::array<std::array<unsigned, 3>, 3> degree_{};  // longest path + 2 coeffs
};

/// Wraps another evaluator, replacing the listed (identically zero,
/// off-diagonal) entries with fresh variables appended to the assignment.
class VirtualEvaluator : public Evaluator {
 public:
  /// Pairs are 1-based (i, j), i != j. Throws InvalidPairError when the set
  /// is empty or contains a diagonal pair.
  VirtualEvaluator(const Evaluator& base,
                   std::vector<std::pair<int, int>> pairs);

  const gf::FieldContext& field() const override { return base_.field(); }
  std::size_t width() const override { return base_.width() + pairs_.size(); }
  gf::FieldMatrix eval(std::span<const Elem> assignment) const override;
  unsigned degree_bound(int i, int j) const override;

  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

 private:
  const Evaluator& base_;
  std::vector<std::pair<int, int>> pairs_;  // sorted
};

TransferEvaluation evaluate_transfer(const net::Network& net,
                                     std::span<const Elem> xi);

enum class VerdictKind {
  CertifiedNonzero,
  LikelyZero,
  CertifiedDistinct,
  LikelyProportional,
  LikelyConstant,
  CertifiedNonconstant,
  CertifiedAsymmetric,
  Unverified,
};

const char* to_string(VerdictKind k);

/// Outcome of one probabilistic identity test. "Certified" verdicts carry
/// witness assignments that re-verify; "Likely" verdicts carry an upper
/// bound on the probability the verdict is wrong.
struct IdentityVerdict {
  VerdictKind kind;
  std::vector<std::vector<Elem>> witness;  // 0, 1 or 2 assignments
  double error_bound = 1.0;                // 0 for certified kinds
  std::optional<Elem> ratio;               // common ratio, LikelyConstant only
};

/// Is entry (i,j) the zero polynomial? Nonzero evaluations certify "no".
IdentityVerdict triviality_test(const Evaluator& ev, int i, int j,
                                unsigned samples, std::uint64_t seed);

/// Is m_ii proportional to m_ij (i != j)? A differing cross-product pair
/// certifies they are distinct. Requires both entries certified nonzero.
IdentityVerdict proportionality_test(const Evaluator& ev, int i, int j,
                                     unsigned samples, std::uint64_t seed);

/// Is a/b constant, where a = m12*m23*m31 and b = m21*m13*m32? Requires all
/// six off-diagonal entries certified nonzero.
IdentityVerdict ratio_constancy_test(const Evaluator& ev, unsigned samples,
                                     std::uint64_t seed);

enum class Assumption { A2, A3, A4 };
const char* to_string(Assumption a);

/// Searches for two assignments with equal a/b value but different value of
/// the assumption's rational function; such a pair certifies the function is
/// not expressible through a/b. Sound but incomplete: exhausting the budget
/// yields Unverified, never "violated". `budget` caps examined collision
/// pairs; evaluations are capped at 64 * budget.
IdentityVerdict asymmetry_certificate(const Evaluator& ev, Assumption which,
                                      std::uint64_t budget,
                                      std::uint64_t seed);

/// Maximum transfer-matrix rank observed over `probes` random assignments.
std::size_t probe_rank(const Evaluator& ev, unsigned probes,
                       std::uint64_t seed);

/// Structural classification of a network's transfer matrix.
struct Classification {
  enum class Kind {
    CaseI_GenericRatio,
    CaseI_ConstantRatio,
    CaseII,
    Degenerate_Rank1,
    BrokenA1,
  };
  Kind kind;
  std::optional<Elem> c_tilde;                    // CaseI_ConstantRatio
  std::vector<std::pair<int, int>> trivial_pairs; // CaseII, sorted, 1-based
  std::optional<std::pair<int, int>> broken_pair; // BrokenA1

  std::string tag() const;
};

struct ClassifyOptions {
  unsigned samples = 32;
  unsigned rank_probes = 8;
};

/// Deterministic given (evaluator, seed). Throws MincutViolationError when a
/// diagonal entry tests identically zero.
Classification classify(const Evaluator& ev, std::uint64_t seed,
                        const ClassifyOptions& opts = {});
Classification classify(const net::Network& net, std::uint64_t seed,
                        const ClassifyOptions& opts = {});

struct AnalysisOptions {
  std::uint64_t seed = 0;
  unsigned samples = 32;
  std::uint64_t asym_budget = 10000;
};

/// Everything the `analyze` command reports.
struct AnalysisReport {
  Classification classification;
  std::array<int, 3> mincuts;
  // a1[i][j]: for i != j the proportionality verdict (or the triviality
  // verdict when m_ij is identically zero); unset on the diagonal.
  std::array<std::array<std::optional<IdentityVerdict>, 3>, 3> a1;
  std::optional<IdentityVerdict> ratio;
  std::map<std::string, IdentityVerdict> asymmetry;  // keys A2, A3, A4
  std::size_t observed_rank = 0;
  std::uint64_t seed = 0;
  unsigned samples = 0;
};

AnalysisReport analyze(const net::Network& net, const AnalysisOptions& opts);

}  // namespace nca::transfer

#pragma once

// Ties the delta ODE to its Jacobi matrix: the node substitution
// Z_k = r_{k+1} f(x_k), the residual oracle for it, and verdict aggregation
// over every applicable criterion.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sldl/criteria.hpp"
#include "sldl/jacobi.hpp"
#include "sldl/quasidiff.hpp"
#include "sldl/series.hpp"

namespace sldl {

// Z_k = sqrt(d_k + d_{k+1}) f(x_k) for k = 1..min(|f|, |d| - 1); offset 1.
VecSeq nodes_to_Z(std::span<const Vector> f_at_nodes, std::span<const double> d);

struct EquivalenceResidual {
  double max_abs;         // max_k ||(lZ)_k||
  // max_k ||(lZ)_k|| / (||B_k|| ||Z_{k+1}|| + a_k ||Z_k|| + ||B_{k-1}|| ||Z_{k-1}||) with
  // a_k = (||H_k|| + (1/d_k + 1/d_{k+1}) sqrt(n)) / r_{k+1}^2, the size of A_k before cancellation.
  double max_normalized;
  std::size_t equations;  // k = 2..count
};

// Propagates the seed (lambda = 0) through a DeltaNodes model with at least
// count + 2 nodes, samples f at the nodes, and applies the recurrence built
// from the node spacings and jumps. k = 1 is skipped: it involves the
// arbitrary boundary block B_0.
EquivalenceResidual equivalence_residual(const CoefficientModel& model, std::size_t count, const QuasiState& seed);

// Terms ||Z_k||^2. ConvergesBounded by the shared convergence policy;
// DivergesProven here is a trend certificate (the nonzero tail does not
// decrease), not a proof.
CriterionReport l2_tail_report(const VecSeq& Z);

enum class Classification { LimitPoint, LimitCircle, NotLimitCircle, Inconclusive };
enum class VerdictSide { Continuous, Discrete, Both };

const char* classification_name(Classification c) noexcept;
const char* side_name(VerdictSide s) noexcept;

struct Evidence {
  std::string criterion;
  SeriesVerdict verdict;
  std::string basis;
};

struct Verdict {
  Classification classification = Classification::Inconclusive;
  std::vector<Evidence> evidence;
  VerdictSide side = VerdictSide::Both;
  // Every report behind the evidence, in evidence order.
  std::vector<CriterionReport> reports;
};

struct Problem {
  std::string name;
  std::shared_ptr<const CoefficientModel> model;
  std::optional<SigmaProfile> sigma;
  std::optional<IntervalSeq> intervals;
  std::optional<DeltaLattice> lattice;
  std::optional<JacobiBlocks> blocks;
};

struct ClassifyConfig {
  std::size_t horizon = 10000;  // terms of the discrete-side series
  SeriesPolicy policy;
};

// Runs every applicable criterion in a fixed order. LimitCircle needs a
// certified t7 or cor3 check, LimitPoint a certified Carleman or t2 check,
// NotLimitCircle a divergent t1 / t5 / cor1 / cor2 series. LimitPoint and
// NotLimitCircle agree (reported as LimitPoint); LimitCircle next to either
// throws ConflictingEvidence.
Verdict classify(const Problem& problem, const ClassifyConfig& config = {});

struct GalleryEntry {
  std::string name;
  std::string slug;
  Problem problem;
  ClassifyConfig config;
  Classification expected;
  std::string note;
};

std::vector<GalleryEntry> gallery();
// Lookup by name or slug; nullopt when unknown.
std::optional<GalleryEntry> gallery_entry(std::string_view key);

}  // namespace sldl

#pragma once

// Term sequences of series criteria and the verdict policy applied to them.
// Divergence and convergence of an infinite series are only semi-decidable
// from a finite window, so every verdict names the certificate that fired.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sldl {

enum class SeriesVerdict { DivergesProven, ConvergesBounded, Inconclusive };

const char* verdict_name(SeriesVerdict v) noexcept;

struct Certificate {
  // "lower_bound", "threshold", "ratio", "raabe", "vanishing_tail"
  std::string kind;
  double constant = 0.0;
};

struct CriterionReport {
  std::string criterion;
  std::vector<double> terms;
  std::vector<double> partial_sums;
  // Natural logs of the terms; filled only by criteria whose terms can leave
  // the double range. A term that overflows is stored as +inf in `terms`.
  std::vector<double> log_terms;
  SeriesVerdict verdict = SeriesVerdict::Inconclusive;
  std::string verdict_basis;
  std::string policy;
  std::optional<Certificate> certificate;
};

struct SeriesPolicy {
  // The supplied window is one period of data continued periodically;
  // constant (congruent) inputs then give an analytic positive term floor.
  bool periodic_extension = false;
  // Threshold mode: declare divergence once the partial sum exceeds this and
  // k * t_k does not decrease from the third to the fourth quarter.
  std::optional<double> threshold;
};

CriterionReport make_report(std::string criterion, std::vector<double> terms);
CriterionReport make_log_report(std::string criterion, std::vector<double> log_terms);

// Divergence side. `floor` is an analytic eventual lower bound on the terms
// (when the inputs admit one); `floor_basis` says where it came from.
void apply_divergence_policy(CriterionReport& report, const SeriesPolicy& policy, std::optional<double> floor,
                             const std::string& floor_basis);

// Convergence certificate on the last half of the window, zero terms
// dropped: all zero (vanishing tail), ratio t_{k+1}/t_k <= q <= 0.99, or
// Raabe k (t_k/t_{k+1} - 1) >= 1.05 throughout.
std::optional<Certificate> certify_convergence(std::span<const double> log_terms);

// Sets ConvergesBounded when certify_convergence succeeds.
void apply_convergence_policy(CriterionReport& report);

constexpr double kRatioBound = 0.99;
constexpr double kRaabeBound = 1.05;

}  // namespace sldl

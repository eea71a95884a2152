#include "sldl/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "sldl/errors.hpp"
#include "sldl/format.hpp"

namespace sldl {

namespace {

constexpr const char* kDivergencePolicy =
    "DivergesProven only from an analytic eventual lower bound on the terms or explicit threshold mode; "
    "otherwise Inconclusive";
constexpr const char* kConvergencePolicy =
    "ConvergesBounded only when the last half of the window (zero terms dropped) is all zero, or has "
    "t[k+1]/t[k] <= 0.99, or Raabe k(t[k]/t[k+1]-1) >= 1.05; otherwise Inconclusive";

std::vector<double> running_sums(const std::vector<double>& terms) {
  std::vector<double> sums(terms.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    acc += terms[k];
    sums[k] = acc;
  }
  return sums;
}

}  // namespace

const char* verdict_name(SeriesVerdict v) noexcept {
  switch (v) {
    case SeriesVerdict::DivergesProven: return "DivergesProven";
    case SeriesVerdict::ConvergesBounded: return "ConvergesBounded";
    case SeriesVerdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

CriterionReport make_report(std::string criterion, std::vector<double> terms) {
  for (double t : terms) {
    if (!(t >= 0.0)) throw Error(Errc::InvalidArgument, criterion + ": series terms must be nonnegative");
  }
  CriterionReport report;
  report.criterion = std::move(criterion);
  report.partial_sums = running_sums(terms);
  report.terms = std::move(terms);
  report.verdict_basis = report.terms.empty() ? "empty series" : "no certificate";
  return report;
}

CriterionReport make_log_report(std::string criterion, std::vector<double> log_terms) {
  std::vector<double> terms(log_terms.size());
  for (std::size_t k = 0; k < log_terms.size(); ++k) {
    const double lt = log_terms[k];
    if (std::isnan(lt)) throw Error(Errc::InvalidArgument, criterion + ": NaN log term");
    terms[k] = lt > std::log(std::numeric_limits<double>::max()) ? std::numeric_limits<double>::infinity()
                                                                  : std::exp(lt);
  }
  CriterionReport report = make_report(std::move(criterion), std::move(terms));
  report.log_terms = std::move(log_terms);
  return report;
}

void apply_divergence_policy(CriterionReport& report, const SeriesPolicy& policy, std::optional<double> floor,
                             const std::string& floor_basis) {
  report.policy = kDivergencePolicy;
  const auto& terms = report.terms;
  if (terms.empty()) {
    report.verdict = SeriesVerdict::Inconclusive;
    report.verdict_basis = "empty series";
    return;
  }
  if (floor && *floor > 0.0) {
    const double eps = *floor;
    const bool holds = std::all_of(terms.begin(), terms.end(), [eps](double t) { return t >= eps * (1.0 - 1e-12); });
    if (holds) {
      report.verdict = SeriesVerdict::DivergesProven;
      report.verdict_basis = floor_basis + "; terms >= " + format_number(eps) + " eventually";
      report.certificate = Certificate{"lower_bound", eps};
      return;
    }
  }
  if (policy.threshold && terms.size() >= 4) {
    const std::size_t n = terms.size();
    auto weighted_min = [&](std::size_t lo, std::size_t hi) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = lo; k < hi; ++k) best = std::min(best, static_cast<double>(k + 1) * terms[k]);
      return best;
    };
    const double third = weighted_min(n / 2, 3 * n / 4);
    const double fourth = weighted_min(3 * n / 4, n);
    if (report.partial_sums.back() > *policy.threshold && third > 0.0 && fourth >= third) {
      report.verdict = SeriesVerdict::DivergesProven;
      report.verdict_basis = "threshold mode: partial sum " + format_number(report.partial_sums.back()) + " > " +
                             format_number(*policy.threshold) + " with terms decaying no faster than 1/k";
      report.certificate = Certificate{"threshold", *policy.threshold};
      return;
    }
  }
  report.verdict = SeriesVerdict::Inconclusive;
  report.verdict_basis = floor ? floor_basis + "; no positive eventual lower bound" : "no analytic lower bound";
}

std::optional<Certificate> certify_convergence(std::span<const double> log_terms) {
  const std::size_t n = log_terms.size();
  if (n < 4) return std::nullopt;
  std::vector<double> tail;
  for (std::size_t k = n / 2; k < n; ++k) {
    if (std::isfinite(log_terms[k])) tail.push_back(log_terms[k]);
    else if (log_terms[k] > 0.0) return std::nullopt;
  }
  if (tail.empty()) return Certificate{"vanishing_tail", 0.0};
  if (tail.size() < 2) return std::nullopt;

  double max_log_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < tail.size(); ++k) max_log_ratio = std::max(max_log_ratio, tail[k + 1] - tail[k]);
  if (max_log_ratio <= std::log(kRatioBound)) return Certificate{"ratio", std::exp(max_log_ratio)};

  // Raabe on the compressed sequence; its index continues the compressed
  // numbering of the full window so that k ~ position in the series.
  std::size_t nonzero_head = 0;
  for (std::size_t k = 0; k < n / 2; ++k)
    if (std::isfinite(log_terms[k])) ++nonzero_head;
  double min_raabe = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < tail.size(); ++k) {
    const double index = static_cast<double>(nonzero_head + k + 1);
    min_raabe = std::min(min_raabe, index * std::expm1(tail[k] - tail[k + 1]));
  }
  if (min_raabe >= kRaabeBound) return Certificate{"raabe", min_raabe};
  return std::nullopt;
}

void apply_convergence_policy(CriterionReport& report) {
  report.policy = kConvergencePolicy;
  std::vector<double> logs = report.log_terms;
  if (logs.empty()) {
    logs.reserve(report.terms.size());
    for (double t : report.terms) logs.push_back(std::log(t));
  }
  if (auto cert = certify_convergence(logs)) {
    report.verdict = SeriesVerdict::ConvergesBounded;
    report.verdict_basis = cert->kind == "vanishing_tail"
                               ? std::string("all terms in the last half of the window vanish")
                               : cert->kind + " test on the last half of the window: " + format_number(cert->constant);
    report.certificate = std::move(cert);
    return;
  }
  report.verdict = SeriesVerdict::Inconclusive;
  report.verdict_basis = report.terms.empty() ? "empty series" : "no convergence certificate";
}

}  // namespace sldl

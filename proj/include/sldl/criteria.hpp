#pragma once

// Continuous-side series criteria: the interval series of the Cauchy kernel
// (exclusion of the limit-circle case), its delta closed forms and
// corollaries, and the monotone-sigma limit-point predicate.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sldl/matcore.hpp"
#include "sldl/quasidiff.hpp"
#include "sldl/sequence.hpp"
#include "sldl/series.hpp"

namespace sldl {

struct Interval {
  double a;
  double b;
  std::optional<double> c;  // marker with a < c < b

  double rho() const { return *c - a; }
  double s() const { return b - *c; }
};

class IntervalSeq {
 public:
  IntervalSeq() = default;
  // Throws InvalidArgument unless 0 <= a_k < b_k <= a_{k+1} and a_k < c_k < b_k.
  explicit IntervalSeq(std::vector<Interval> intervals);

  // count intervals of length `length` starting at `start`, markers at the midpoints.
  static IntervalSeq uniform(double length, std::size_t count, double start = 0.0);
  // [x_k - d_k/2, x_k + d_{k+1}/2] with marker x_k for the nodes of a delta model.
  static IntervalSeq around_nodes(std::span<const double> nodes);

  std::span<const Interval> items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  bool has_markers() const noexcept;
  const Interval& operator[](std::size_t k) const { return items_[k]; }

 private:
  std::vector<Interval> items_;
};

// Entrywise integrals of |k_ij(x, t)|^2 over a <= t <= x <= b.
struct KernelIntegrals {
  std::size_t n;
  std::vector<double> values;  // row-major

  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double total() const;
};

// Exact for step-form models (the integrand is a polynomial of degree <= 2 in
// each variable on every cell); composite 7-point Gauss-Legendre refined to
// 1e-8 relative otherwise. The kernel is built from a fundamental pair local
// to a, which depends only on the coefficients inside [a, b].
KernelIntegrals kernel_integrals(const CoefficientModel& model, double a, double b);

// (int_a^b dx int_a^x ||K(x,t)||_F^2 dt)^(1/2); requires lambda = 0 and
// [a, b] inside the pair's span (OffGrid otherwise).
double t1_term(const FundamentalPair& pair, double a, double b);
double t1_term(const CoefficientModel& model, double a, double b);

// Terms t1_term over each interval. Divergence certifies that the deficiency
// numbers are not maximal (the limit-circle case is excluded).
CriterionReport t1_series(const CoefficientModel& model, const IntervalSeq& intervals,
                          const SeriesPolicy& policy = {});

struct Ineq78Margin {
  double lhs;  // int_a^b (||Phi||^2 + ||Psi||^2) dx
  double rhs;  // sqrt(2) * t1_term(a, b)
};

Ineq78Margin ineq78_margin(const FundamentalPair& pair, double a, double b);

// Closed forms for the kernel of -y'' + H delta(x - c) y on [a, b] with
// rho = c - a and s = b - c.
double lemma2_diag(double h_ii, double rho, double s);
double lemma2_offdiag(Complex h_ij, double rho, double s);
double lemma2_lower_bound(double h_ii, double rho, double s);

// Channel (i, i) is diagonal, (i, j) with i != j off-diagonal; 0-based.
struct Channel {
  std::size_t i;
  std::size_t j;
  bool diagonal() const noexcept { return i == j; }
};

CriterionReport t5_series(const IntervalSeq& intervals, std::span<const Matrix> jumps, Channel channel,
                          const SeriesPolicy& policy = {});

// Midpoint markers: lengths are rho_k = b_k - a_k.
CriterionReport cor1_series(std::span<const double> lengths, std::span<const Matrix> jumps, Channel channel,
                            const SeriesPolicy& policy = {});
// Delta lattice with spacings d_k and jumps H_k, k = 1..count.
CriterionReport cor2_series(const SeqRule& d, const MatrixSeqRule& H, std::size_t count, Channel channel,
                            const SeriesPolicy& policy = {});

// The jump of a sigma model at each interval's marker, when sigma is
// constant on [a_k, c_k) and on [c_k, b_k]. nullopt when some interval does
// not have that shape (or the model is not a sigma model).
std::optional<std::vector<Matrix>> jumps_at_markers(const CoefficientModel& model, const IntervalSeq& intervals);

// sigma(x) = S_k + (x - x_k) D_k on [x_k, x_{k+1}); sigma' = D_k per piece.
class SigmaProfile {
 public:
  SigmaProfile(double X, std::vector<double> breakpoints, std::vector<Matrix> values, std::vector<Matrix> slopes);
  // sigma(x) = x * slope on [0, X].
  static SigmaProfile linear(double X, Matrix slope);

  std::size_t order() const noexcept { return slopes_.front().order(); }
  double end() const noexcept { return X_; }
  std::span<const double> starts() const noexcept { return starts_; }
  std::span<const Matrix> slopes() const noexcept { return slopes_; }
  std::span<const Matrix> values() const noexcept { return values_; }
  // Pieces overlapping the open interval (a, b).
  std::vector<std::size_t> pieces_overlapping(double a, double b) const;

 private:
  double X_;
  std::vector<double> starts_;
  std::vector<Matrix> values_;
  std::vector<Matrix> slopes_;
};

struct T2Result {
  bool hypothesis_ok;
  CriterionReport series;
  bool limit_point() const noexcept { return hypothesis_ok && series.verdict == SeriesVerdict::DivergesProven; }
};

// sigma' >= O (PSD, tol 1e-10) on every [a_k, b_k] and terms (b_k - a_k)^2.
T2Result t2_predicate(const SigmaProfile& sigma, const IntervalSeq& intervals, const SeriesPolicy& policy = {});
// Step sigma models: sigma' = O between jumps. VariantUnsupported when a jump
// falls inside an interval or the model is not a sigma model.
T2Result t2_predicate(const CoefficientModel& model, const IntervalSeq& intervals, const SeriesPolicy& policy = {});

}  // namespace sldl

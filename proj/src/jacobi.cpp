#include "sldl/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sldl/errors.hpp"
#include "sldl/format.hpp"

namespace sldl {

namespace {

Vector add(Vector a, const Vector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

void check_real_symmetric(const Matrix& h, std::size_t k) {
  bool ok = is_hermitian(h, 1e-10);
  for (Complex z : h.data()) ok = ok && std::abs(z.imag()) <= 1e-10;
  if (!ok) throw Error(Errc::NonSymmetricJump, "H_" + std::to_string(k) + " is not real symmetric");
}

// r_k = sqrt(d_{k-1} + d_k) with 1-based d; d[0] holds d_1.
double r_squared(std::span<const double> d, std::size_t k) { return d[k - 2] + d[k - 1]; }

JacobiBlocks build_blocks(std::span<const double> d, std::span<const double> d_reciprocal, std::span<const Matrix> H,
                          std::optional<std::pair<Matrix, Matrix>> boundary, std::optional<SeqRule> rule);

}  // namespace

std::vector<double> DeltaLattice::positions(std::size_t count) const {
  std::vector<double> x(count);
  double acc = 0.0;
  for (std::size_t k = 1; k <= count; ++k) {
    acc += d.value(k);
    x[k - 1] = acc;
  }
  return x;
}

CoefficientModel DeltaLattice::model(std::size_t count) const {
  if (H.order() != n) throw Error(Errc::ShapeMismatch, "lattice jumps do not have order n");
  if (count == 0) throw Error(Errc::InvalidArgument, "lattice model needs at least one node");
  const auto x = positions(count);
  std::vector<DeltaNode> nodes;
  nodes.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) nodes.push_back({x[k - 1], H.value(k)});
  return CoefficientModel::delta_nodes(n, x.back() + d.value(count + 1), std::move(nodes));
}

JacobiBlocks DeltaLattice::blocks(std::size_t count) const {
  if (H.order() != n) throw Error(Errc::ShapeMismatch, "lattice jumps do not have order n");
  return build_blocks(d.take(count + 2), d.take_reciprocal(count + 2), H.take(count + 1), std::nullopt, d);
}

JacobiBlocks::JacobiBlocks(std::vector<Matrix> A, std::vector<Matrix> B, std::optional<DeltaProvenance> provenance)
    : A_(std::move(A)), B_(std::move(B)), provenance_(std::move(provenance)) {
  if (A_.empty() || A_.size() != B_.size()) throw Error(Errc::ShapeMismatch, "need equally many A_k and B_k");
  const std::size_t n = A_.front().order();
  B_inv_.reserve(B_.size());
  for (std::size_t k = 0; k < A_.size(); ++k) {
    if (A_[k].order() != n || B_[k].order() != n) throw Error(Errc::ShapeMismatch, "blocks differ in order");
    if (!is_hermitian(A_[k], 1e-10)) throw Error(Errc::InvalidArgument, "A_" + std::to_string(k) + " is not Hermitian");
    try {
      B_inv_.push_back(invert(B_[k]));
    } catch (const Error&) {
      throw Error(Errc::Singular, "B_" + std::to_string(k) + " is not invertible");
    }
  }
}

const Matrix& JacobiBlocks::A(std::size_t k) const {
  if (k >= A_.size()) throw Error(Errc::IndexOutOfRange, "A_" + std::to_string(k) + " not stored");
  return A_[k];
}

const Matrix& JacobiBlocks::B(std::size_t k) const {
  if (k >= B_.size()) throw Error(Errc::IndexOutOfRange, "B_" + std::to_string(k) + " not stored");
  return B_[k];
}

const Matrix& JacobiBlocks::B_inverse(std::size_t k) const {
  if (k >= B_inv_.size()) throw Error(Errc::IndexOutOfRange, "B_" + std::to_string(k) + " not stored");
  return B_inv_[k];
}

const Vector& VecSeq::at(std::size_t j) const {
  if (!contains(j)) throw Error(Errc::IndexOutOfRange, "u_" + std::to_string(j) + " not stored");
  return values[j - offset];
}

JacobiBlocks blocks_from_delta(std::span<const double> d, std::span<const Matrix> H,
                               std::optional<std::pair<Matrix, Matrix>> boundary) {
  std::vector<double> recip(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) recip[k] = 1.0 / d[k];
  return blocks_from_delta(d, recip, H, std::move(boundary));
}

JacobiBlocks blocks_from_delta(std::span<const double> d, std::span<const double> d_reciprocal,
                               std::span<const Matrix> H, std::optional<std::pair<Matrix, Matrix>> boundary) {
  return build_blocks(d, d_reciprocal, H, std::move(boundary), std::nullopt);
}

namespace {

JacobiBlocks build_blocks(std::span<const double> d, std::span<const double> d_reciprocal, std::span<const Matrix> H,
                          std::optional<std::pair<Matrix, Matrix>> boundary, std::optional<SeqRule> rule) {
  if (d.size() < 3) throw Error(Errc::ShapeMismatch, "need at least three spacings");
  if (H.size() + 1 != d.size() && H.size() != d.size()) {
    throw Error(Errc::ShapeMismatch, "need |H| = |d| - 1 or |H| = |d| (got " + std::to_string(H.size()) + " and " +
                                         std::to_string(d.size()) + ")");
  }
  if (d_reciprocal.size() != d.size()) throw Error(Errc::ShapeMismatch, "reciprocals do not match spacings");
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (!(d[k] > 0.0) || !std::isfinite(d[k])) {
      throw Error(Errc::NonPositiveSpacing, "d_" + std::to_string(k + 1) + " = " + format_number(d[k]));
    }
  }
  const std::size_t n = H.front().order();
  for (std::size_t k = 0; k < H.size(); ++k) {
    if (H[k].order() != n) throw Error(Errc::ShapeMismatch, "jumps differ in order");
    check_real_symmetric(H[k], k + 1);
  }

  const std::size_t count = d.size() - 2;
  std::vector<Matrix> A, B;
  A.reserve(count + 1);
  B.reserve(count + 1);
  const bool default_boundary = !boundary.has_value();
  if (boundary) {
    if (boundary->first.order() != n || boundary->second.order() != n) {
      throw Error(Errc::ShapeMismatch, "boundary blocks have the wrong order");
    }
    A.push_back(boundary->first);
    B.push_back(boundary->second);
  } else {
    A.push_back(Matrix(n));
    B.push_back(-Matrix::identity(n));
  }
  const Matrix id = Matrix::identity(n);
  for (std::size_t k = 1; k <= count; ++k) {
    // 1-based: d_k = d[k-1]; r_{k+1}^2 = d_k + d_{k+1}.
    const double r2 = r_squared(d, k + 1);
    const double r2_next = r_squared(d, k + 2);
    A.push_back((H[k - 1] + (d_reciprocal[k - 1] + d_reciprocal[k]) * id) * (1.0 / r2));
    B.push_back(Matrix::scalar(n, -1.0 / (std::sqrt(r2 * r2_next) * d[k])));
  }
  DeltaProvenance prov{std::vector<double>(d.begin(), d.end()), std::vector<Matrix>(H.begin(), H.end()),
                       std::move(rule), default_boundary};
  return JacobiBlocks(std::move(A), std::move(B), std::move(prov));
}

}  // namespace

Vector recurrence_apply(const JacobiBlocks& blocks, const VecSeq& u, std::size_t j) {
  if (j == 0) throw Error(Errc::IndexOutOfRange, "(lu)_j needs j >= 1");
  if (j >= blocks.size()) throw Error(Errc::IndexOutOfRange, "blocks end before j = " + std::to_string(j));
  const Vector& prev = u.at(j - 1);
  const Vector& cur = u.at(j);
  const Vector& next = u.at(j + 1);
  return add(add(blocks.B(j) * next, blocks.A(j) * cur), blocks.B(j - 1).adjoint() * prev);
}

VecSeq solve_recurrence(const JacobiBlocks& blocks, const Vector& u0, const Vector& u1, std::size_t count) {
  if (count < 2) throw Error(Errc::InvalidArgument, "solve_recurrence needs count >= 2");
  const std::size_t n = blocks.order();
  if (u0.size() != n || u1.size() != n) throw Error(Errc::ShapeMismatch, "initial vectors must have length n");
  if (count - 1 > blocks.size()) {
    throw Error(Errc::IndexOutOfRange, "blocks cover only " + std::to_string(blocks.size()) + " indices");
  }
  VecSeq u{0, {u0, u1}};
  u.values.reserve(count);
  for (std::size_t j = 1; j + 1 < count; ++j) {
    Vector rhs = add(blocks.A(j) * u.values[j], blocks.B(j - 1).adjoint() * u.values[j - 1]);
    Vector next = blocks.B_inverse(j) * rhs;
    for (auto& z : next) z = -z;
    u.values.push_back(std::move(next));
  }
  return u;
}

std::vector<Matrix> discrete_cauchy_column(const JacobiBlocks& blocks, std::size_t j, std::size_t last) {
  if (last < j) throw Error(Errc::InvalidArgument, "discrete Cauchy needs i >= j");
  if (last > j && last - 1 >= blocks.size()) {
    throw Error(Errc::IndexOutOfRange, "blocks end before i = " + std::to_string(last));
  }
  const std::size_t n = blocks.order();
  std::vector<Matrix> col;
  col.reserve(last - j + 1);
  col.push_back(Matrix(n));
  if (last == j) return col;
  col.push_back(blocks.B_inverse(j));
  for (std::size_t i = j + 1; i < last; ++i) {
    const Matrix rhs = blocks.A(i) * col[i - j] + blocks.B(i - 1).adjoint() * col[i - 1 - j];
    col.push_back(-(blocks.B_inverse(i) * rhs));
  }
  return col;
}

Matrix discrete_cauchy(const JacobiBlocks& blocks, std::size_t i, std::size_t j) {
  return discrete_cauchy_column(blocks, j, i).back();
}

double t4_term(const JacobiBlocks& blocks, std::size_t nk, std::size_t mk) {
  if (nk > mk) throw Error(Errc::InvalidArgument, "t4 segment needs n_k <= m_k");
  double acc = 0.0;
  for (std::size_t j = nk; j <= mk; ++j) {
    for (const Matrix& k : discrete_cauchy_column(blocks, j, mk)) {
      const double f = frobenius_norm(k);
      acc += f * f;
    }
  }
  return std::sqrt(acc);
}

CriterionReport t4_series(const JacobiBlocks& blocks, std::span<const std::pair<std::size_t, std::size_t>> segments) {
  std::vector<double> terms;
  terms.reserve(segments.size());
  std::size_t prev_end = 0;
  for (const auto& [nk, mk] : segments) {
    if (nk <= prev_end && !terms.empty()) throw Error(Errc::InvalidArgument, "t4 segments must be disjoint and increasing");
    terms.push_back(t4_term(blocks, nk, mk));
    prev_end = mk;
  }
  CriterionReport report = make_report("t4", std::move(terms));
  apply_convergence_policy(report);
  return report;
}

CriterionReport carleman_report(const JacobiBlocks& blocks, std::size_t N, const SeriesPolicy& policy) {
  if (N == 0) throw Error(Errc::InvalidArgument, "carleman_report needs N >= 1");
  if (N >= blocks.size()) {
    throw Error(Errc::IndexOutOfRange, "carleman_report needs B_1..B_N; blocks stop at " +
                                           std::to_string(blocks.size() - 1));
  }
  std::vector<double> terms(N);
  for (std::size_t k = 1; k <= N; ++k) terms[k - 1] = 1.0 / frobenius_norm(blocks.B(k));
  CriterionReport report = make_report("carleman", std::move(terms));

  const auto& prov = blocks.provenance();
  if (prov && prov->d_rule) {
    const SeqRule& rule = *prov->d_rule;
    const auto p = rule.exponent();
    const bool squares_diverge =
        rule.kind() == SeqRule::Kind::Periodic || (p && *p >= -0.5 && rule.all_positive());
    const double root_n = std::sqrt(static_cast<double>(blocks.order()));
    bool dominated = true;
    for (std::size_t k = 1; k <= N; ++k) {
      const double d = rule.value(k + 1);
      dominated = dominated && report.terms[k - 1] >= d * d / root_n * (1.0 - 1e-12);
    }
    if (squares_diverge && dominated) {
      report.policy = "DivergesProven only from an analytic eventual lower bound on the terms or explicit "
                      "threshold mode; otherwise Inconclusive";
      report.verdict = SeriesVerdict::DivergesProven;
      report.verdict_basis = "terms >= d_{k+1}^2/sqrt(n) and sum d_k^2 diverges for d = " + rule.describe();
      report.certificate = Certificate{"comparison", 1.0 / root_n};
      return report;
    }
  }
  apply_divergence_policy(report, policy,
                          policy.periodic_extension
                              ? std::optional<double>(*std::min_element(report.terms.begin(), report.terms.end()))
                              : std::nullopt,
                          "periodic extension of the supplied window (caller assertion)");
  return report;
}

bool t6_inequality_check(std::span<const double> d, std::size_t n) {
  if (d.size() < 3) throw Error(Errc::InvalidArgument, "t6_inequality_check needs |d| >= 3");
  if (n == 0) throw Error(Errc::InvalidArgument, "order must be positive");
  const std::vector<Matrix> H(d.size() - 1, Matrix(n));
  const JacobiBlocks blocks = blocks_from_delta(d, H);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (std::size_t k = 1; k + 2 <= d.size(); ++k) {
    const double dk = d[k - 1], dn = d[k], dnn = d[k + 1];
    const double inv = 1.0 / frobenius_norm(blocks.B(k));
    const double lower = dn * dn / root_n;
    const double upper = (dk * dk + 6.0 * dn * dn + dnn * dnn) / (4.0 * root_n);
    if (inv < lower * (1.0 - 1e-12) || inv > upper * (1.0 + 1e-12)) return false;
  }
  return true;
}

T7Result t7_check(const DeltaLattice& lattice, std::size_t N) {
  if (N == 0) throw Error(Errc::InvalidArgument, "t7_check needs N >= 1");
  const SeqRule& d = lattice.d;
  const std::size_t n = lattice.n;
  T7Result result;
  for (int s = 1; s <= 2; ++s) {
    std::vector<double> log_a(N), log_b(N);
    double log_ratio = 0.0;
    for (std::size_t j = 1; j <= N; ++j) {
      const std::size_t num = 2 * j - 1 + s;
      const std::size_t den = 2 * j - 2 + s;
      log_ratio += std::log(d.value(num)) - std::log(d.value(den));
      const std::size_t k = 2 * j + s;  // r_k = sqrt(d_{k-1} + d_k)
      log_a[j - 1] = std::log(d.value(k - 1) + d.value(k)) + 2.0 * log_ratio;
      const Matrix m = lattice.H.value(k - 1) + (d.reciprocal(k - 1) + d.reciprocal(k)) * Matrix::identity(n);
      const double norm = frobenius_norm(m);
      log_b[j - 1] = norm == 0.0 ? -std::numeric_limits<double>::infinity() : 2.0 * log_ratio + std::log(norm);
    }
    const std::string suffix = "_s" + std::to_string(s);
    result.a[s - 1] = make_log_report("t7_a" + suffix, std::move(log_a));
    result.b[s - 1] = make_log_report("t7_b" + suffix, std::move(log_b));
    apply_convergence_policy(result.a[s - 1]);
    apply_convergence_policy(result.b[s - 1]);
  }
  result.limit_circle_certified = true;
  for (int s = 0; s < 2; ++s) {
    result.limit_circle_certified = result.limit_circle_certified &&
                                    result.a[s].verdict == SeriesVerdict::ConvergesBounded &&
                                    result.b[s].verdict == SeriesVerdict::ConvergesBounded;
  }
  return result;
}

Cor3Result corollary3_check(const DeltaLattice& lattice, std::size_t N) {
  if (N < 2) throw Error(Errc::InvalidArgument, "corollary3_check needs N >= 2");
  const SeqRule& d = lattice.d;
  auto r = [&](std::size_t k) { return std::sqrt(d.value(k - 1) + d.value(k)); };

  bool all_le = true, all_ge = true;
  for (std::size_t k = 2; k <= N; ++k) {
    const double lhs = r(k) * r(k + 3) * d.value(k) * d.value(k + 2);
    const double rhs = r(k + 1) * r(k + 2) * d.value(k + 1) * d.value(k + 1);
    const double tol = 1e-12 * std::max(std::abs(lhs), std::abs(rhs));
    all_le = all_le && lhs <= rhs + tol;
    all_ge = all_ge && lhs >= rhs - tol;
  }

  std::vector<double> sq(N), jump(N);
  const Matrix id = Matrix::identity(lattice.n);
  for (std::size_t k = 1; k <= N; ++k) {
    const double dk = d.value(k);
    sq[k - 1] = dk * dk;
    jump[k - 1] = d.value(k + 1) * frobenius_norm(lattice.H.value(k) + (d.reciprocal(k) + d.reciprocal(k + 1)) * id);
  }
  Cor3Result result{all_le || all_ge, make_report("cor3_cond2", std::move(sq)),
                    make_report("cor3_cond3", std::move(jump)), false};
  apply_convergence_policy(result.cond2);
  apply_convergence_policy(result.cond3);
  if (result.cond2.verdict != SeriesVerdict::ConvergesBounded && d.eventually_periodic() && N >= d.period()) {
    const auto& t = result.cond2.terms;
    apply_divergence_policy(result.cond2, {}, *std::min_element(t.begin(), t.end()),
                            "periodic spacing rule " + d.describe());
  }
  result.limit_circle_certified = result.cond1 && result.cond2.verdict == SeriesVerdict::ConvergesBounded &&
                                  result.cond3.verdict == SeriesVerdict::ConvergesBounded;
  return result;
}

}  // namespace sldl

#pragma once

// Generalized block Jacobi matrices: blocks built from delta data, the
// three-term recurrence (lu)_j = B_j u_{j+1} + A_j u_j + B*_{j-1} u_{j-1},
// discrete Cauchy solutions and the determinacy criteria on this side.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sldl/matcore.hpp"
#include "sldl/quasidiff.hpp"
#include "sldl/sequence.hpp"
#include "sldl/series.hpp"

namespace sldl {

class JacobiBlocks;

// -f'' + sum_k H_k delta(x - x_k) f with x_0 = 0, x_k = x_{k-1} + d_k.
struct DeltaLattice {
  std::size_t n;
  SeqRule d;
  MatrixSeqRule H;

  // x_1..x_count
  std::vector<double> positions(std::size_t count) const;
  // count nodes on [0, x_count + d_{count+1}].
  CoefficientModel model(std::size_t count) const;
  // A_0..A_count, B_0..B_count with default boundary blocks.
  JacobiBlocks blocks(std::size_t count) const;
};

struct DeltaProvenance {
  std::vector<double> d;  // d_1, d_2, ...
  std::vector<Matrix> H;  // H_1, H_2, ...
  std::optional<SeqRule> d_rule;
  bool default_boundary = true;  // A_0 = O, B_0 = -I
};

class JacobiBlocks {
 public:
  // A_k Hermitian (tol 1e-10) and B_k invertible for every k; index 0 holds
  // the boundary blocks.
  JacobiBlocks(std::vector<Matrix> A, std::vector<Matrix> B, std::optional<DeltaProvenance> provenance = {});

  std::size_t order() const noexcept { return A_.front().order(); }
  // Blocks are stored for k = 0..size()-1.
  std::size_t size() const noexcept { return A_.size(); }
  const Matrix& A(std::size_t k) const;
  const Matrix& B(std::size_t k) const;
  const Matrix& B_inverse(std::size_t k) const;
  const std::optional<DeltaProvenance>& provenance() const noexcept { return provenance_; }

 private:
  std::vector<Matrix> A_;
  std::vector<Matrix> B_;
  std::vector<Matrix> B_inv_;
  std::optional<DeltaProvenance> provenance_;
};

// u_offset, u_{offset+1}, ...
struct VecSeq {
  std::size_t offset = 0;
  std::vector<Vector> values;

  std::size_t size() const noexcept { return values.size(); }
  bool contains(std::size_t j) const noexcept { return j >= offset && j < offset + values.size(); }
  // IndexOutOfRange outside the stored range.
  const Vector& at(std::size_t j) const;
};

// A_k = (H_k + (1/d_k + 1/d_{k+1}) I) / (d_k + d_{k+1}),
// B_k = -I / (sqrt((d_k + d_{k+1})(d_{k+1} + d_{k+2})) d_{k+1}),
// for k = 1..|d|-2. |H| must be |d| - 1 or |d| (the tail is ignored).
JacobiBlocks blocks_from_delta(std::span<const double> d, std::span<const Matrix> H,
                               std::optional<std::pair<Matrix, Matrix>> boundary = {});
// Same with caller-supplied reciprocals 1/d_k, which the diagonal blocks use
// verbatim (exact cancellations survive for rules like d_k = 1/k).
JacobiBlocks blocks_from_delta(std::span<const double> d, std::span<const double> d_reciprocal,
                               std::span<const Matrix> H, std::optional<std::pair<Matrix, Matrix>> boundary = {});

// (lu)_j for j >= 1; IndexOutOfRange when u or the blocks do not cover j-1..j+1.
Vector recurrence_apply(const JacobiBlocks& blocks, const VecSeq& u, std::size_t j);

// u_0..u_{count-1} with (lu)_j = 0 for 1 <= j <= count-2.
VecSeq solve_recurrence(const JacobiBlocks& blocks, const Vector& u0, const Vector& u1, std::size_t count);

// K_{j..last, j}: K_jj = O, K_{j+1,j} = B_j^-1, (l K_{.,j})_i = 0 for i > j.
std::vector<Matrix> discrete_cauchy_column(const JacobiBlocks& blocks, std::size_t j, std::size_t last);
// K_ij for i >= j.
Matrix discrete_cauchy(const JacobiBlocks& blocks, std::size_t i, std::size_t j);

// (sum_{i=nk}^{mk} sum_{j=nk}^{i} ||K_ij||_F^2)^(1/2)
double t4_term(const JacobiBlocks& blocks, std::size_t nk, std::size_t mk);
// One term per segment; convergence certified by the shared policy.
CriterionReport t4_series(const JacobiBlocks& blocks, std::span<const std::pair<std::size_t, std::size_t>> segments);

// Terms 1/||B_k||_F, k = 1..N. With delta provenance the terms dominate
// d_{k+1}^2 / sqrt(n), so a rule for d_k whose squares are not summable
// (constant, periodic, or c k^p with p >= -1/2) proves divergence.
CriterionReport carleman_report(const JacobiBlocks& blocks, std::size_t N, const SeriesPolicy& policy = {});

// d_{k+1}^2 / sqrt(n) <= ||B_k||^-1 <= (d_k^2 + 6 d_{k+1}^2 + d_{k+2}^2) / (4 sqrt(n))
// for every k = 1..|d|-2, relative tolerance 1e-12.
bool t6_inequality_check(std::span<const double> d, std::size_t n = 1);

struct T7Result {
  CriterionReport a[2];  // s = 1, 2
  CriterionReport b[2];
  bool limit_circle_certified;
};

// Products of spacing ratios are carried in the log domain.
T7Result t7_check(const DeltaLattice& lattice, std::size_t N);

struct Cor3Result {
  bool cond1;
  CriterionReport cond2;  // sum d_k^2
  CriterionReport cond3;  // sum d_{k+1} ||H_k + (1/d_k + 1/d_{k+1}) I||_F
  bool limit_circle_certified;
};

// cond1: r_k r_{k+3} d_k d_{k+2} - r_{k+1} r_{k+2} d_{k+1}^2 keeps one sign
// for k = 2..N (r_1 would need d_0).
Cor3Result corollary3_check(const DeltaLattice& lattice, std::size_t N);

}  // namespace sldl

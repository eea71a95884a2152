#pragma once

// Quasi-differential expressions l[f] = -(P(f' - Rf))' - R*P(f' - Rf) + Qf
// with piecewise-constant coefficients on [0, X], their first-order system
// Y' = (F - Lambda) Y in the coordinates Y = (f, f^[1]), and the objects built
// on it: fundamental pairs, the Cauchy kernel and the Green form.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "sldl/matcore.hpp"

namespace sldl {

enum class Variant { GeneralTriple, StepSigma, DeltaNodes, Distributional };

const char* variant_name(Variant v) noexcept;

enum class Side { Left, Right };

// One constant-coefficient piece [start, next start). P_inv is cached.
struct CoefficientPiece {
  double start;
  Matrix P;
  Matrix P_inv;
  Matrix Q;
  Matrix R;
  // P = I, R Hermitian, Q = -R^2. For such pieces (f, f') solves the free
  // equation, so solutions are polynomial in x when lambda = 0.
  bool step_form;
};

struct DeltaNode {
  double x;
  Matrix H;
};

class CoefficientModel {
 public:
  // breakpoints are the interior points 0 < x_1 < ... < x_m < X; each list
  // of piece data has m + 1 entries, entry k covering [x_k, x_{k+1}) with
  // x_0 = 0 (right-continuous convention, the last piece is closed at X).
  static CoefficientModel general_triple(double X, std::vector<double> breakpoints, std::vector<Matrix> P,
                                         std::vector<Matrix> Q, std::vector<Matrix> R);
  // P = I, R = sigma, Q = -sigma^2 with sigma real symmetric per piece.
  static CoefficientModel step_sigma(double X, std::vector<double> breakpoints, std::vector<Matrix> sigma);
  // -f'' + sum H_k delta(x - x_k) f; normalized to step_sigma with C_1 = O and
  // C_{k+1} = C_k + H_k.
  static CoefficientModel delta_nodes(std::size_t n, double X, std::vector<DeltaNode> nodes);
  // F = [[P0^-1 phi, P0^-1], [-phi* P0^-1 phi, -phi* P0^-1]], phi = P1 + i Q0.
  static CoefficientModel distributional(double X, std::vector<double> breakpoints, std::vector<Matrix> P0,
                                         std::vector<Matrix> Q0, std::vector<Matrix> P1);
  static CoefficientModel free(std::size_t n, double X);

  Variant variant() const noexcept { return variant_; }
  std::size_t order() const noexcept { return n_; }
  double end() const noexcept { return X_; }
  std::span<const CoefficientPiece> pieces() const noexcept { return pieces_; }
  // Interior breakpoints x_1..x_m.
  std::vector<double> breakpoints() const;
  // Delta provenance; empty unless variant() == DeltaNodes.
  std::span<const DeltaNode> nodes() const noexcept { return nodes_; }
  // sigma per piece for StepSigma / DeltaNodes; empty otherwise.
  std::span<const Matrix> sigma_values() const noexcept { return sigma_; }

  // Piece containing x; at a breakpoint the right-hand piece unless
  // side == Left. Throws InvalidArgument outside [0, X].
  std::size_t piece_index(double x, Side side = Side::Right) const;
  const CoefficientPiece& piece_at(double x, Side side = Side::Right) const {
    return pieces_[piece_index(x, side)];
  }
  double piece_end(std::size_t index) const noexcept {
    return index + 1 < pieces_.size() ? pieces_[index + 1].start : X_;
  }
  bool all_step_form() const noexcept;

 private:
  CoefficientModel(Variant variant, std::size_t n, double X, std::vector<CoefficientPiece> pieces);
  Variant variant_;
  std::size_t n_;
  double X_;
  std::vector<CoefficientPiece> pieces_;
  std::vector<DeltaNode> nodes_;
  std::vector<Matrix> sigma_;
};

struct QuasiState {
  Vector f;
  Vector f1;
};

// F - Lambda at x, F = [[R, P^-1], [Q, -R*]], Lambda = [[O, O], [lambda I, O]].
BlockMatrix2n build_system_matrix(const CoefficientModel& model, Complex lambda, double x);

// exp((F - Lambda) * length) for one piece.
Matrix piece_propagator(const CoefficientPiece& piece, Complex lambda, double length);

// Product of exact piece propagators carrying Y(x0) to Y(x1), x0 <= x1.
Matrix transfer_matrix(const CoefficientModel& model, Complex lambda, double x0, double x1);

QuasiState propagate(const CoefficientModel& model, Complex lambda, const QuasiState& state, double x0, double x1);

// f'(x+-) = f^[1] + sigma(x+-) f for StepSigma / DeltaNodes models.
Vector classical_derivative(const CoefficientModel& model, const QuasiState& state, double x, Side side);

// Inverse of classical_derivative for any variant: f^[1] = P (f' - R f).
QuasiState to_quasi(const CoefficientModel& model, double x, Side side, Vector f, std::span<const Complex> fprime);

// Sampled matrix solutions Phi, Psi of l[f] = lambda f with
// Phi(0) = Psi^[1](0) = I, Phi^[1](0) = Psi(0) = O.
class FundamentalPair {
 public:
  FundamentalPair(std::shared_ptr<const CoefficientModel> model, Complex lambda, std::vector<double> grid);

  const CoefficientModel& model() const noexcept { return *model_; }
  std::shared_ptr<const CoefficientModel> model_ptr() const noexcept { return model_; }
  Complex lambda() const noexcept { return lambda_; }
  std::span<const double> grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }

  // T = [[Phi, Psi], [Phi^[1], Psi^[1]]] at sample i.
  const BlockMatrix2n& sample(std::size_t i) const { return samples_.at(i); }
  const Matrix& phi(std::size_t i) const { return samples_.at(i).b11; }
  const Matrix& psi(std::size_t i) const { return samples_.at(i).b12; }
  const Matrix& phi1(std::size_t i) const { return samples_.at(i).b21; }
  const Matrix& psi1(std::size_t i) const { return samples_.at(i).b22; }

  bool in_span(double x) const noexcept { return x >= grid_.front() && x <= grid_.back(); }
  // T(x) for x in the sampled span, propagated exactly from the nearest
  // sample at or below x. Throws OffGrid outside the span.
  BlockMatrix2n at(double x) const;

 private:
  std::shared_ptr<const CoefficientModel> model_;
  Complex lambda_;
  std::vector<double> grid_;
  std::vector<BlockMatrix2n> samples_;
};

FundamentalPair fundamental_pair(const CoefficientModel& model, Complex lambda, std::vector<double> grid);

// T^-1 = [[Psi^[1]*, -Psi*], [-Phi^[1]*, Phi*]], valid for real lambda.
BlockMatrix2n transfer_inverse(const BlockMatrix2n& t);

// Psi(x) Phi*(t) - Phi(x) Psi*(t) from the two transfer samples.
Matrix cauchy_kernel_from(const BlockMatrix2n& tx, const BlockMatrix2n& tt);

// Cauchy kernel K(x, t); pair.lambda() must be 0.
Matrix cauchy_kernel(const FundamentalPair& pair, double x, double t);

// [u, v] = (u^[1], v) - (u, v^[1]).
Complex green_form(const QuasiState& u, const QuasiState& v);

}  // namespace sldl

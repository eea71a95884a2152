#include "sldl/quasidiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "sldl/errors.hpp"

namespace sldl {

namespace {

constexpr double kHermitianTol = 1e-10;

void check_end(double X) {
  if (!(X > 0.0) || !std::isfinite(X)) throw Error(Errc::InvalidArgument, "domain end X must be positive and finite");
}

void check_breakpoints(const std::vector<double>& bp, double X) {
  double prev = 0.0;
  for (double x : bp) {
    if (!std::isfinite(x) || !(x > prev) || !(x < X)) {
      throw Error(Errc::InvalidArgument, "breakpoints must be strictly increasing inside (0, X)");
    }
    prev = x;
  }
}

void check_piece_count(std::size_t got, std::size_t breakpoints, const char* what) {
  if (got != breakpoints + 1) {
    throw Error(Errc::ShapeMismatch, std::string(what) + ": expected " + std::to_string(breakpoints + 1) +
                                         " pieces, got " + std::to_string(got));
  }
}

std::size_t common_order(const std::vector<Matrix>& ms, const char* what) {
  if (ms.empty()) throw Error(Errc::ShapeMismatch, std::string(what) + ": no pieces");
  const std::size_t n = ms.front().order();
  for (const auto& m : ms) {
    if (m.order() != n) throw Error(Errc::ShapeMismatch, std::string(what) + ": pieces mix matrix orders");
  }
  return n;
}

bool is_real_symmetric(const Matrix& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  return std::all_of(m.data().begin(), m.data().end(), [tol](Complex z) { return std::abs(z.imag()) <= tol; });
}

Matrix invert_p(const Matrix& p, std::size_t piece) {
  try {
    return invert(p);
  } catch (const Error& e) {
    if (e.code() != Errc::Singular) throw;
    throw Error(Errc::SingularP, "P is singular on piece " + std::to_string(piece));
  }
}

bool detect_step_form(const Matrix& P, const Matrix& Q, const Matrix& R) {
  const std::size_t n = P.order();
  if (max_abs_diff(P, Matrix::identity(n)) > 1e-14) return false;
  if (!is_hermitian(R, 1e-12)) return false;
  const Matrix r2 = R * R;
  return max_abs_diff(Q, -r2) <= 1e-12 * (1.0 + frobenius_norm(r2));
}

std::vector<double> starts_from(const std::vector<double>& bp) {
  std::vector<double> starts;
  starts.reserve(bp.size() + 1);
  starts.push_back(0.0);
  starts.insert(starts.end(), bp.begin(), bp.end());
  return starts;
}

}  // namespace

const char* variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::GeneralTriple: return "general_triple";
    case Variant::StepSigma: return "step_sigma";
    case Variant::DeltaNodes: return "delta_nodes";
    case Variant::Distributional: return "distributional";
  }
  return "unknown";
}

CoefficientModel::CoefficientModel(Variant variant, std::size_t n, double X, std::vector<CoefficientPiece> pieces)
    : variant_(variant), n_(n), X_(X), pieces_(std::move(pieces)) {}

CoefficientModel CoefficientModel::general_triple(double X, std::vector<double> breakpoints, std::vector<Matrix> P,
                                                  std::vector<Matrix> Q, std::vector<Matrix> R) {
  check_end(X);
  check_breakpoints(breakpoints, X);
  check_piece_count(P.size(), breakpoints.size(), "P");
  check_piece_count(Q.size(), breakpoints.size(), "Q");
  check_piece_count(R.size(), breakpoints.size(), "R");
  const std::size_t n = common_order(P, "P");
  if (common_order(Q, "Q") != n || common_order(R, "R") != n) {
    throw Error(Errc::ShapeMismatch, "P, Q and R must share one order");
  }
  const auto starts = starts_from(breakpoints);
  std::vector<CoefficientPiece> pieces;
  pieces.reserve(starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) {
    if (!is_hermitian(P[k], kHermitianTol) || !is_hermitian(Q[k], kHermitianTol)) {
      throw Error(Errc::InvalidArgument, "P and Q must be Hermitian (piece " + std::to_string(k) + ")");
    }
    Matrix p_inv = invert_p(P[k], k);
    const bool step = detect_step_form(P[k], Q[k], R[k]);
    pieces.push_back({starts[k], P[k], std::move(p_inv), Q[k], R[k], step});
  }
  return CoefficientModel(Variant::GeneralTriple, n, X, std::move(pieces));
}

CoefficientModel CoefficientModel::step_sigma(double X, std::vector<double> breakpoints, std::vector<Matrix> sigma) {
  check_end(X);
  check_breakpoints(breakpoints, X);
  check_piece_count(sigma.size(), breakpoints.size(), "sigma");
  const std::size_t n = common_order(sigma, "sigma");
  const auto starts = starts_from(breakpoints);
  const Matrix id = Matrix::identity(n);
  std::vector<CoefficientPiece> pieces;
  pieces.reserve(starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) {
    if (!is_real_symmetric(sigma[k], kHermitianTol)) {
      throw Error(Errc::NonSymmetricJump, "sigma must be real symmetric (piece " + std::to_string(k) + ")");
    }
    pieces.push_back({starts[k], id, id, -(sigma[k] * sigma[k]), sigma[k], true});
  }
  CoefficientModel model(Variant::StepSigma, n, X, std::move(pieces));
  model.sigma_ = std::move(sigma);
  return model;
}

CoefficientModel CoefficientModel::delta_nodes(std::size_t n, double X, std::vector<DeltaNode> nodes) {
  check_end(X);
  std::vector<double> breakpoints;
  std::vector<Matrix> sigma;
  breakpoints.reserve(nodes.size());
  sigma.reserve(nodes.size() + 1);
  sigma.push_back(Matrix(n));
  for (const auto& node : nodes) {
    if (node.H.order() != n) throw Error(Errc::ShapeMismatch, "delta jump has the wrong order");
    if (!is_real_symmetric(node.H, kHermitianTol)) {
      throw Error(Errc::NonSymmetricJump, "delta jump at x = " + std::to_string(node.x) + " is not real symmetric");
    }
    breakpoints.push_back(node.x);
    sigma.push_back(sigma.back() + node.H);
  }
  CoefficientModel model = step_sigma(X, std::move(breakpoints), std::move(sigma));
  model.variant_ = Variant::DeltaNodes;
  model.nodes_ = std::move(nodes);
  return model;
}

CoefficientModel CoefficientModel::distributional(double X, std::vector<double> breakpoints, std::vector<Matrix> P0,
                                                  std::vector<Matrix> Q0, std::vector<Matrix> P1) {
  check_end(X);
  check_breakpoints(breakpoints, X);
  check_piece_count(P0.size(), breakpoints.size(), "P0");
  check_piece_count(Q0.size(), breakpoints.size(), "Q0");
  check_piece_count(P1.size(), breakpoints.size(), "P1");
  const std::size_t n = common_order(P0, "P0");
  if (common_order(Q0, "Q0") != n || common_order(P1, "P1") != n) {
    throw Error(Errc::ShapeMismatch, "P0, Q0 and P1 must share one order");
  }
  const auto starts = starts_from(breakpoints);
  std::vector<CoefficientPiece> pieces;
  pieces.reserve(starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) {
    if (!is_hermitian(P0[k], kHermitianTol) || !is_hermitian(Q0[k], kHermitianTol) ||
        !is_hermitian(P1[k], kHermitianTol)) {
      throw Error(Errc::InvalidArgument, "P0, Q0 and P1 must be Hermitian (piece " + std::to_string(k) + ")");
    }
    Matrix p_inv = invert_p(P0[k], k);
    const Matrix phi = P1[k] + Complex(0.0, 1.0) * Q0[k];
    // As a triple: P = P0, R = P0^-1 phi, Q = -phi* P0^-1 phi.
    Matrix R = p_inv * phi;
    Matrix Q = -(phi.adjoint() * p_inv * phi);
    const bool step = detect_step_form(P0[k], Q, R);
    pieces.push_back({starts[k], P0[k], std::move(p_inv), std::move(Q), std::move(R), step});
  }
  return CoefficientModel(Variant::Distributional, n, X, std::move(pieces));
}

CoefficientModel CoefficientModel::free(std::size_t n, double X) { return step_sigma(X, {}, {Matrix(n)}); }

std::vector<double> CoefficientModel::breakpoints() const {
  std::vector<double> out;
  out.reserve(pieces_.size() - 1);
  for (std::size_t k = 1; k < pieces_.size(); ++k) out.push_back(pieces_[k].start);
  return out;
}

std::size_t CoefficientModel::piece_index(double x, Side side) const {
  if (!(x >= 0.0 && x <= X_)) {
    throw Error(Errc::InvalidArgument, "x = " + std::to_string(x) + " outside [0, " + std::to_string(X_) + "]");
  }
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const CoefficientPiece& p) { return v < p.start; });
  std::size_t index = static_cast<std::size_t>(it - pieces_.begin()) - 1;
  if (side == Side::Left && index > 0 && pieces_[index].start == x) --index;
  return index;
}

bool CoefficientModel::all_step_form() const noexcept {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const CoefficientPiece& p) { return p.step_form; });
}

BlockMatrix2n build_system_matrix(const CoefficientModel& model, Complex lambda, double x) {
  const CoefficientPiece& piece = model.piece_at(x);
  const std::size_t n = model.order();
  return {piece.R, piece.P_inv, piece.Q - Matrix::scalar(n, lambda), -piece.R.adjoint()};
}

Matrix piece_propagator(const CoefficientPiece& piece, Complex lambda, double length) {
  const std::size_t n = piece.R.order();
  if (length == 0.0) return Matrix::identity(2 * n);
  if (piece.step_form) {
    // Gauge (f, f^[1]) -> (f, f') turns F - Lambda into [[O, I], [-lambda I, O]];
    // exponentiating there avoids the cancellation that large sigma causes in
    // the quasi-derivative coordinates.
    const Matrix id = Matrix::identity(n);
    const Matrix free = BlockMatrix2n{Matrix(n), id, Matrix::scalar(n, -lambda), Matrix(n)}.assemble();
    const Matrix gauge = BlockMatrix2n{id, Matrix(n), piece.R, id}.assemble();
    const Matrix gauge_inv = BlockMatrix2n{id, Matrix(n), -piece.R, id}.assemble();
    return gauge_inv * (expm(free * Complex(length)) * gauge);
  }
  BlockMatrix2n f{piece.R, piece.P_inv, piece.Q - Matrix::scalar(n, lambda), -piece.R.adjoint()};
  return expm(f.assemble() * Complex(length));
}

Matrix transfer_matrix(const CoefficientModel& model, Complex lambda, double x0, double x1) {
  if (!(x0 <= x1)) throw Error(Errc::InvalidArgument, "transfer needs x0 <= x1");
  std::size_t index = model.piece_index(x0);
  model.piece_index(x1);
  Matrix t = Matrix::identity(2 * model.order());
  double cur = x0;
  while (cur < x1) {
    const double stop = std::min(model.piece_end(index), x1);
    if (stop > cur) t = piece_propagator(model.pieces()[index], lambda, stop - cur) * t;
    cur = stop;
    ++index;
  }
  return t;
}

QuasiState propagate(const CoefficientModel& model, Complex lambda, const QuasiState& state, double x0, double x1) {
  const std::size_t n = model.order();
  if (state.f.size() != n || state.f1.size() != n) throw Error(Errc::ShapeMismatch, "state length must equal order");
  Vector y(state.f);
  y.insert(y.end(), state.f1.begin(), state.f1.end());
  const Vector out = transfer_matrix(model, lambda, x0, x1) * y;
  return {Vector(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n)),
          Vector(out.begin() + static_cast<std::ptrdiff_t>(n), out.end())};
}

Vector classical_derivative(const CoefficientModel& model, const QuasiState& state, double x, Side side) {
  if (model.variant() != Variant::StepSigma && model.variant() != Variant::DeltaNodes) {
    throw Error(Errc::VariantUnsupported,
                std::string("classical derivative needs a sigma model, got ") + variant_name(model.variant()));
  }
  const std::size_t n = model.order();
  if (state.f.size() != n || state.f1.size() != n) throw Error(Errc::ShapeMismatch, "state length must equal order");
  const Matrix& sigma = model.sigma_values()[model.piece_index(x, side)];
  Vector out = sigma * state.f;
  for (std::size_t i = 0; i < n; ++i) out[i] += state.f1[i];
  return out;
}

QuasiState to_quasi(const CoefficientModel& model, double x, Side side, Vector f, std::span<const Complex> fprime) {
  const std::size_t n = model.order();
  if (f.size() != n || fprime.size() != n) throw Error(Errc::ShapeMismatch, "vector length must equal order");
  const CoefficientPiece& piece = model.piece_at(x, side);
  Vector rf = piece.R * f;
  for (std::size_t i = 0; i < n; ++i) rf[i] = fprime[i] - rf[i];
  Vector f1 = piece.P * rf;
  return {std::move(f), std::move(f1)};
}

FundamentalPair::FundamentalPair(std::shared_ptr<const CoefficientModel> model, Complex lambda,
                                 std::vector<double> grid)
    : model_(std::move(model)), lambda_(lambda), grid_(std::move(grid)) {
  if (!model_) throw Error(Errc::InvalidArgument, "fundamental pair needs a model");
  if (grid_.empty() || grid_.front() != 0.0) throw Error(Errc::InvalidArgument, "grid must start at 0");
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (!(grid_[i] > grid_[i - 1])) throw Error(Errc::InvalidArgument, "grid must be strictly increasing");
  }
  if (grid_.back() > model_->end()) throw Error(Errc::InvalidArgument, "grid extends beyond X");
  samples_.reserve(grid_.size());
  Matrix t = Matrix::identity(2 * model_->order());
  samples_.push_back(BlockMatrix2n::split(t));
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    t = transfer_matrix(*model_, lambda_, grid_[i - 1], grid_[i]) * t;
    samples_.push_back(BlockMatrix2n::split(t));
  }
}

BlockMatrix2n FundamentalPair::at(double x) const {
  if (!in_span(x)) {
    throw Error(Errc::OffGrid, "x = " + std::to_string(x) + " outside the sampled span [" +
                                   std::to_string(grid_.front()) + ", " + std::to_string(grid_.back()) + "]");
  }
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  if (grid_[i] == x) return samples_[i];
  return BlockMatrix2n::split(transfer_matrix(*model_, lambda_, grid_[i], x) * samples_[i].assemble());
}

FundamentalPair fundamental_pair(const CoefficientModel& model, Complex lambda, std::vector<double> grid) {
  return FundamentalPair(std::make_shared<const CoefficientModel>(model), lambda, std::move(grid));
}

BlockMatrix2n transfer_inverse(const BlockMatrix2n& t) {
  return {t.b22.adjoint(), -t.b12.adjoint(), -t.b21.adjoint(), t.b11.adjoint()};
}

Matrix cauchy_kernel_from(const BlockMatrix2n& tx, const BlockMatrix2n& tt) {
  return tx.b12 * tt.b11.adjoint() - tx.b11 * tt.b12.adjoint();
}

Matrix cauchy_kernel(const FundamentalPair& pair, double x, double t) {
  if (pair.lambda() != Complex{}) throw Error(Errc::InvalidArgument, "the Cauchy kernel is built for lambda = 0");
  return cauchy_kernel_from(pair.at(x), pair.at(t));
}

Complex green_form(const QuasiState& u, const QuasiState& v) {
  return inner(u.f1, v.f) - inner(u.f, v.f1);
}

}  // namespace sldl

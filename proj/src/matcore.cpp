#include "sldl/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "sldl/errors.hpp"

namespace sldl {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Singular: return "Singular";
    case Errc::SingularP: return "SingularP";
    case Errc::OffGrid: return "OffGrid";
    case Errc::VariantUnsupported: return "VariantUnsupported";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NonSymmetricJump: return "NonSymmetricJump";
    case Errc::NonPositiveSpacing: return "NonPositiveSpacing";
    case Errc::ConflictingEvidence: return "ConflictingEvidence";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

namespace {

void require_same_order(const Matrix& a, const Matrix& b) {
  if (a.order() != b.order()) {
    throw Error(Errc::ShapeMismatch, "matrix orders differ: " + std::to_string(a.order()) +
                                         " vs " + std::to_string(b.order()));
  }
}

constexpr double kMaxCondition = 1e14;

}  // namespace

Matrix::Matrix(std::size_t n) : n_(n), a_(n * n) {
  if (n == 0) throw Error(Errc::InvalidArgument, "matrix order must be >= 1");
}

Matrix::Matrix(std::size_t n, std::vector<Complex> entries) : n_(n), a_(std::move(entries)) {
  if (n == 0) throw Error(Errc::InvalidArgument, "matrix order must be >= 1");
  if (a_.size() != n * n) {
    throw Error(Errc::ShapeMismatch, "expected " + std::to_string(n * n) + " entries, got " +
                                         std::to_string(a_.size()));
  }
  if (!is_finite()) throw Error(Errc::InvalidArgument, "matrix entries must be finite");
}

Matrix Matrix::identity(std::size_t n) { return scalar(n, 1.0); }

Matrix Matrix::scalar(std::size_t n, Complex c) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = c;
  return m;
}

Matrix Matrix::diagonal(std::span<const Complex> diag) {
  Matrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t n = rows.size();
  std::vector<Complex> entries;
  entries.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw Error(Errc::ShapeMismatch, "matrix rows must be square");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return Matrix(n, std::move(entries));
}

Matrix Matrix::adjoint() const {
  Matrix m(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

bool Matrix::is_finite() const noexcept {
  return std::all_of(a_.begin(), a_.end(), [](Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

bool Matrix::is_zero() const noexcept {
  return std::all_of(a_.begin(), a_.end(), [](Complex z) { return z == Complex{}; });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_order(*this, other);
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += other.a_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_order(*this, other);
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= other.a_[k];
  return *this;
}

Matrix& Matrix::operator*=(Complex c) {
  for (auto& z : a_) z *= c;
  return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator-(Matrix m) { return m *= -1.0; }
Matrix operator*(Complex c, Matrix m) { return m *= c; }
Matrix operator*(Matrix m, Complex c) { return m *= c; }

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
  require_same_order(lhs, rhs);
  const std::size_t n = lhs.order();
  Matrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex l = lhs(i, k);
      if (l == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += l * rhs(k, j);
    }
  }
  return out;
}

Vector operator*(const Matrix& m, std::span<const Complex> v) {
  const std::size_t n = m.order();
  if (v.size() != n) throw Error(Errc::ShapeMismatch, "vector length does not match matrix order");
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex acc{};
    for (std::size_t j = 0; j < n; ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

Matrix BlockMatrix2n::assemble() const {
  const std::size_t n = order();
  Matrix m(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = b11(i, j);
      m(i, j + n) = b12(i, j);
      m(i + n, j) = b21(i, j);
      m(i + n, j + n) = b22(i, j);
    }
  }
  return m;
}

BlockMatrix2n BlockMatrix2n::split(const Matrix& m) {
  if (m.order() % 2 != 0) throw Error(Errc::ShapeMismatch, "block split needs even order");
  const std::size_t n = m.order() / 2;
  BlockMatrix2n out{Matrix(n), Matrix(n), Matrix(n), Matrix(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.b11(i, j) = m(i, j);
      out.b12(i, j) = m(i, j + n);
      out.b21(i, j) = m(i + n, j);
      out.b22(i, j) = m(i + n, j + n);
    }
  }
  return out;
}

double frobenius_norm(const Matrix& m) {
  double acc = 0.0;
  for (Complex z : m.data()) acc += std::norm(z);
  return std::sqrt(acc);
}

double one_norm(const Matrix& m) {
  const std::size_t n = m.order();
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) col += std::abs(m(i, j));
    best = std::max(best, col);
  }
  return best;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_order(a, b);
  double best = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    best = std::max(best, std::abs(a.data()[k] - b.data()[k]));
  return best;
}

Matrix solve(const Matrix& a, const Matrix& b) {
  require_same_order(a, b);
  const std::size_t n = a.order();
  Matrix lu = a;
  Matrix x = b;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(lu(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(lu(r, col)) > best) {
        best = std::abs(lu(r, col));
        pivot = r;
      }
    }
    if (best == 0.0) throw Error(Errc::Singular, "zero pivot in column " + std::to_string(col));
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(lu(col, j), lu(pivot, j));
        std::swap(x(col, j), x(pivot, j));
      }
    }
    const Complex inv_pivot = 1.0 / lu(col, col);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const Complex factor = lu(r, col) * inv_pivot;
      if (factor == Complex{}) continue;
      for (std::size_t j = col; j < n; ++j) lu(r, j) -= factor * lu(col, j);
      for (std::size_t j = 0; j < n; ++j) x(r, j) -= factor * x(col, j);
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    const Complex inv_pivot = 1.0 / lu(r, r);
    for (std::size_t j = 0; j < n; ++j) x(r, j) *= inv_pivot;
  }
  return x;
}

Matrix invert(const Matrix& m) {
  Matrix inv = solve(m, Matrix::identity(m.order()));
  const double cond = one_norm(m) * one_norm(inv);
  if (!(cond <= kMaxCondition)) {
    throw Error(Errc::Singular, "condition estimate " + std::to_string(cond) + " exceeds 1e14");
  }
  return inv;
}

bool is_hermitian(const Matrix& m, double tol) {
  const std::size_t n = m.order();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
  return true;
}

bool is_psd(const Matrix& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  const std::size_t n = m.order();
  // Hermitian part plus tol*I; Cholesky succeeds iff it is positive definite.
  Matrix a = 0.5 * (m + m.adjoint()) + Matrix::scalar(n, tol);
  Matrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l(j, k));
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return true;
}

Matrix expm(const Matrix& a) {
  const std::size_t n = a.order();
  const double norm = one_norm(a);
  if (!std::isfinite(norm)) throw Error(Errc::InvalidArgument, "expm of non-finite matrix");
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = a * Complex(std::ldexp(1.0, -squarings));

  // Pade(6,6) coefficients c_j = c_{j-1} (p - j + 1) / (j (2p - j + 1)), p = 6.
  constexpr int p = 6;
  Matrix numer = Matrix::identity(n);
  Matrix denom = Matrix::identity(n);
  Matrix power = Matrix::identity(n);
  double c = 1.0;
  for (int j = 1; j <= p; ++j) {
    c *= static_cast<double>(p - j + 1) / static_cast<double>(j * (2 * p - j + 1));
    power = power * scaled;
    numer += c * power;
    denom += ((j % 2 == 0) ? c : -c) * power;
  }
  Matrix result = solve(denom, numer);
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

Complex inner(std::span<const Complex> g, std::span<const Complex> h) {
  if (g.size() != h.size()) throw Error(Errc::ShapeMismatch, "inner product of unequal lengths");
  Complex acc{};
  for (std::size_t s = 0; s < g.size(); ++s) acc += g[s] * std::conj(h[s]);
  return acc;
}

double norm2(std::span<const Complex> v) {
  double acc = 0.0;
  for (Complex z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

}  // namespace sldl

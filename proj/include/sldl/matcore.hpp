#pragma once

// Small dense complex matrices of order n (and 2n), sized for the n <= ~16
// systems that appear in vector Sturm-Liouville problems. No external BLAS.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sldl {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

class Matrix {
 public:
  // Zero matrix of order n (n >= 1).
  explicit Matrix(std::size_t n);
  // Row-major entries; throws InvalidArgument on wrong size or non-finite data.
  Matrix(std::size_t n, std::vector<Complex> entries);

  static Matrix identity(std::size_t n);
  static Matrix scalar(std::size_t n, Complex c);
  static Matrix diagonal(std::span<const Complex> diag);
  static Matrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

  std::size_t order() const noexcept { return n_; }
  Complex operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  std::span<const Complex> data() const noexcept { return a_; }

  Matrix adjoint() const;
  bool is_finite() const noexcept;
  bool is_zero() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(Complex c);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_;
  std::vector<Complex> a_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix m);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);
Matrix operator*(Complex c, Matrix m);
Matrix operator*(Matrix m, Complex c);
Vector operator*(const Matrix& m, std::span<const Complex> v);

// 2x2 grid of order-n blocks; the carrier for F, Lambda and T of the
// first-order system.
struct BlockMatrix2n {
  Matrix b11, b12, b21, b22;

  std::size_t order() const noexcept { return b11.order(); }
  Matrix assemble() const;
  static BlockMatrix2n split(const Matrix& m);
};

double frobenius_norm(const Matrix& m);
double one_norm(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Partial-pivot Gauss-Jordan. Throws Errc::Singular on a zero pivot or when
// the 1-norm condition estimate exceeds 1e14.
Matrix invert(const Matrix& m);

// Solves A X = B for X (partial pivoting). Throws Errc::Singular.
Matrix solve(const Matrix& a, const Matrix& b);

bool is_hermitian(const Matrix& m, double tol);

// Positive semidefinite within tol: Cholesky of m + tol*I succeeds.
// Non-Hermitian input (beyond tol) is never PSD.
bool is_psd(const Matrix& m, double tol);

// exp(A) by scaling and squaring with the diagonal (6,6) Pade approximant;
// A is scaled until its 1-norm is <= 0.5.
Matrix expm(const Matrix& a);

// (g, h) = sum_s g_s conj(h_s)
Complex inner(std::span<const Complex> g, std::span<const Complex> h);
double norm2(std::span<const Complex> v);

}  // namespace sldl

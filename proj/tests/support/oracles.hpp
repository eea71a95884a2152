#pragma once

// Reference computations that share no code with the library: tabulated
// quadrature nodes, hand-derived kernels and a plain RK4 integrator.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "sldl/matcore.hpp"
#include "sldl/quasidiff.hpp"

namespace oracle {

using sldl::Complex;
using sldl::Matrix;

// 5-point Gauss-Legendre on [-1, 1], exact through degree 9.
inline constexpr std::array<double, 5> kGL5x = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGL5w = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                0.4786286704993665, 0.2369268850561891};

inline double gl5(double lo, double hi, const std::function<double(double)>& f) {
  double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo), acc = 0.0;
  for (std::size_t i = 0; i < 5; ++i) acc += kGL5w[i] * f(mid + half * kGL5x[i]);
  return acc * half;
}

// int_lo^hi dx int_tlo(x)^thi(x) g(x, t) dt, exact for low-degree polynomials.
inline double gl5_2d(double lo, double hi, const std::function<double(double)>& tlo,
                     const std::function<double(double)>& thi, const std::function<double(double, double)>& g) {
  return gl5(lo, hi, [&](double x) { return gl5(tlo(x), thi(x), [&](double t) { return g(x, t); }); });
}

// Kernel entry of -y'' + H delta(x - c) y by hand: x - t off the node, plus
// (c - t)(x - c) h once t <= c <= x.
inline Complex delta_kernel_entry(bool diagonal, Complex h, double c, double x, double t) {
  Complex k = diagonal ? Complex(x - t) : Complex(0.0);
  if (t <= c && c <= x) k += (c - t) * (x - c) * h;
  return k;
}

// int int_{a<=t<=x<=b} |k|^2 split at the node so every piece is a polynomial.
inline double delta_kernel_square_integral(bool diagonal, Complex h, double a, double c, double b) {
  auto g = [&](double x, double t) { return std::norm(delta_kernel_entry(diagonal, h, c, x, t)); };
  auto id = [](double x) { return x; };
  double left = gl5_2d(a, c, [&](double) { return a; }, id, g);
  double cross = gl5_2d(c, b, [&](double) { return a; }, [&](double) { return c; }, g);
  double right = gl5_2d(c, b, [&](double) { return c; }, id, g);
  return left + cross + right;
}

// Classic RK4 for Y' = M(x) Y on [x0, x1] with fixed steps.
inline std::vector<Complex> rk4(const std::function<Matrix(double)>& M, std::vector<Complex> y, double x0,
                                double x1, std::size_t steps) {
  double h = (x1 - x0) / static_cast<double>(steps);
  auto axpy = [](const std::vector<Complex>& a, const std::vector<Complex>& b, double s) {
    std::vector<Complex> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  for (std::size_t k = 0; k < steps; ++k) {
    double x = x0 + h * static_cast<double>(k);
    auto k1 = M(x) * y;
    auto k2 = M(x + h / 2) * axpy(y, k1, h / 2);
    auto k3 = M(x + h / 2) * axpy(y, k2, h / 2);
    auto k4 = M(x + h) * axpy(y, k3, h);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return y;
}

inline Matrix random_symmetric(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = u(rng);
  return m;
}

inline Matrix random_hermitian(std::mt19937_64& rng, std::size_t n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = u(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = Complex(u(rng), u(rng));
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

inline Matrix random_complex(std::mt19937_64& rng, std::size_t n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
  return m;
}

// Hermitian and comfortably positive definite.
inline Matrix random_hpd(std::mt19937_64& rng, std::size_t n) {
  Matrix g = random_complex(rng, n, 0.5);
  return g * g.adjoint() + Matrix::identity(n);
}

// Random piecewise-constant general triple on [0, X] with `pieces` pieces.
inline sldl::CoefficientModel random_triple(std::mt19937_64& rng, std::size_t n, std::size_t pieces, double X) {
  std::uniform_real_distribution<double> u(0.0, X);
  std::vector<double> bp;
  while (bp.size() + 1 < pieces) {
    double x = u(rng);
    bool clash = x < 1e-3 || x > X - 1e-3;
    for (double y : bp) clash = clash || std::abs(x - y) < 1e-3;
    if (!clash) bp.push_back(x);
  }
  std::sort(bp.begin(), bp.end());
  std::vector<Matrix> P, Q, R;
  for (std::size_t k = 0; k < pieces; ++k) {
    P.push_back(random_hpd(rng, n));
    Q.push_back(random_hermitian(rng, n, 1.0));
    R.push_back(random_complex(rng, n, 0.5));
  }
  return sldl::CoefficientModel::general_triple(X, bp, P, Q, R);
}

}  // namespace oracle

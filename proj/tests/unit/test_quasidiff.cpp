#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "oracles.hpp"
#include "sldl/errors.hpp"
#include "sldl/quasidiff.hpp"

using namespace sldl;

namespace {

CoefficientModel scalar_delta(double c, double h, double X) {
  return CoefficientModel::delta_nodes(1, X, {{c, Matrix::scalar(1, h)}});
}

QuasiState scalar_state(double f, double f1) { return {{f}, {f1}}; }

}  // namespace

TEST_CASE("system matrix examples") {
  auto free = CoefficientModel::free(2, 5.0);
  BlockMatrix2n F = build_system_matrix(free, 0.0, 1.0);
  CHECK(F.b11.is_zero());
  CHECK(F.b12 == Matrix::identity(2));
  CHECK(F.b21.is_zero());
  CHECK(F.b22.is_zero());

  double h = 1.5;
  auto step = CoefficientModel::step_sigma(2.0, {}, {Matrix::scalar(1, h)});
  BlockMatrix2n S = build_system_matrix(step, 0.0, 0.5);
  CHECK(S.b11(0, 0) == Complex(h));
  CHECK(S.b12(0, 0) == Complex(1.0));
  CHECK(S.b21(0, 0) == Complex(-h * h));
  CHECK(S.b22(0, 0) == Complex(-h));

  auto dist = CoefficientModel::distributional(2.0, {}, {Matrix::identity(1)}, {Matrix(1)}, {Matrix::scalar(1, h)});
  BlockMatrix2n D = build_system_matrix(dist, 0.0, 0.5);
  CHECK(max_abs_diff(D.assemble(), S.assemble()) <= 1e-15);

  // lambda enters the lower-left block only
  BlockMatrix2n L = build_system_matrix(free, Complex(2.0, 1.0), 1.0);
  CHECK(L.b21(0, 0) == Complex(-2.0, -1.0));
}

TEST_CASE("delta nodes normalize to step sigma") {
  auto m = CoefficientModel::delta_nodes(1, 4.0, {{1.0, Matrix::scalar(1, 2.0)}, {2.5, Matrix::scalar(1, -0.5)}});
  REQUIRE(m.sigma_values().size() == 3);
  CHECK(m.sigma_values()[0](0, 0) == 0.0);
  CHECK(m.sigma_values()[1](0, 0) == 2.0);
  CHECK(m.sigma_values()[2](0, 0) == 1.5);
  // right-continuous pieces
  CHECK(m.piece_index(1.0) == 1);
  CHECK(m.piece_index(1.0, Side::Left) == 0);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(CoefficientModel::step_sigma(1.0, {0.5, 0.4}, {Matrix(1), Matrix(1), Matrix(1)}), Error);
  CHECK_THROWS_AS(CoefficientModel::general_triple(1.0, {}, {Matrix(1)}, {Matrix(1)}, {Matrix(1)}), Error);
  CHECK_THROWS_AS(CoefficientModel::delta_nodes(1, 1.0, {{0.5, Matrix::from_rows({{0}})}, {0.2, Matrix(1)}}), Error);
  CHECK_THROWS_AS(CoefficientModel::step_sigma(1.0, {}, {Matrix::from_rows({{0, 1}, {2, 0}})}), Error);
}

TEST_CASE("propagation examples") {
  auto free = CoefficientModel::free(1, 10.0);
  auto y = propagate(free, 0.0, scalar_state(0, 1), 0.0, 3.0);
  CHECK(std::abs(y.f[0] - 3.0) <= 1e-14);
  CHECK(std::abs(y.f1[0] - 1.0) <= 1e-14);
  y = propagate(free, 0.0, scalar_state(1, 0), 0.0, 7.0);
  CHECK(std::abs(y.f[0] - 1.0) <= 1e-14);
  CHECK(std::abs(y.f1[0]) <= 1e-14);

  double h = 2.5;
  auto m = scalar_delta(1.0, h, 3.0);
  for (double x : {0.3, 1.0, 1.7, 3.0}) {
    auto s = propagate(m, 0.0, scalar_state(0, 1), 0.0, x);
    double expect = x <= 1.0 ? x : x + h * (x - 1.0);
    CHECK(std::abs(s.f[0] - expect) <= 1e-13);
  }
}

TEST_CASE("propagation is a flow") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = oracle::random_triple(rng, 2, 6, 3.0);
    QuasiState s{{Complex(1, 0.5), Complex(-0.3, 0)}, {Complex(0.2, 0), Complex(0, 1)}};
    auto direct = propagate(m, 0.0, s, 0.2, 2.9);
    auto split = propagate(m, 0.0, propagate(m, 0.0, s, 0.2, 1.3), 1.3, 2.9);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::abs(direct.f[i] - split.f[i]) <= 1e-12 * (1 + std::abs(direct.f[i])));
      CHECK(std::abs(direct.f1[i] - split.f1[i]) <= 1e-12 * (1 + std::abs(direct.f1[i])));
    }
  }
}

TEST_CASE("propagation matches an RK4 solve of the system") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 5; ++trial) {
    auto m = oracle::random_triple(rng, 2, 4, 2.0);
    Complex lambda(0.7, 0.0);
    Vector y0{1.0, Complex(0, 1), 0.5, -0.25};
    auto M = [&](double x) { return build_system_matrix(m, lambda, x).assemble(); };
    // integrate piece by piece so RK4 never straddles a jump
    Vector y = y0;
    auto bp = m.breakpoints();
    double lo = 0.0;
    for (std::size_t k = 0; k <= bp.size(); ++k) {
      double hi = k < bp.size() ? bp[k] : m.end();
      auto Mk = [&, mid = 0.5 * (lo + hi)](double) { return M(mid); };
      y = oracle::rk4(Mk, y, lo, hi, 4000);
      lo = hi;
    }
    QuasiState s{{y0[0], y0[1]}, {y0[2], y0[3]}};
    auto got = propagate(m, lambda, s, 0.0, m.end());
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::abs(got.f[i] - y[i]) <= 1e-9 * (1 + std::abs(y[i])));
      CHECK(std::abs(got.f1[i] - y[2 + i]) <= 1e-9 * (1 + std::abs(y[2 + i])));
    }
  }
}

TEST_CASE("classical derivative examples") {
  auto free = CoefficientModel::free(1, 5.0);
  CHECK(classical_derivative(free, scalar_state(2, 1), 2.0, Side::Right)[0] == Complex(1.0));

  double h = -1.25, c = 1.5;
  auto m = scalar_delta(c, h, 4.0);
  auto s = propagate(m, 0.0, scalar_state(0, 1), 0.0, c);
  Complex right = classical_derivative(m, s, c, Side::Right)[0];
  Complex left = classical_derivative(m, s, c, Side::Left)[0];
  CHECK(std::abs(right - left - h * c) <= 1e-13);
  // finite differences on propagate output
  double eps = 1e-6;
  auto ahead = propagate(m, 0.0, scalar_state(0, 1), 0.0, c + eps);
  CHECK(std::abs((ahead.f[0] - s.f[0]) / eps - right) <= 1e-6);

  auto step = CoefficientModel::step_sigma(3.0, {}, {Matrix::scalar(1, 0.75)});
  CHECK(classical_derivative(step, scalar_state(2, 3), 1.0, Side::Right)[0] == Complex(3 + 0.75 * 2));

  auto triple = CoefficientModel::general_triple(1.0, {}, {Matrix::identity(1)}, {Matrix(1)}, {Matrix(1)});
  CHECK_THROWS_AS(classical_derivative(triple, scalar_state(1, 1), 0.5, Side::Right), Error);
}

TEST_CASE("fundamental pair examples") {
  auto free = std::make_shared<const CoefficientModel>(CoefficientModel::free(3, 4.0));
  FundamentalPair p(free, 0.0, {0.0, 1.0, 2.5});
  CHECK(p.phi(0) == Matrix::identity(3));
  CHECK(p.psi1(0) == Matrix::identity(3));
  CHECK(p.phi1(0).is_zero());
  CHECK(p.psi(0).is_zero());
  CHECK(max_abs_diff(p.phi(2), Matrix::identity(3)) <= 1e-14);
  CHECK(max_abs_diff(p.psi(2), Matrix::scalar(3, 2.5)) <= 1e-14);

  auto d = fundamental_pair(scalar_delta(1.0, -3.0, 2.0), 0.0, {0.0, 1.0, 2.0});
  CHECK(std::abs(d.psi(2)(0, 0) - (-1.0)) <= 1e-13);

  CHECK_THROWS_AS(fundamental_pair(*free, 0.0, {0.5, 1.0}), Error);
  CHECK_THROWS_AS(p.at(3.0), Error);
}

TEST_CASE("T times T inverse is the identity") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = oracle::random_triple(rng, 1 + trial % 3, 5, 2.0);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.1 * i);
    auto pair = fundamental_pair(m, 0.0, grid);
    std::size_t n = m.order();
    for (std::size_t i = 0; i < pair.size(); ++i) {
      Matrix prod = pair.sample(i).assemble() * transfer_inverse(pair.sample(i)).assemble();
      CHECK(max_abs_diff(prod, Matrix::identity(2 * n)) <= 1e-8);
    }
  }
}

TEST_CASE("cauchy kernel examples") {
  auto free = fundamental_pair(CoefficientModel::free(1, 5.0), 0.0, {0.0, 5.0});
  for (double x : {0.5, 2.0, 4.5})
    for (double t : {0.0, 1.0, 3.0}) CHECK(std::abs(cauchy_kernel(free, x, t)(0, 0) - (x - t)) <= 1e-13);

  double h = 2.0, c = 1.0;
  auto d = fundamental_pair(scalar_delta(c, h, 3.0), 0.0, {0.0, 3.0});
  for (double t : {0.0, 0.4, 1.0})
    for (double x : {1.0, 1.6, 3.0})
      CHECK(std::abs(cauchy_kernel(d, x, t)(0, 0) - ((x - t) + h * (c - t) * (x - c))) <= 1e-12);
  for (double x : {0.0, 0.7, 1.0, 2.2}) CHECK(frobenius_norm(cauchy_kernel(d, x, x)) <= 1e-14);

  CHECK_THROWS_AS(cauchy_kernel(d, 3.5, 0.0), Error);
  auto shifted = fundamental_pair(CoefficientModel::free(1, 5.0), Complex(1.0, 0), {0.0, 5.0});
  CHECK_THROWS_AS(cauchy_kernel(shifted, 1.0, 0.0), Error);
}

TEST_CASE("green form examples") {
  QuasiState u{{Complex(1, 2)}, {Complex(0.5, -1)}};
  CHECK(std::abs(green_form(u, u).real()) <= 1e-15);
  CHECK(std::abs(green_form(u, u) - Complex(0, 2) * inner(u.f1, u.f).imag()) <= 1e-15);
  for (int k = 0; k < 10; ++k) {
    double x = 0.7 * k;
    CHECK(green_form(scalar_state(1, 0), scalar_state(x, 1)) == Complex(-1.0));
  }
  CHECK(green_form(scalar_state(0, 1), scalar_state(0, 1)) == Complex(0.0));
}

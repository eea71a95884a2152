#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "oracles.hpp"
#include "sldl/criteria.hpp"
#include "sldl/errors.hpp"

using namespace sldl;

namespace {

const double kTwelfth = std::sqrt(1.0 / 12.0);

CoefficientModel delta_at(double c, const Matrix& H, double X) {
  return CoefficientModel::delta_nodes(H.order(), X, {{c, H}});
}

SeriesPolicy periodic() {
  SeriesPolicy p;
  p.periodic_extension = true;
  return p;
}

}  // namespace

TEST_CASE("t1 term examples") {
  auto free = CoefficientModel::free(1, 10.0);
  CHECK(std::abs(t1_term(free, 0.0, 1.0) - kTwelfth) <= 1e-14);
  for (double L : {0.5, 2.0, 3.7})
    CHECK(std::abs(t1_term(free, 1.0, 1.0 + L) - L * L / std::sqrt(12.0)) <= 1e-13 * L * L);
  auto d = delta_at(1.0, Matrix::scalar(1, -3.0), 2.0);
  CHECK(std::abs(t1_term(d, 0.0, 2.0) - std::sqrt(1.0 / 3.0)) <= 1e-13);
  // the pair form agrees and refuses ranges outside its span
  auto pair = fundamental_pair(d, 0.0, {0.0, 1.0, 2.0});
  CHECK(std::abs(t1_term(pair, 0.0, 2.0) - std::sqrt(1.0 / 3.0)) <= 1e-13);
  auto narrow = fundamental_pair(d, 0.0, {0.0, 1.0});
  CHECK_THROWS_AS(t1_term(narrow, 0.0, 2.0), Error);
}

TEST_CASE("t1 series on the free model") {
  auto free = CoefficientModel::free(1, 100.0);
  auto r = t1_series(free, IntervalSeq::uniform(1.0, 100));
  REQUIRE(r.terms.size() == 100);
  for (double t : r.terms) CHECK(std::abs(t - kTwelfth) <= 1e-12 * kTwelfth);
  CHECK(r.partial_sums.back() == doctest::Approx(100 * kTwelfth).epsilon(1e-12));
  CHECK(r.verdict == SeriesVerdict::DivergesProven);

  auto empty = t1_series(free, IntervalSeq{});
  CHECK(empty.terms.empty());
  CHECK(empty.verdict == SeriesVerdict::Inconclusive);
}

TEST_CASE("t1 series echoes a single-delta closed form") {
  std::vector<DeltaNode> nodes;
  std::vector<Interval> ivs;
  for (int k = 0; k < 10; ++k) {
    double a = 3.0 * k, c = a + 1.0, b = a + 2.5;
    double rho = 1.0, s = 1.5;
    nodes.push_back({c, Matrix::scalar(1, -3.0 / rho - 1.5 / s)});
    ivs.push_back({a, b, c});
  }
  auto m = CoefficientModel::delta_nodes(1, 30.0, nodes);
  auto r = t1_series(m, IntervalSeq(ivs));
  for (std::size_t k = 0; k < r.terms.size(); ++k)
    CHECK(std::abs(r.terms[k] - std::sqrt(lemma2_diag(-3.0 - 1.0, 1.0, 1.5))) <= 1e-10);
}

TEST_CASE("inequality 78 examples") {
  auto pair = fundamental_pair(CoefficientModel::free(1, 3.0), 0.0, {0.0, 3.0});
  auto m = ineq78_margin(pair, 0.0, 1.0);
  CHECK(std::abs(m.lhs - 4.0 / 3.0) <= 1e-13);
  CHECK(std::abs(m.rhs - std::sqrt(2.0) * kTwelfth) <= 1e-13);
  auto z = ineq78_margin(pair, 1.0, 1.0);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  auto d = fundamental_pair(delta_at(1.0, Matrix::scalar(1, -3.0), 2.0), 0.0, {0.0, 2.0});
  auto md = ineq78_margin(d, 0.0, 2.0);
  CHECK(md.lhs >= md.rhs);
}

TEST_CASE("single-delta closed-form examples") {
  CHECK(lemma2_diag(0, 1, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(lemma2_diag(-3, 1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(lemma2_diag(1, 1, 2) == doctest::Approx(8.0 / 9.0 + 4.0 + 6.75).epsilon(1e-15));
  CHECK(lemma2_offdiag(1.0, 1, 1) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(lemma2_offdiag(0.0, 1, 1) == 0.0);
  CHECK(lemma2_offdiag(3.0, 1, 2) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(lemma2_lower_bound(-3, 1, 1) == 0.0);
  CHECK(lemma2_lower_bound(0, 1, 1) == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(lemma2_lower_bound(0, 1, 2) == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-15));
  CHECK(lemma2_lower_bound(0, 1, 2) <= lemma2_diag(0, 1, 2));
}

TEST_CASE("lemma 2 closed forms match hand-kernel quadrature") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> h(-10, 10), len(0.05, 4.0);
  for (int trial = 0; trial < 500; ++trial) {
    double rho = len(rng), s = len(rng), hd = h(rng);
    Complex ho(h(rng), h(rng));
    double diag = oracle::delta_kernel_square_integral(true, hd, 0.0, rho, rho + s);
    double off = oracle::delta_kernel_square_integral(false, ho, 0.0, rho, rho + s);
    CHECK(std::abs(lemma2_diag(hd, rho, s) - diag) <= 1e-11 * diag);
    CHECK(std::abs(lemma2_offdiag(ho, rho, s) - off) <= 1e-11 * off);
    CHECK(lemma2_lower_bound(hd, rho, s) <= lemma2_diag(hd, rho, s) * (1 + 1e-14));
  }
}

TEST_CASE("t1 term equals the square root of the diagonal closed form for n = 1") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> h(-10, 10), pos(0.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    double a = pos(rng), b = pos(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 0.1) continue;
    double c = a + (b - a) * std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    double hh = h(rng);
    auto m = delta_at(c, Matrix::scalar(1, hh), 10.0);
    CHECK(std::abs(t1_term(m, a, b) - std::sqrt(lemma2_diag(hh, c - a, b - c))) <=
          1e-8 * std::sqrt(lemma2_diag(hh, c - a, b - c)));
  }
}

TEST_CASE("t5 series examples") {
  auto ivs = IntervalSeq::uniform(2.0, 20);
  std::vector<Matrix> zero(20, Matrix(2));
  auto r = t5_series(ivs, zero, {0, 0}, periodic());
  for (double t : r.terms) CHECK(t == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
  CHECK(r.criterion == "t5_diag");
  CHECK(r.verdict == SeriesVerdict::DivergesProven);

  std::vector<Matrix> killer(20, Matrix::from_rows({{-3, 1}, {1, -3}}));
  auto silent = t5_series(ivs, killer, {0, 0}, periodic());
  for (double t : silent.terms) CHECK(t == 0.0);
  CHECK(silent.verdict != SeriesVerdict::DivergesProven);
  auto off = t5_series(ivs, killer, {0, 1}, periodic());
  for (double t : off.terms) CHECK(t == 1.0);
  CHECK(off.verdict == SeriesVerdict::DivergesProven);
  CHECK(off.criterion == "t5_offdiag");

  CHECK_THROWS_AS(t5_series(ivs, std::vector<Matrix>(3, Matrix(2)), {0, 0}), Error);
  CHECK_THROWS_AS(t5_series(ivs, zero, {0, 2}), Error);
  std::vector<Matrix> skew(20, Matrix::from_rows({{0, 1}, {2, 0}}));
  CHECK_THROWS_AS(t5_series(ivs, skew, {0, 1}), Error);
}

TEST_CASE("t5 diagonal terms bound the t1 terms from below") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> h(-10, 10), len(0.1, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    double rho = len(rng), s = len(rng), hh = h(rng);
    auto m = delta_at(rho, Matrix::scalar(1, hh), rho + s);
    IntervalSeq iv({{0.0, rho + s, rho}});
    std::vector<Matrix> jump{Matrix::scalar(1, hh)};
    double t5 = t5_series(iv, jump, {0, 0}).terms[0];
    CHECK(t1_term(m, 0.0, rho + s) >= std::pow(3.0, -0.75) * t5 * (1 - 1e-12));
  }
}

TEST_CASE("corollary series examples") {
  std::vector<double> lengths(10, 2.0);
  std::vector<Matrix> zero(10, Matrix(1));
  auto c1 = cor1_series(lengths, zero, {0, 0});
  for (double t : c1.terms) CHECK(t == doctest::Approx(std::pow(2.0, 2.5) * std::sqrt(3.0)).epsilon(1e-15));

  auto c2 = cor2_series(SeqRule::constant(1.0), MatrixSeqRule::zero(1), 10, {0, 0});
  for (double t : c2.terms) CHECK(t == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
  CHECK(c2.verdict == SeriesVerdict::DivergesProven);

  auto cs = cor2_series(SeqRule::harmonic(), MatrixSeqRule::christ_stolz(1), 2000, {0, 0});
  for (std::size_t i = 0; i < cs.terms.size(); i += 97) {
    double k = static_cast<double>(i + 1);
    double expect = 1.0 / (k * (k + 1)) * std::sqrt(1.0 / k + 1.0 / (k + 1)) * std::sqrt(k + 0.5);
    CHECK(std::abs(cs.terms[i] - expect) <= 1e-12 * expect);
  }
  CHECK(cs.verdict != SeriesVerdict::DivergesProven);
}

TEST_CASE("t2 predicate examples") {
  auto sigma = SigmaProfile::linear(50.0, Matrix::identity(2));
  auto ok = t2_predicate(sigma, IntervalSeq::uniform(1.0, 50), periodic());
  CHECK(ok.hypothesis_ok);
  for (double t : ok.series.terms) CHECK(t == 1.0);
  CHECK(ok.limit_point());

  auto bad = t2_predicate(SigmaProfile::linear(50.0, Matrix::from_rows({{1, 0}, {0, -1}})),
                          IntervalSeq::uniform(1.0, 50));
  CHECK_FALSE(bad.hypothesis_ok);
  CHECK_FALSE(bad.limit_point());

  std::vector<Interval> shrinking;
  double a = 0.0;
  for (int k = 1; k <= 200; ++k) {
    shrinking.push_back({a, a + 1.0 / k, std::nullopt});
    a += 1.0 / k;
  }
  auto conv = t2_predicate(SigmaProfile::linear(10.0, Matrix::identity(1)), IntervalSeq(shrinking));
  CHECK(conv.hypothesis_ok);
  CHECK(conv.series.verdict == SeriesVerdict::Inconclusive);

  auto delta = delta_at(0.5, Matrix::scalar(1, 1.0), 3.0);
  CHECK_THROWS_AS(t2_predicate(delta, IntervalSeq::uniform(1.0, 3)), Error);
  auto triple = CoefficientModel::general_triple(3.0, {}, {Matrix::identity(1)}, {Matrix(1)}, {Matrix(1)});
  CHECK_THROWS_AS(t2_predicate(triple, IntervalSeq::uniform(1.0, 3)), Error);
}

TEST_CASE("interval sequences") {
  CHECK_THROWS_AS(IntervalSeq({{0.0, 1.0, std::nullopt}, {0.5, 2.0, std::nullopt}}), Error);
  CHECK_THROWS_AS(IntervalSeq({{1.0, 1.0, std::nullopt}}), Error);
  CHECK_THROWS_AS(IntervalSeq({{0.0, 1.0, 1.0}}), Error);
  auto u = IntervalSeq::uniform(2.0, 3, 1.0);
  CHECK(u[2].a == 5.0);
  CHECK(*u[2].c == 6.0);
  std::vector<double> nodes{1.0, 2.0, 4.0};
  auto around = IntervalSeq::around_nodes(nodes);
  CHECK(around.has_markers());
  CHECK(*around[1].c == 2.0);
}

TEST_CASE("jumps at markers") {
  auto m = CoefficientModel::delta_nodes(1, 10.0, {{1.0, Matrix::scalar(1, 2.0)}, {3.0, Matrix::scalar(1, -1.0)}});
  auto j = jumps_at_markers(m, IntervalSeq({{0.0, 2.0, 1.0}, {2.0, 4.0, 3.0}}));
  REQUIRE(j);
  CHECK((*j)[0](0, 0) == 2.0);
  CHECK((*j)[1](0, 0) == -1.0);
  CHECK_FALSE(jumps_at_markers(m, IntervalSeq({{0.0, 2.0, 0.5}})));
}

TEST_CASE("kernel integrals of a general triple converge") {
  std::mt19937_64 rng(34);
  auto m = oracle::random_triple(rng, 2, 4, 3.0);
  auto k = kernel_integrals(m, 0.2, 2.8);
  CHECK(k.total() > 0.0);
  // partial sums of a report never decrease
  auto r = t1_series(m, IntervalSeq::uniform(0.5, 5));
  for (std::size_t i = 1; i < r.partial_sums.size(); ++i) CHECK(r.partial_sums[i] >= r.partial_sums[i - 1]);
}

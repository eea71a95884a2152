#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "oracles.hpp"
#include "sldl/bridge.hpp"
#include "sldl/errors.hpp"

using namespace sldl;

TEST_CASE("nodes to Z examples") {
  std::vector<Vector> f;
  for (int k = 1; k <= 10; ++k) f.push_back({Complex(k)});
  std::vector<double> d(11, 1.0);
  auto Z = nodes_to_Z(f, d);
  CHECK(Z.offset == 1);
  REQUIRE(Z.size() == 10);
  for (std::size_t k = 1; k <= 10; ++k) CHECK(std::abs(Z.at(k)[0] - std::sqrt(2.0) * static_cast<double>(k)) <= 1e-14);
  std::vector<Vector> zero(5, Vector{0.0, 0.0});
  auto Z0 = nodes_to_Z(zero, d);
  for (const auto& z : Z0.values) CHECK(norm2(z) == 0.0);
}

TEST_CASE("equivalence residual examples") {
  DeltaLattice free{1, SeqRule::constant(1.0), MatrixSeqRule::zero(1)};
  auto r = equivalence_residual(free.model(60), 50, {{0.0}, {1.0}});
  CHECK(r.max_abs <= 1e-12);
  CHECK(r.equations == 49);

  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> sp(0.05, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<DeltaNode> nodes;
    double x = 0.0;
    for (int k = 0; k < 52; ++k) {
      x += sp(rng);
      nodes.push_back({x, oracle::random_symmetric(rng, 2, -5, 5)});
    }
    auto m = CoefficientModel::delta_nodes(2, x + sp(rng), nodes);
    auto res = equivalence_residual(m, 50, {{1.0, 0.0}, {0.0, 1.0}});
    CHECK(res.max_normalized <= 1e-10);
  }

  DeltaLattice cs{1, SeqRule::harmonic(), MatrixSeqRule::christ_stolz(1)};
  auto c = equivalence_residual(cs.model(202), 200, {{0.0}, {1.0}});
  CHECK(c.max_normalized <= 1e-9);

  CHECK_THROWS_AS(equivalence_residual(free.model(10), 50, {{0.0}, {1.0}}), Error);
  CHECK_THROWS_AS(equivalence_residual(CoefficientModel::free(1, 5.0), 2, {{0.0}, {1.0}}), Error);
}

TEST_CASE("l2 tail examples") {
  VecSeq grow{1, {}};
  for (int k = 1; k <= 100; ++k) grow.values.push_back({std::sqrt(2.0) * k});
  auto g = l2_tail_report(grow);
  CHECK(g.verdict == SeriesVerdict::DivergesProven);
  CHECK(g.certificate->kind == "trend");

  VecSeq geo{1, {}};
  for (int k = 1; k <= 100; ++k) geo.values.push_back({std::pow(2.0, -k)});
  auto c = l2_tail_report(geo);
  CHECK(c.verdict == SeriesVerdict::ConvergesBounded);
  CHECK(c.terms[0] == 0.25);

  CHECK_THROWS_AS(l2_tail_report(VecSeq{}), Error);
}

TEST_CASE("Christ-Stolz solutions are square summable") {
  DeltaLattice cs{1, SeqRule::harmonic(), MatrixSeqRule::christ_stolz(1)};
  auto b = cs.blocks(100001);
  for (auto seed : {std::pair{0.0, 1.0}, std::pair{1.0, 0.0}}) {
    auto u = solve_recurrence(b, {seed.first}, {seed.second}, 100000);
    VecSeq tail{1, {u.values.begin() + 1, u.values.end()}};
    CHECK(l2_tail_report(tail).verdict == SeriesVerdict::ConvergesBounded);
  }
}

TEST_CASE("classify composes the criteria") {
  Problem free;
  free.name = "free";
  free.model = std::make_shared<const CoefficientModel>(CoefficientModel::free(1, 100.0));
  free.intervals = IntervalSeq::uniform(1.0, 100);
  free.lattice = DeltaLattice{1, SeqRule::constant(1.0), MatrixSeqRule::zero(1)};
  auto v = classify(free, {1000, {}});
  CHECK(v.classification == Classification::LimitPoint);
  CHECK(v.side == VerdictSide::Both);
  CHECK(v.evidence.front().criterion == "t1");
  CHECK(v.evidence.front().verdict == SeriesVerdict::DivergesProven);
  CHECK(v.reports.size() >= v.evidence.size());

  Problem shrinking;
  shrinking.name = "nothing certified";
  shrinking.blocks = DeltaLattice{1, SeqRule::harmonic(), MatrixSeqRule::zero(1)}.blocks(500);
  CHECK(classify(shrinking, {500, {}}).classification == Classification::Inconclusive);

  Problem mixed = free;
  mixed.lattice = DeltaLattice{1, SeqRule::harmonic(), MatrixSeqRule::christ_stolz(1)};
  try {
    classify(mixed, {10000, {}});
    FAIL("expected conflicting evidence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConflictingEvidence);
  }
}

TEST_CASE("gallery") {
  auto g = gallery();
  CHECK(g.size() >= 4);
  CHECK(gallery_entry("ChristStolz")->expected == Classification::LimitCircle);
  CHECK(gallery_entry("free-lattice")->expected == Classification::LimitPoint);
  CHECK_FALSE(gallery_entry("nope"));
  for (const auto& e : g) {
    INFO(e.name);
    CHECK(classify(e.problem, e.config).classification == e.expected);
  }
}

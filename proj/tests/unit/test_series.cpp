#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sldl/errors.hpp"
#include "sldl/parallel.hpp"
#include "sldl/sequence.hpp"
#include "sldl/series.hpp"

using namespace sldl;

TEST_CASE("sequence rules") {
  auto h = SeqRule::harmonic();
  CHECK(h.value(4) == 0.25);
  CHECK(h.reciprocal(7) == 7.0);
  CHECK(h.exponent() == -1.0);
  CHECK(SeqRule::parse("const:2").value(100) == 2.0);
  CHECK(SeqRule::parse("power:3:-0.5").value(4) == 1.5);
  auto p = SeqRule::parse("periodic:1,2,3");
  CHECK(p.value(4) == 1.0);
  CHECK(p.period() == 3);
  CHECK(p.eventually_periodic());
  CHECK(SeqRule::parse("list:1,2").length() == 2);
  CHECK_THROWS_AS(SeqRule::parse("list:1,2").value(3), Error);
  CHECK_THROWS_AS(SeqRule::parse("wobble"), Error);
  CHECK(MatrixSeqRule::christ_stolz(1).value(5)(0, 0) == -11.0);
  CHECK(joint_period(SeqRule::periodic({1, 2}), MatrixSeqRule::periodic({Matrix(1), Matrix(1), Matrix(1)})) == 6);
}

TEST_CASE("report partial sums") {
  auto r = make_report("x", {1.0, 2.0, 0.5});
  CHECK(r.partial_sums == std::vector<double>{1.0, 3.0, 3.5});
  CHECK(r.verdict == SeriesVerdict::Inconclusive);
  CHECK_THROWS_AS(make_report("x", {1.0, -1.0}), Error);
}

TEST_CASE("divergence needs a floor or threshold mode") {
  std::vector<double> ones(50, 1.0);
  auto r = make_report("x", ones);
  apply_divergence_policy(r, {}, std::nullopt, "");
  CHECK(r.verdict == SeriesVerdict::Inconclusive);
  apply_divergence_policy(r, {}, 1.0, "constant");
  CHECK(r.verdict == SeriesVerdict::DivergesProven);
  CHECK(r.certificate->kind == "lower_bound");

  auto t = make_report("x", ones);
  SeriesPolicy thr;
  thr.threshold = 10.0;
  apply_divergence_policy(t, thr, std::nullopt, "");
  CHECK(t.verdict == SeriesVerdict::DivergesProven);
  CHECK(t.certificate->kind == "threshold");

  std::vector<double> fast;
  for (int k = 1; k <= 400; ++k) fast.push_back(100.0 / (double(k) * k));
  auto f = make_report("x", fast);
  apply_divergence_policy(f, thr, std::nullopt, "");
  CHECK(f.verdict == SeriesVerdict::Inconclusive);
}

TEST_CASE("convergence certificates") {
  std::vector<double> geo, raabe, slow, zero(20, 0.0);
  for (int k = 1; k <= 200; ++k) {
    geo.push_back(std::log(std::pow(0.5, k)));
    raabe.push_back(std::log(1.0 / (double(k) * k)));
    slow.push_back(std::log(1.0 / k));
  }
  CHECK(certify_convergence(geo)->kind == "ratio");
  CHECK(certify_convergence(raabe)->kind == "raabe");
  CHECK_FALSE(certify_convergence(slow));
  std::vector<double> logzero(20, -INFINITY);
  CHECK(certify_convergence(logzero)->kind == "vanishing_tail");
}

TEST_CASE("parallel_for visits every index and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw Error(Errc::InvalidArgument, "boom");
                  }),
                  Error);
  CHECK(worker_count() >= 1);
}

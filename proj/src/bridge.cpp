#include "sldl/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "sldl/errors.hpp"
#include "sldl/format.hpp"

namespace sldl {

namespace {

Evidence evidence_of(const CriterionReport& report, std::string name = {}) {
  return {name.empty() ? report.criterion : std::move(name), report.verdict, report.verdict_basis};
}

std::vector<Channel> channels(std::size_t n) {
  std::vector<Channel> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({i, i});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back({i, j});
  return out;
}

std::string channel_suffix(Channel c) {
  return "[" + std::to_string(c.i) + "," + std::to_string(c.j) + "]";
}

bool midpoint_markers(const IntervalSeq& intervals) {
  if (!intervals.has_markers() || intervals.empty()) return false;
  return std::all_of(intervals.items().begin(), intervals.items().end(), [](const Interval& iv) {
    return std::abs(*iv.c - 0.5 * (iv.a + iv.b)) <= 1e-12 * (iv.b - iv.a);
  });
}

bool diverges(const CriterionReport& r) { return r.verdict == SeriesVerdict::DivergesProven; }

struct Collector {
  Verdict verdict;
  bool limit_point = false;
  bool limit_circle = false;
  bool not_limit_circle = false;
  bool continuous = false;
  bool discrete = false;

  void add(CriterionReport report, std::string name = {}) {
    verdict.evidence.push_back(evidence_of(report, std::move(name)));
    verdict.reports.push_back(std::move(report));
  }
};

void run_continuous(const Problem& p, const ClassifyConfig& config, Collector& out) {
  if (p.model && p.intervals) {
    out.continuous = true;
    const CoefficientModel& model = *p.model;
    const IntervalSeq& intervals = *p.intervals;
    CriterionReport t1 = t1_series(model, intervals, config.policy);
    out.not_limit_circle |= diverges(t1);
    out.add(std::move(t1));

    if (const auto jumps = jumps_at_markers(model, intervals)) {
      for (Channel c : channels(model.order())) {
        CriterionReport t5 = t5_series(intervals, *jumps, c, config.policy);
        out.not_limit_circle |= diverges(t5);
        std::string name = t5.criterion + channel_suffix(c);
        out.add(std::move(t5), std::move(name));
      }
      if (midpoint_markers(intervals)) {
        std::vector<double> lengths;
        for (const auto& iv : intervals.items()) lengths.push_back(iv.b - iv.a);
        for (Channel c : channels(model.order())) {
          CriterionReport cor1 = cor1_series(lengths, *jumps, c, config.policy);
          out.not_limit_circle |= diverges(cor1);
          std::string name = cor1.criterion + channel_suffix(c);
          out.add(std::move(cor1), std::move(name));
        }
      }
    }

    if (model.variant() == Variant::StepSigma || model.variant() == Variant::DeltaNodes) {
      try {
        T2Result t2 = t2_predicate(model, intervals, config.policy);
        out.limit_point |= t2.limit_point();
        Evidence ev = evidence_of(t2.series);
        if (!t2.limit_point()) ev.verdict = SeriesVerdict::Inconclusive;
        out.verdict.evidence.push_back(std::move(ev));
        out.verdict.reports.push_back(std::move(t2.series));
      } catch (const Error& e) {
        if (e.code() != Errc::VariantUnsupported) throw;
        out.verdict.evidence.push_back({"t2", SeriesVerdict::Inconclusive, e.what()});
      }
    }
  }
  if (p.sigma && p.intervals) {
    out.continuous = true;
    T2Result t2 = t2_predicate(*p.sigma, *p.intervals, config.policy);
    out.limit_point |= t2.limit_point();
    Evidence ev = evidence_of(t2.series);
    if (!t2.limit_point()) ev.verdict = SeriesVerdict::Inconclusive;
    out.verdict.evidence.push_back(std::move(ev));
    out.verdict.reports.push_back(std::move(t2.series));
  }
}

void run_discrete(const Problem& p, const ClassifyConfig& config, Collector& out) {
  const std::size_t N = config.horizon;
  if (p.lattice) {
    out.discrete = true;
    const DeltaLattice& lattice = *p.lattice;
    CriterionReport carleman = carleman_report(lattice.blocks(N), N, config.policy);
    out.limit_point |= diverges(carleman);
    out.add(std::move(carleman));

    T7Result t7 = t7_check(lattice, N);
    out.limit_circle |= t7.limit_circle_certified;
    std::string basis;
    for (const auto* r : {&t7.a[0], &t7.a[1], &t7.b[0], &t7.b[1]}) {
      if (!basis.empty()) basis += "; ";
      basis += r->criterion + ": " + verdict_name(r->verdict);
    }
    out.verdict.evidence.push_back(
        {"t7", t7.limit_circle_certified ? SeriesVerdict::ConvergesBounded : SeriesVerdict::Inconclusive, basis});
    for (auto* r : {&t7.a[0], &t7.a[1], &t7.b[0], &t7.b[1]}) out.verdict.reports.push_back(std::move(*r));

    Cor3Result cor3 = corollary3_check(lattice, N);
    out.limit_circle |= cor3.limit_circle_certified;
    out.verdict.evidence.push_back(
        {"cor3", cor3.limit_circle_certified ? SeriesVerdict::ConvergesBounded : SeriesVerdict::Inconclusive,
         std::string("cond1: ") + (cor3.cond1 ? "holds" : "fails") + "; cor3_cond2: " +
             verdict_name(cor3.cond2.verdict) + "; cor3_cond3: " + verdict_name(cor3.cond3.verdict)});
    out.verdict.reports.push_back(std::move(cor3.cond2));
    out.verdict.reports.push_back(std::move(cor3.cond3));

    // The delta ODE of the lattice, continuous side.
    out.continuous = true;
    for (Channel c : channels(lattice.n)) {
      CriterionReport cor2 = cor2_series(lattice.d, lattice.H, N, c, config.policy);
      out.not_limit_circle |= diverges(cor2);
      std::string name = cor2.criterion + channel_suffix(c);
      out.add(std::move(cor2), std::move(name));
    }
  } else if (p.blocks) {
    out.discrete = true;
    const std::size_t count = std::min(N, p.blocks->size() - 1);
    if (count >= 1) {
      CriterionReport carleman = carleman_report(*p.blocks, count, config.policy);
      out.limit_point |= diverges(carleman);
      out.add(std::move(carleman));
    }
  }
}

}  // namespace

VecSeq nodes_to_Z(std::span<const Vector> f_at_nodes, std::span<const double> d) {
  if (f_at_nodes.empty() || d.size() < 2) throw Error(Errc::ShapeMismatch, "nodes_to_Z needs node values and |d| >= 2");
  const std::size_t n = f_at_nodes.front().size();
  const std::size_t count = std::min(f_at_nodes.size(), d.size() - 1);
  VecSeq Z{1, {}};
  Z.values.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    if (f_at_nodes[k - 1].size() != n) throw Error(Errc::ShapeMismatch, "node values differ in length");
    if (!(d[k - 1] > 0.0) || !(d[k] > 0.0)) throw Error(Errc::NonPositiveSpacing, "spacings must be positive");
    const double r = std::sqrt(d[k - 1] + d[k]);
    Vector z = f_at_nodes[k - 1];
    for (auto& v : z) v *= r;
    Z.values.push_back(std::move(z));
  }
  return Z;
}

EquivalenceResidual equivalence_residual(const CoefficientModel& model, std::size_t count, const QuasiState& seed) {
  if (model.variant() != Variant::DeltaNodes) {
    throw Error(Errc::VariantUnsupported, std::string("equivalence_residual needs delta_nodes, got ") +
                                              variant_name(model.variant()));
  }
  const auto nodes = model.nodes();
  if (count < 2 || nodes.size() < count + 2) {
    throw Error(Errc::InvalidArgument, "equivalence_residual needs count >= 2 and count + 2 nodes (have " +
                                           std::to_string(nodes.size()) + ")");
  }
  const std::size_t n = model.order();
  if (seed.f.size() != n || seed.f1.size() != n) throw Error(Errc::ShapeMismatch, "seed state must have length n");

  std::vector<double> d(count + 2);
  std::vector<Matrix> H;
  H.reserve(count + 1);
  std::vector<Vector> f;
  f.reserve(count + 1);
  double prev = 0.0;
  QuasiState state = seed;
  for (std::size_t k = 1; k <= count + 2; ++k) {
    d[k - 1] = nodes[k - 1].x - prev;
    if (k <= count + 1) {
      H.push_back(nodes[k - 1].H);
      state = propagate(model, 0.0, state, prev, nodes[k - 1].x);
      f.push_back(state.f);
    }
    prev = nodes[k - 1].x;
  }

  const JacobiBlocks blocks = blocks_from_delta(d, H);
  const VecSeq Z = nodes_to_Z(f, d);
  EquivalenceResidual out{0.0, 0.0, 0};
  for (std::size_t k = 2; k <= count; ++k) {
    const double res = norm2(recurrence_apply(blocks, Z, k));
    // Size of the summands before the cancellation inside A_k.
    const double a_scale = (frobenius_norm(H[k - 1]) + (1.0 / d[k - 1] + 1.0 / d[k]) * std::sqrt(double(n))) /
                           (d[k - 1] + d[k]);
    const double scale = frobenius_norm(blocks.B(k)) * norm2(Z.at(k + 1)) + a_scale * norm2(Z.at(k)) +
                         frobenius_norm(blocks.B(k - 1)) * norm2(Z.at(k - 1));
    out.max_abs = std::max(out.max_abs, res);
    out.max_normalized = std::max(out.max_normalized, scale > 0.0 ? res / scale : res);
    ++out.equations;
  }
  return out;
}

CriterionReport l2_tail_report(const VecSeq& Z) {
  if (Z.values.empty()) throw Error(Errc::InvalidArgument, "l2_tail_report needs a nonempty sequence");
  std::vector<double> terms;
  terms.reserve(Z.size());
  for (const auto& z : Z.values) {
    const double r = norm2(z);
    terms.push_back(r * r);
  }
  CriterionReport report = make_report("l2_tail", std::move(terms));
  apply_convergence_policy(report);
  report.policy += "; DivergesProven is a trend certificate: the nonzero last-half terms do not decrease";
  if (report.verdict == SeriesVerdict::ConvergesBounded) return report;

  std::vector<double> tail;
  for (std::size_t k = report.terms.size() / 2; k < report.terms.size(); ++k)
    if (report.terms[k] > 0.0) tail.push_back(report.terms[k]);
  bool nondecreasing = tail.size() >= 2;
  for (std::size_t k = 0; k + 1 < tail.size(); ++k) nondecreasing = nondecreasing && tail[k + 1] >= tail[k];
  if (nondecreasing) {
    report.verdict = SeriesVerdict::DivergesProven;
    report.verdict_basis = "trend certificate: nonzero tail terms do not decrease (last " +
                           format_number(tail.back()) + ")";
    report.certificate = Certificate{"trend", tail.back()};
  }
  return report;
}

const char* classification_name(Classification c) noexcept {
  switch (c) {
    case Classification::LimitPoint: return "LimitPoint";
    case Classification::LimitCircle: return "LimitCircle";
    case Classification::NotLimitCircle: return "NotLimitCircle";
    case Classification::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

const char* side_name(VerdictSide s) noexcept {
  switch (s) {
    case VerdictSide::Continuous: return "Continuous";
    case VerdictSide::Discrete: return "Discrete";
    case VerdictSide::Both: return "Both";
  }
  return "Both";
}

Verdict classify(const Problem& problem, const ClassifyConfig& config) {
  if (config.horizon < 2) throw Error(Errc::InvalidArgument, "classify needs horizon >= 2");
  Collector out;
  run_continuous(problem, config, out);
  run_discrete(problem, config, out);

  if (out.limit_circle && (out.limit_point || out.not_limit_circle)) {
    throw Error(Errc::ConflictingEvidence, "certified limit-circle evidence contradicts " +
                                               std::string(out.limit_point ? "limit-point" : "not-limit-circle") +
                                               " evidence for '" + problem.name + "'");
  }
  Verdict& v = out.verdict;
  if (out.limit_circle) v.classification = Classification::LimitCircle;
  else if (out.limit_point) v.classification = Classification::LimitPoint;
  else if (out.not_limit_circle) v.classification = Classification::NotLimitCircle;
  else v.classification = Classification::Inconclusive;
  v.side = out.continuous && out.discrete ? VerdictSide::Both
           : out.discrete                 ? VerdictSide::Discrete
                                          : VerdictSide::Continuous;
  return std::move(out.verdict);
}

std::vector<GalleryEntry> gallery() {
  std::vector<GalleryEntry> out;

  {
    DeltaLattice lattice{1, SeqRule::constant(1.0), MatrixSeqRule::zero(1)};
    Problem p;
    p.name = "FreeLattice";
    p.model = std::make_shared<const CoefficientModel>(lattice.model(100));
    p.intervals = IntervalSeq::uniform(1.0, 100);
    p.lattice = lattice;
    ClassifyConfig config;
    config.policy.periodic_extension = true;
    out.push_back({"FreeLattice", "free-lattice", std::move(p), config, Classification::LimitPoint,
                   "d_k = 1, H_k = O: free operator; Carleman sum diverges, interval series bounded below"});
  }
  {
    DeltaLattice lattice{1, SeqRule::harmonic(), MatrixSeqRule::christ_stolz(1)};
    Problem p;
    p.name = "ChristStolz";
    p.model = std::make_shared<const CoefficientModel>(lattice.model(200));
    p.lattice = lattice;
    out.push_back({"ChristStolz", "christ-stolz", std::move(p), ClassifyConfig{}, Classification::LimitCircle,
                   "d_k = 1/k, H_k = -(2k+1)I (Christ-Stolz): A_k = O and every solution is square summable"});
  }
  {
    Problem p;
    p.name = "MonotoneSigma";
    p.sigma = SigmaProfile::linear(100.0, Matrix::identity(2));
    p.intervals = IntervalSeq::uniform(1.0, 100);
    ClassifyConfig config;
    config.policy.periodic_extension = true;
    out.push_back({"MonotoneSigma", "monotone-sigma", std::move(p), config, Classification::LimitPoint,
                   "sigma(x) = x I: sigma' = I >= O on unit intervals"});
  }
  {
    const std::size_t count = 50;
    const Matrix h = Matrix::from_rows({{-3.0, 1.0}, {1.0, -3.0}});
    std::vector<DeltaNode> nodes;
    for (std::size_t k = 0; k < count; ++k) nodes.push_back({2.0 * static_cast<double>(k) + 1.0, h});
    Problem p;
    p.name = "OffDiagonalDivergence";
    p.model = std::make_shared<const CoefficientModel>(
        CoefficientModel::delta_nodes(2, 2.0 * static_cast<double>(count), std::move(nodes)));
    p.intervals = IntervalSeq::uniform(2.0, count);
    ClassifyConfig config;
    config.policy.periodic_extension = true;
    out.push_back({"OffDiagonalDivergence", "off-diagonal-divergence", std::move(p), config,
                   Classification::NotLimitCircle,
                   "n = 2, length-2 intervals, H = [[-3,1],[1,-3]] at the midpoints: the diagonal channel "
                   "vanishes, the off-diagonal channel h_12 = 1 diverges"});
  }
  return out;
}

std::optional<GalleryEntry> gallery_entry(std::string_view key) {
  for (auto& e : gallery())
    if (e.name == key || e.slug == key) return std::move(e);
  return std::nullopt;
}

}  // namespace sldl

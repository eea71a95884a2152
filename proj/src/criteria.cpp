#include "sldl/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "sldl/errors.hpp"
#include "sldl/format.hpp"
#include "sldl/parallel.hpp"

namespace sldl {

namespace {

struct GaussRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre rule on [0, 1] by Newton iteration on P_order.
GaussRule gauss_legendre(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (z * p1 - p0) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = 0.5 * (1.0 - z);
    rule.weights[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

const GaussRule& gauss4() {
  static const GaussRule rule = gauss_legendre(4);
  return rule;
}

const GaussRule& gauss7() {
  static const GaussRule rule = gauss_legendre(7);
  return rule;
}

// Sub-cells of [a, b]: model pieces cut at the breakpoints, each split into
// `split` equal parts.
struct Cell {
  double lo;
  double hi;
  std::size_t piece;
};

std::vector<Cell> make_cells(const CoefficientModel& model, double a, double b, std::size_t split) {
  std::vector<Cell> cells;
  std::size_t index = model.piece_index(a);
  double cur = a;
  while (cur < b) {
    const double stop = std::min(model.piece_end(index), b);
    if (stop > cur) {
      const double h = (stop - cur) / static_cast<double>(split);
      for (std::size_t s = 0; s < split; ++s) {
        const double lo = cur + h * static_cast<double>(s);
        const double hi = s + 1 == split ? stop : lo + h;
        cells.push_back({lo, hi, index});
      }
    }
    cur = stop;
    ++index;
  }
  return cells;
}

bool step_form_on(const CoefficientModel& model, double a, double b) {
  const std::size_t first = model.piece_index(a);
  const std::size_t last = model.piece_index(b, Side::Left);
  for (std::size_t k = first; k <= last; ++k)
    if (!model.pieces()[k].step_form) return false;
  return true;
}

// T_a at the left end of every cell, T_a(a) = I.
std::vector<Matrix> cell_starts(const CoefficientModel& model, const std::vector<Cell>& cells,
                                const Matrix& initial) {
  std::vector<Matrix> starts;
  starts.reserve(cells.size());
  Matrix t = initial;
  for (const auto& cell : cells) {
    starts.push_back(t);
    t = piece_propagator(model.pieces()[cell.piece], 0.0, cell.hi - cell.lo) * t;
  }
  return starts;
}

BlockMatrix2n eval_in_cell(const CoefficientModel& model, const Cell& cell, const Matrix& start, double x) {
  return BlockMatrix2n::split(piece_propagator(model.pieces()[cell.piece], 0.0, x - cell.lo) * start);
}

void accumulate(std::vector<double>& acc, const Matrix& k, double weight) {
  const auto data = k.data();
  for (std::size_t e = 0; e < data.size(); ++e) acc[e] += weight * std::norm(data[e]);
}

KernelIntegrals integrate_cells(const CoefficientModel& model, const std::vector<Cell>& cells, const GaussRule& rule) {
  const std::size_t n = model.order();
  const std::size_t q = rule.nodes.size();
  const auto starts = cell_starts(model, cells, Matrix::identity(2 * n));

  // Standard points of every cell, reused by the rectangles.
  std::vector<std::vector<BlockMatrix2n>> points(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const double h = cells[c].hi - cells[c].lo;
    points[c].reserve(q);
    for (double xi : rule.nodes) points[c].push_back(eval_in_cell(model, cells[c], starts[c], cells[c].lo + h * xi));
  }

  std::vector<double> acc(n * n, 0.0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double hi = cells[i].hi - cells[i].lo;
    for (std::size_t j = 0; j < i; ++j) {
      const double hj = cells[j].hi - cells[j].lo;
      for (std::size_t p = 0; p < q; ++p)
        for (std::size_t r = 0; r < q; ++r)
          accumulate(acc, cauchy_kernel_from(points[i][p], points[j][r]),
                     rule.weights[p] * rule.weights[r] * hi * hj);
    }
    // Triangle t in [lo, x]: t = lo + (x - lo) eta, dt = (x - lo) d eta.
    for (std::size_t p = 0; p < q; ++p) {
      const double xi = rule.nodes[p];
      const double x = cells[i].lo + hi * xi;
      for (std::size_t r = 0; r < q; ++r) {
        const double t = cells[i].lo + (x - cells[i].lo) * rule.nodes[r];
        const BlockMatrix2n tt = eval_in_cell(model, cells[i], starts[i], t);
        accumulate(acc, cauchy_kernel_from(points[i][p], tt), rule.weights[p] * rule.weights[r] * hi * hi * xi);
      }
    }
  }
  return {n, std::move(acc)};
}

void check_interval(const CoefficientModel& model, double a, double b) {
  if (!(a <= b) || a < 0.0 || b > model.end()) {
    throw Error(Errc::InvalidArgument, "interval [" + std::to_string(a) + ", " + std::to_string(b) +
                                           "] must satisfy 0 <= a <= b <= X");
  }
}

void check_positive(double rho, double s) {
  if (!(rho > 0.0) || !(s > 0.0)) throw Error(Errc::InvalidArgument, "rho and s must be positive");
}

std::optional<double> window_floor(const std::vector<double>& terms, bool periodic) {
  if (!periodic || terms.empty()) return std::nullopt;
  return *std::min_element(terms.begin(), terms.end());
}

const char* kPeriodicBasis = "periodic extension of the supplied window (caller assertion)";

void check_channel(Channel channel, std::size_t n) {
  if (channel.i >= n || channel.j >= n) throw Error(Errc::IndexOutOfRange, "channel index exceeds matrix order");
}

void check_jump(const Matrix& h) {
  if (!is_hermitian(h, 1e-10) ||
      std::any_of(h.data().begin(), h.data().end(), [](Complex z) { return std::abs(z.imag()) > 1e-10; })) {
    throw Error(Errc::NonSymmetricJump, "jump matrices must be real symmetric");
  }
}

std::string channel_name(const char* base, Channel channel) {
  return std::string(base) + (channel.diagonal() ? "_diag" : "_offdiag");
}

}  // namespace

IntervalSeq::IntervalSeq(std::vector<Interval> intervals) : items_(std::move(intervals)) {
  double prev_end = 0.0;
  for (std::size_t k = 0; k < items_.size(); ++k) {
    const Interval& iv = items_[k];
    if (!std::isfinite(iv.a) || !std::isfinite(iv.b) || !(iv.a >= prev_end) || !(iv.a < iv.b)) {
      throw Error(Errc::InvalidArgument, "interval " + std::to_string(k) +
                                             " breaks 0 <= a_k < b_k <= a_{k+1}");
    }
    if (iv.c && !(*iv.c > iv.a && *iv.c < iv.b)) {
      throw Error(Errc::InvalidArgument, "marker of interval " + std::to_string(k) + " is not inside (a_k, b_k)");
    }
    prev_end = iv.b;
  }
}

IntervalSeq IntervalSeq::uniform(double length, std::size_t count, double start) {
  std::vector<Interval> items;
  items.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double a = start + length * static_cast<double>(k);
    const double b = start + length * static_cast<double>(k + 1);
    items.push_back({a, b, 0.5 * (a + b)});
  }
  return IntervalSeq(std::move(items));
}

IntervalSeq IntervalSeq::around_nodes(std::span<const double> nodes) {
  std::vector<Interval> items;
  if (nodes.size() < 2) return IntervalSeq{};
  items.reserve(nodes.size() - 1);
  double prev = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double dk = nodes[k] - prev;
    const double dnext = nodes[k + 1] - nodes[k];
    items.push_back({nodes[k] - 0.5 * dk, nodes[k] + 0.5 * dnext, nodes[k]});
    prev = nodes[k];
  }
  return IntervalSeq(std::move(items));
}

bool IntervalSeq::has_markers() const noexcept {
  return std::all_of(items_.begin(), items_.end(), [](const Interval& iv) { return iv.c.has_value(); });
}

double KernelIntegrals::total() const { return std::accumulate(values.begin(), values.end(), 0.0); }

KernelIntegrals kernel_integrals(const CoefficientModel& model, double a, double b) {
  check_interval(model, a, b);
  const std::size_t n = model.order();
  if (a == b) return {n, std::vector<double>(n * n, 0.0)};
  if (step_form_on(model, a, b)) return integrate_cells(model, make_cells(model, a, b, 1), gauss4());

  KernelIntegrals prev = integrate_cells(model, make_cells(model, a, b, 1), gauss7());
  for (std::size_t split = 2; split <= 256; split *= 2) {
    KernelIntegrals next = integrate_cells(model, make_cells(model, a, b, split), gauss7());
    const double change = std::abs(next.total() - prev.total());
    prev = std::move(next);
    if (change <= 1e-8 * std::abs(prev.total()) || prev.total() == 0.0) break;
  }
  return prev;
}

double t1_term(const CoefficientModel& model, double a, double b) {
  return std::sqrt(kernel_integrals(model, a, b).total());
}

double t1_term(const FundamentalPair& pair, double a, double b) {
  if (pair.lambda() != Complex{}) throw Error(Errc::InvalidArgument, "t1_term needs a lambda = 0 pair");
  if (!pair.in_span(a) || !pair.in_span(b)) throw Error(Errc::OffGrid, "interval outside the pair's sampled span");
  return t1_term(pair.model(), a, b);
}

CriterionReport t1_series(const CoefficientModel& model, const IntervalSeq& intervals, const SeriesPolicy& policy) {
  for (const auto& iv : intervals.items()) check_interval(model, iv.a, iv.b);
  std::vector<double> terms(intervals.size());
  parallel_for(terms.size(), [&](std::size_t k) { terms[k] = t1_term(model, intervals[k].a, intervals[k].b); });
  // One constant-coefficient piece: the kernel is translation invariant, so
  // congruent intervals give equal terms however far the model continues.
  bool congruent = model.pieces().size() == 1 && !intervals.empty();
  for (const auto& iv : intervals.items()) {
    const double len0 = intervals[0].b - intervals[0].a;
    congruent = congruent && std::abs((iv.b - iv.a) - len0) <= 1e-12 * len0;
  }
  std::optional<double> floor;
  std::string basis = kPeriodicBasis;
  if (congruent) {
    floor = *std::min_element(terms.begin(), terms.end());
    basis = "constant coefficients on congruent intervals";
  } else {
    floor = window_floor(terms, policy.periodic_extension);
  }
  CriterionReport report = make_report("t1", std::move(terms));
  apply_divergence_policy(report, policy, floor, basis);
  return report;
}

Ineq78Margin ineq78_margin(const FundamentalPair& pair, double a, double b) {
  if (!pair.in_span(a) || !pair.in_span(b)) throw Error(Errc::OffGrid, "interval outside the pair's sampled span");
  if (!(a <= b)) throw Error(Errc::InvalidArgument, "ineq78_margin needs a <= b");
  if (a == b) return {0.0, 0.0};
  const CoefficientModel& model = pair.model();

  auto lhs_with = [&](std::size_t split, const GaussRule& rule) {
    const auto cells = make_cells(model, a, b, split);
    double acc = 0.0;
    for (const auto& cell : cells) {
      const Matrix start = pair.at(cell.lo).assemble();
      const double h = cell.hi - cell.lo;
      for (std::size_t p = 0; p < rule.nodes.size(); ++p) {
        const BlockMatrix2n t = eval_in_cell(model, cell, start, cell.lo + h * rule.nodes[p]);
        const double phi = frobenius_norm(t.b11);
        const double psi = frobenius_norm(t.b12);
        acc += rule.weights[p] * h * (phi * phi + psi * psi);
      }
    }
    return acc;
  };

  double lhs = 0.0;
  if (step_form_on(model, a, b) && pair.lambda() == Complex{}) {
    lhs = lhs_with(1, gauss4());
  } else {
    lhs = lhs_with(1, gauss7());
    for (std::size_t split = 2; split <= 256; split *= 2) {
      const double next = lhs_with(split, gauss7());
      const double change = std::abs(next - lhs);
      lhs = next;
      if (change <= 1e-10 * std::abs(lhs)) break;
    }
  }
  return {lhs, std::sqrt(2.0) * t1_term(pair, a, b)};
}

double lemma2_diag(double h_ii, double rho, double s) {
  check_positive(rho, s);
  const double rs = rho * s;
  const double sum = rho + s;
  return h_ii * h_ii / 9.0 * rs * rs * rs + h_ii / 3.0 * rs * rs * sum + sum * sum * sum * sum / 12.0;
}

double lemma2_offdiag(Complex h_ij, double rho, double s) {
  check_positive(rho, s);
  const double rs = rho * s;
  return std::norm(h_ij) / 9.0 * rs * rs * rs;
}

double lemma2_lower_bound(double h_ii, double rho, double s) {
  check_positive(rho, s);
  const double rs = rho * s;
  return rs * rs * (rho + s) * std::abs(h_ii + 1.5 * (1.0 / rho + 1.0 / s)) / (3.0 * std::sqrt(3.0));
}

CriterionReport t5_series(const IntervalSeq& intervals, std::span<const Matrix> jumps, Channel channel,
                          const SeriesPolicy& policy) {
  if (jumps.size() != intervals.size()) {
    throw Error(Errc::ShapeMismatch, "t5 needs one jump per interval (" + std::to_string(intervals.size()) +
                                         " intervals, " + std::to_string(jumps.size()) + " jumps)");
  }
  if (!intervals.has_markers()) throw Error(Errc::InvalidArgument, "t5 needs a marker c_k in every interval");
  std::vector<double> terms;
  terms.reserve(jumps.size());
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    check_jump(jumps[k]);
    check_channel(channel, jumps[k].order());
    const double rho = intervals[k].rho();
    const double s = intervals[k].s();
    const double h = jumps[k](channel.i, channel.j).real();
    if (channel.diagonal()) {
      terms.push_back(rho * s * std::sqrt(rho + s) * std::sqrt(std::abs(h + 1.5 * (1.0 / rho + 1.0 / s))));
    } else {
      terms.push_back(std::pow(rho * s, 1.5) * std::abs(h));
    }
  }
  const auto floor = window_floor(terms, policy.periodic_extension);
  CriterionReport report = make_report(channel_name("t5", channel), std::move(terms));
  apply_divergence_policy(report, policy, floor, kPeriodicBasis);
  return report;
}

CriterionReport cor1_series(std::span<const double> lengths, std::span<const Matrix> jumps, Channel channel,
                            const SeriesPolicy& policy) {
  if (jumps.size() != lengths.size()) throw Error(Errc::ShapeMismatch, "cor1 needs one jump per interval length");
  std::vector<double> terms;
  terms.reserve(jumps.size());
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    check_jump(jumps[k]);
    check_channel(channel, jumps[k].order());
    const double rho = lengths[k];
    if (!(rho > 0.0)) throw Error(Errc::InvalidArgument, "interval lengths must be positive");
    const double h = jumps[k](channel.i, channel.j).real();
    terms.push_back(channel.diagonal() ? std::pow(rho, 2.5) * std::sqrt(std::abs(h + 6.0 / rho))
                                       : rho * rho * rho * std::abs(h));
  }
  const auto floor = window_floor(terms, policy.periodic_extension);
  CriterionReport report = make_report(channel_name("cor1", channel), std::move(terms));
  apply_divergence_policy(report, policy, floor, kPeriodicBasis);
  return report;
}

CriterionReport cor2_series(const SeqRule& d, const MatrixSeqRule& H, std::size_t count, Channel channel,
                            const SeriesPolicy& policy) {
  check_channel(channel, H.order());
  std::vector<double> terms;
  terms.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    const double dk = d.value(k);
    const double dn = d.value(k + 1);
    if (!(dk > 0.0) || !(dn > 0.0)) throw Error(Errc::NonPositiveSpacing, "spacings d_k must be positive");
    const Matrix hk = H.value(k);
    check_jump(hk);
    const double h = hk(channel.i, channel.j).real();
    if (channel.diagonal()) {
      const double r = std::sqrt(dk + dn);
      terms.push_back(dk * dn * r * std::sqrt(std::abs(h + 1.5 * (d.reciprocal(k) + d.reciprocal(k + 1)))));
    } else {
      terms.push_back(std::pow(dk * dn, 1.5) * std::abs(h));
    }
  }
  std::optional<double> floor;
  std::string basis;
  if (d.eventually_periodic() && H.eventually_periodic() && count >= joint_period(d, H) && !terms.empty()) {
    floor = *std::min_element(terms.begin(), terms.end());
    basis = "periodic spacing and jump rules (" + d.describe() + ", " + H.describe() + ")";
  } else {
    floor = window_floor(terms, policy.periodic_extension);
    basis = floor ? kPeriodicBasis : "spacing rule " + d.describe() + " gives no periodic floor";
  }
  CriterionReport report = make_report(channel_name("cor2", channel), std::move(terms));
  apply_divergence_policy(report, policy, floor, basis);
  return report;
}

std::optional<std::vector<Matrix>> jumps_at_markers(const CoefficientModel& model, const IntervalSeq& intervals) {
  if (model.variant() != Variant::StepSigma && model.variant() != Variant::DeltaNodes) return std::nullopt;
  if (!intervals.has_markers()) return std::nullopt;
  const auto sigma = model.sigma_values();
  std::vector<Matrix> jumps;
  jumps.reserve(intervals.size());
  for (const auto& iv : intervals.items()) {
    if (iv.b > model.end()) return std::nullopt;
    const std::size_t first = model.piece_index(iv.a);
    const std::size_t last = model.piece_index(iv.b, Side::Left);
    if (first == last) {
      jumps.push_back(Matrix(model.order()));
    } else if (last == first + 1 && model.pieces()[last].start == *iv.c) {
      jumps.push_back(sigma[last] - sigma[first]);
    } else {
      return std::nullopt;
    }
  }
  return jumps;
}

SigmaProfile::SigmaProfile(double X, std::vector<double> breakpoints, std::vector<Matrix> values,
                           std::vector<Matrix> slopes)
    : X_(X), values_(std::move(values)), slopes_(std::move(slopes)) {
  if (!(X > 0.0) || !std::isfinite(X)) throw Error(Errc::InvalidArgument, "X must be positive");
  double prev = 0.0;
  for (double x : breakpoints) {
    if (!(x > prev) || !(x < X)) throw Error(Errc::InvalidArgument, "sigma breakpoints must increase inside (0, X)");
    prev = x;
  }
  if (values_.size() != breakpoints.size() + 1 || slopes_.size() != breakpoints.size() + 1) {
    throw Error(Errc::ShapeMismatch, "sigma profile needs one value and one slope per piece");
  }
  const std::size_t n = slopes_.front().order();
  for (std::size_t k = 0; k < slopes_.size(); ++k) {
    if (values_[k].order() != n || slopes_[k].order() != n) throw Error(Errc::ShapeMismatch, "sigma orders differ");
    check_jump(values_[k]);
    check_jump(slopes_[k]);
  }
  starts_.push_back(0.0);
  starts_.insert(starts_.end(), breakpoints.begin(), breakpoints.end());
}

SigmaProfile SigmaProfile::linear(double X, Matrix slope) {
  const std::size_t n = slope.order();
  return SigmaProfile(X, {}, {Matrix(n)}, {std::move(slope)});
}

std::vector<std::size_t> SigmaProfile::pieces_overlapping(double a, double b) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < starts_.size(); ++k) {
    const double end = k + 1 < starts_.size() ? starts_[k + 1] : X_;
    if (starts_[k] < b && end > a) out.push_back(k);
  }
  return out;
}

T2Result t2_predicate(const SigmaProfile& sigma, const IntervalSeq& intervals, const SeriesPolicy& policy) {
  bool ok = true;
  std::vector<double> terms;
  terms.reserve(intervals.size());
  for (const auto& iv : intervals.items()) {
    if (iv.b > sigma.end()) throw Error(Errc::InvalidArgument, "interval extends beyond the sigma profile");
    for (std::size_t k : sigma.pieces_overlapping(iv.a, iv.b)) {
      if (!is_psd(sigma.slopes()[k], 1e-10)) ok = false;
    }
    terms.push_back((iv.b - iv.a) * (iv.b - iv.a));
  }
  const auto floor = window_floor(terms, policy.periodic_extension);
  CriterionReport report = make_report("t2", std::move(terms));
  apply_divergence_policy(report, policy, floor, kPeriodicBasis);
  report.verdict_basis += ok ? "; sigma' >= O on every interval" : "; sigma' is not PSD on some interval";
  return {ok, std::move(report)};
}

T2Result t2_predicate(const CoefficientModel& model, const IntervalSeq& intervals, const SeriesPolicy& policy) {
  if (model.variant() != Variant::StepSigma && model.variant() != Variant::DeltaNodes) {
    throw Error(Errc::VariantUnsupported, std::string("t2 needs a sigma model, got ") + variant_name(model.variant()));
  }
  const auto sigma = model.sigma_values();
  for (const auto& iv : intervals.items()) {
    if (iv.b > model.end()) throw Error(Errc::InvalidArgument, "interval extends beyond X");
    const std::size_t first = model.piece_index(iv.a);
    const std::size_t last = model.piece_index(iv.b, Side::Left);
    for (std::size_t k = first + 1; k <= last; ++k) {
      if (!(sigma[k] == sigma[k - 1])) {
        throw Error(Errc::VariantUnsupported, "sigma jumps inside (" + format_number(iv.a) + ", " +
                                                  format_number(iv.b) + "): sigma' is not a function there");
      }
    }
  }
  // Between jumps sigma' = O.
  const std::size_t n = model.order();
  const auto bps = model.breakpoints();
  std::vector<Matrix> slopes(sigma.size(), Matrix(n));
  SigmaProfile profile(model.end(), bps, std::vector<Matrix>(sigma.begin(), sigma.end()), std::move(slopes));
  return t2_predicate(profile, intervals, policy);
}

}  // namespace sldl

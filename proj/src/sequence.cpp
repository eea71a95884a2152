#include "sldl/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "sldl/errors.hpp"
#include "sldl/format.hpp"

namespace sldl {

namespace {

double parse_double(std::string_view token, std::string_view context) {
  std::string s(token);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw Error(Errc::ConfigInvalid, "bad number '" + s + "' in '" + std::string(context) + "'");
  }
  return v;
}

std::vector<double> parse_list(std::string_view body, std::string_view context) {
  std::vector<double> out;
  while (!body.empty()) {
    const auto comma = body.find(',');
    out.push_back(parse_double(body.substr(0, comma), context));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  if (out.empty()) throw Error(Errc::ConfigInvalid, "empty list in '" + std::string(context) + "'");
  return out;
}

std::size_t lcm_period(std::size_t a, std::size_t b) { return std::lcm(a, b); }

}  // namespace

SeqRule::SeqRule(Kind kind, double c, double p, std::vector<double> values)
    : kind_(kind), c_(c), p_(p), values_(std::move(values)) {}

SeqRule SeqRule::constant(double c) {
  if (!std::isfinite(c)) throw Error(Errc::InvalidArgument, "constant must be finite");
  return SeqRule(Kind::Const, c, 0.0, {});
}

SeqRule SeqRule::power(double c, double p) {
  if (!std::isfinite(c) || !std::isfinite(p)) throw Error(Errc::InvalidArgument, "power rule must be finite");
  return SeqRule(Kind::Power, c, p, {});
}

SeqRule SeqRule::periodic(std::vector<double> period) {
  if (period.empty()) throw Error(Errc::InvalidArgument, "periodic rule needs at least one value");
  return SeqRule(Kind::Periodic, 0.0, 0.0, std::move(period));
}

SeqRule SeqRule::explicit_values(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::InvalidArgument, "explicit rule needs at least one value");
  return SeqRule(Kind::Explicit, 0.0, 0.0, std::move(values));
}

SeqRule SeqRule::parse(std::string_view text) {
  if (text == "harmonic") return harmonic();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(Errc::ConfigInvalid, "unknown sequence shorthand '" + std::string(text) + "'");
  }
  const std::string_view head = text.substr(0, colon);
  const std::string_view body = text.substr(colon + 1);
  if (head == "const") return constant(parse_double(body, text));
  if (head == "power") {
    const auto second = body.find(':');
    if (second == std::string_view::npos) return power(1.0, parse_double(body, text));
    return power(parse_double(body.substr(0, second), text), parse_double(body.substr(second + 1), text));
  }
  if (head == "periodic") return periodic(parse_list(body, text));
  if (head == "list") return explicit_values(parse_list(body, text));
  throw Error(Errc::ConfigInvalid, "unknown sequence shorthand '" + std::string(text) + "'");
}

double SeqRule::value(std::size_t k) const {
  if (k == 0) throw Error(Errc::IndexOutOfRange, "sequence rules are indexed from 1");
  switch (kind_) {
    case Kind::Const: return c_;
    case Kind::Power: return c_ * std::pow(static_cast<double>(k), p_);
    case Kind::Periodic: return values_[(k - 1) % values_.size()];
    case Kind::Explicit:
      if (k > values_.size()) {
        throw Error(Errc::IndexOutOfRange, "explicit sequence has only " + std::to_string(values_.size()) +
                                               " values, index " + std::to_string(k) + " requested");
      }
      return values_[k - 1];
  }
  return 0.0;
}

double SeqRule::reciprocal(std::size_t k) const {
  if (kind_ == Kind::Power) {
    if (k == 0) throw Error(Errc::IndexOutOfRange, "sequence rules are indexed from 1");
    return std::pow(static_cast<double>(k), -p_) / c_;
  }
  return 1.0 / value(k);
}

std::optional<std::size_t> SeqRule::length() const {
  if (kind_ == Kind::Explicit) return values_.size();
  return std::nullopt;
}

std::size_t SeqRule::period() const noexcept {
  if (kind_ == Kind::Periodic) return values_.size();
  return 1;
}

std::optional<double> SeqRule::exponent() const noexcept {
  if (kind_ == Kind::Const) return 0.0;
  if (kind_ == Kind::Power) return p_;
  return std::nullopt;
}

bool SeqRule::all_positive() const noexcept {
  switch (kind_) {
    case Kind::Const:
    case Kind::Power: return c_ > 0.0;
    case Kind::Periodic:
    case Kind::Explicit:
      return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
  }
  return false;
}

std::string SeqRule::describe() const {
  switch (kind_) {
    case Kind::Const: return "const:" + format_number(c_);
    case Kind::Power:
      if (c_ == 1.0 && p_ == -1.0) return "harmonic";
      return "power:" + format_number(c_) + ":" + format_number(p_);
    case Kind::Periodic:
    case Kind::Explicit: {
      std::string out = kind_ == Kind::Periodic ? "periodic:" : "list:";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) out += ',';
        out += format_number(values_[i]);
      }
      return out;
    }
  }
  return {};
}

std::vector<double> SeqRule::take(std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t k = 1; k <= count; ++k) out[k - 1] = value(k);
  return out;
}

std::vector<double> SeqRule::take_reciprocal(std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t k = 1; k <= count; ++k) out[k - 1] = reciprocal(k);
  return out;
}

MatrixSeqRule::MatrixSeqRule(Kind kind, std::vector<Matrix> values) : kind_(kind), values_(std::move(values)) {
  if (values_.empty()) throw Error(Errc::InvalidArgument, "matrix sequence rule needs at least one matrix");
  const std::size_t n = values_.front().order();
  for (const auto& m : values_) {
    if (m.order() != n) throw Error(Errc::ShapeMismatch, "matrix sequence mixes orders");
  }
}

MatrixSeqRule MatrixSeqRule::constant(Matrix m) { return MatrixSeqRule(Kind::Const, {std::move(m)}); }

MatrixSeqRule MatrixSeqRule::affine(Matrix base, Matrix slope) {
  return MatrixSeqRule(Kind::Affine, {std::move(base), std::move(slope)});
}

MatrixSeqRule MatrixSeqRule::periodic(std::vector<Matrix> period) {
  return MatrixSeqRule(Kind::Periodic, std::move(period));
}

MatrixSeqRule MatrixSeqRule::explicit_values(std::vector<Matrix> values) {
  return MatrixSeqRule(Kind::Explicit, std::move(values));
}

MatrixSeqRule MatrixSeqRule::christ_stolz(std::size_t n) {
  return affine(Matrix::scalar(n, -1.0), Matrix::scalar(n, -2.0));
}

Matrix MatrixSeqRule::value(std::size_t k) const {
  if (k == 0) throw Error(Errc::IndexOutOfRange, "sequence rules are indexed from 1");
  switch (kind_) {
    case Kind::Const: return values_.front();
    case Kind::Affine: return values_[0] + static_cast<double>(k) * values_[1];
    case Kind::Periodic: return values_[(k - 1) % values_.size()];
    case Kind::Explicit:
      if (k > values_.size()) {
        throw Error(Errc::IndexOutOfRange, "explicit matrix sequence has only " +
                                               std::to_string(values_.size()) + " values, index " +
                                               std::to_string(k) + " requested");
      }
      return values_[k - 1];
  }
  return values_.front();
}

std::optional<std::size_t> MatrixSeqRule::length() const {
  if (kind_ == Kind::Explicit) return values_.size();
  return std::nullopt;
}

std::size_t MatrixSeqRule::period() const noexcept {
  return kind_ == Kind::Periodic ? values_.size() : 1;
}

std::string MatrixSeqRule::describe() const {
  switch (kind_) {
    case Kind::Const: return values_.front().is_zero() ? "zero" : "const";
    case Kind::Affine: return "affine";
    case Kind::Periodic: return "periodic(" + std::to_string(values_.size()) + ")";
    case Kind::Explicit: return "list(" + std::to_string(values_.size()) + ")";
  }
  return {};
}

std::vector<Matrix> MatrixSeqRule::take(std::size_t count) const {
  std::vector<Matrix> out;
  out.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) out.push_back(value(k));
  return out;
}

std::size_t joint_period(const SeqRule& d, const MatrixSeqRule& h) { return lcm_period(d.period(), h.period()); }

}  // namespace sldl

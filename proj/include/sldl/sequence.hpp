#pragma once

// Rule-generated sequences indexed from k = 1. A rule describes an infinite
// family (constant, power law, periodic) or a finite explicit prefix; the
// rule kind is what divergence certificates are allowed to reason about.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sldl/matcore.hpp"

namespace sldl {

class SeqRule {
 public:
  enum class Kind { Const, Power, Periodic, Explicit };

  static SeqRule constant(double c);
  // c * k^p
  static SeqRule power(double c, double p);
  static SeqRule harmonic() { return power(1.0, -1.0); }
  static SeqRule periodic(std::vector<double> period);
  static SeqRule explicit_values(std::vector<double> values);

  // "const:c" | "harmonic" | "power:p" | "power:c:p" | "periodic:a,b,..." |
  // "list:a,b,..."; throws ConfigInvalid.
  static SeqRule parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  double value(std::size_t k) const;
  // 1/value(k), evaluated without the round trip through value(k) where the
  // rule allows it (harmonic: exactly k).
  double reciprocal(std::size_t k) const;
  // Finite length for explicit rules.
  std::optional<std::size_t> length() const;
  bool eventually_periodic() const noexcept { return kind_ == Kind::Const || kind_ == Kind::Periodic; }
  std::size_t period() const noexcept;
  // Power-law exponent for Const (0) and Power rules.
  std::optional<double> exponent() const noexcept;
  bool all_positive() const noexcept;
  std::string describe() const;

  std::vector<double> take(std::size_t count) const;
  std::vector<double> take_reciprocal(std::size_t count) const;

 private:
  SeqRule(Kind kind, double c, double p, std::vector<double> values);
  Kind kind_;
  double c_ = 0.0;
  double p_ = 0.0;
  std::vector<double> values_;
};

class MatrixSeqRule {
 public:
  enum class Kind { Const, Affine, Periodic, Explicit };

  static MatrixSeqRule constant(Matrix m);
  // base + k * slope
  static MatrixSeqRule affine(Matrix base, Matrix slope);
  static MatrixSeqRule periodic(std::vector<Matrix> period);
  static MatrixSeqRule explicit_values(std::vector<Matrix> values);
  static MatrixSeqRule zero(std::size_t n) { return constant(Matrix(n)); }
  // H_k = -(2k+1) I
  static MatrixSeqRule christ_stolz(std::size_t n);

  Kind kind() const noexcept { return kind_; }
  std::size_t order() const noexcept { return values_.front().order(); }
  Matrix value(std::size_t k) const;
  std::optional<std::size_t> length() const;
  bool eventually_periodic() const noexcept { return kind_ == Kind::Const || kind_ == Kind::Periodic; }
  std::size_t period() const noexcept;
  std::string describe() const;
  std::vector<Matrix> take(std::size_t count) const;

 private:
  MatrixSeqRule(Kind kind, std::vector<Matrix> values);
  Kind kind_;
  std::vector<Matrix> values_;
};

// Joint period of two eventually periodic rules.
std::size_t joint_period(const SeqRule& d, const MatrixSeqRule& h);

}  // namespace sldl

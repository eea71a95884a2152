#pragma once

#include <stdexcept>
#include <string>

namespace sldl {

enum class Errc {
  InvalidArgument,
  Singular,
  SingularP,
  OffGrid,
  VariantUnsupported,
  ShapeMismatch,
  IndexOutOfRange,
  NonSymmetricJump,
  NonPositiveSpacing,
  ConflictingEvidence,
  ConfigInvalid,
  IoFailure,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sldl

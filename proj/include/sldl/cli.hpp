#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sldl::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kGalleryMismatch = 1;
inline constexpr int kValidation = 2;
inline constexpr int kConflict = 3;
inline constexpr int kIo = 4;

// args excludes the program name. Reports go to `out` (or --output), errors
// to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sldl::cli

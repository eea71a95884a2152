#pragma once

// JSON in and out. Inputs are parsed with nlohmann::json; reports are
// written by dump() below so that numbers always print with 17 significant
// digits and the bytes depend only on the content.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sldl/bridge.hpp"
#include "sldl/criteria.hpp"
#include "sldl/jacobi.hpp"
#include "sldl/matcore.hpp"
#include "sldl/quasidiff.hpp"
#include "sldl/sequence.hpp"
#include "sldl/series.hpp"

namespace sldl {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "sldl/1";

// All parse_* functions throw Error(ConfigInvalid) on malformed input.

// Square array of rows; an entry is a number or [re, im].
Matrix parse_matrix(const Json& j);
// "zero" | "christ-stolz" | "const:c" (c I) | "affine:b:s" (b I + k s I), or
// JSON: [M, ...] (explicit), {"const": M}, {"affine": {"base": M, "slope": M}},
// {"periodic": [M, ...]}.
MatrixSeqRule parse_matrix_rule(const Json& j, std::size_t n);
MatrixSeqRule parse_matrix_rule_spec(std::string_view text, std::size_t n);
// A shorthand string or an array of numbers.
SeqRule parse_seq_rule(const Json& j);

// {"variant": "free" | "step_sigma" | "delta_nodes" | "general_triple" |
//  "distributional", "X": .., "n": .., ...}
CoefficientModel parse_model(const Json& j);
// {"X": .., "breakpoints": [..], "values": [M..], "slopes": [M..]} or
// {"X": .., "linear": M}.
SigmaProfile parse_sigma(const Json& j);
// {"n": .., "d": rule, "H": rule}
DeltaLattice parse_lattice(const Json& j);
// {"A": [M..], "B": [M..]}
JacobiBlocks parse_blocks(const Json& j);
// "unit:N" | "uniform:L:N" | "lattice:N" (around the first N nodes of the
// model, which must then be given) or [{"a":..,"b":..,"c":..}, ..].
IntervalSeq parse_intervals(const Json& j, const CoefficientModel* model = nullptr);
IntervalSeq parse_interval_spec(std::string_view text, const CoefficientModel* model = nullptr);
// {"name", "model", "sigma", "intervals", "lattice", "blocks"}
Problem parse_problem(const Json& j);

Json load_json_file(const std::string& path);  // IoFailure / ConfigInvalid

Json to_json(const Matrix& m);
Json to_json(const CriterionReport& report);
Json to_json(const Verdict& verdict);
Json to_json(const JacobiBlocks& blocks);
Json to_json(const VecSeq& u);

// Compact when indent < 0, otherwise pretty-printed. Non-finite numbers
// become null.
std::string dump(const Json& j, int indent = 2);

// Structural check of a report document against the published schema;
// returns the list of problems (empty when valid).
std::vector<std::string> validate_report(const Json& doc);

}  // namespace sldl

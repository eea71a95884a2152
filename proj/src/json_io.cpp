#include "sldl/json_io.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>

#include "sldl/errors.hpp"
#include "sldl/format.hpp"

namespace sldl {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::ConfigInvalid, what); }

const Json& req(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) invalid(std::string("missing field '") + key + "'");
  return j.at(key);
}

double as_number(const Json& j, const std::string& what) {
  if (!j.is_number()) invalid(what + " must be a number");
  return j.get<double>();
}

std::size_t as_count(const Json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) invalid(what + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

std::vector<double> as_numbers(const Json& j, const std::string& what) {
  if (!j.is_array()) invalid(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(as_number(v, what));
  return out;
}

std::vector<Matrix> as_matrices(const Json& j, const std::string& what) {
  if (!j.is_array()) invalid(what + " must be an array of matrices");
  std::vector<Matrix> out;
  for (const auto& m : j) out.push_back(parse_matrix(m));
  return out;
}

std::size_t parse_size(std::string_view s, std::string_view context) {
  std::size_t pos = 0;
  std::size_t v = 0;
  try {
    v = std::stoul(std::string(s), &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) invalid("bad count '" + std::string(s) + "' in '" + std::string(context) + "'");
  return v;
}

double parse_real(std::string_view s, std::string_view context) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(std::string(s), &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) invalid("bad number '" + std::string(s) + "' in '" + std::string(context) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto at = text.find(sep, start);
    parts.push_back(text.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) return parts;
    start = at + 1;
  }
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

void dump_string(std::string& out, const std::string& s) {
  out += Json(s).dump();
}

void dump_rec(std::string& out, const Json& j, int indent, int depth) {
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_string(out, it.key());
        out += pretty ? ": " : ":";
        dump_rec(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& v) { return v.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat && pretty ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        dump_rec(out, v, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_number(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

bool is_verdict_name(const std::string& s) {
  return s == "DivergesProven" || s == "ConvergesBounded" || s == "Inconclusive";
}

bool is_number_array(const Json& j) {
  return j.is_array() && std::all_of(j.begin(), j.end(), [](const Json& v) { return v.is_number() || v.is_null(); });
}

void check_report(const Json& r, const std::string& where, std::vector<std::string>& errors) {
  if (!r.is_object()) {
    errors.push_back(where + ": report is not an object");
    return;
  }
  for (const char* key : {"criterion", "verdict", "verdict_basis", "policy"}) {
    if (!r.contains(key) || !r.at(key).is_string()) errors.push_back(where + ": '" + key + "' must be a string");
  }
  for (const char* key : {"terms", "partial_sums"}) {
    if (!r.contains(key) || !is_number_array(r.at(key))) errors.push_back(where + ": '" + key + "' must be numbers");
  }
  if (r.contains("terms") && r.contains("partial_sums") && r.at("terms").size() != r.at("partial_sums").size()) {
    errors.push_back(where + ": terms and partial_sums differ in length");
  }
  if (r.contains("log_terms") && !is_number_array(r.at("log_terms"))) errors.push_back(where + ": bad log_terms");
  if (r.contains("verdict") && r.at("verdict").is_string() && !is_verdict_name(r.at("verdict").get<std::string>())) {
    errors.push_back(where + ": unknown verdict");
  }
  if (!r.contains("certificate")) {
    errors.push_back(where + ": missing certificate");
  } else if (const Json& c = r.at("certificate"); !c.is_null()) {
    if (!c.is_object() || !c.contains("kind") || !c.at("kind").is_string() || !c.contains("constant") ||
        !(c.at("constant").is_number() || c.at("constant").is_null())) {
      errors.push_back(where + ": malformed certificate");
    }
  }
}

}  // namespace

Matrix parse_matrix(const Json& j) {
  if (!j.is_array() || j.empty()) invalid("a matrix must be a nonempty array of rows");
  const std::size_t n = j.size();
  std::vector<Complex> entries;
  entries.reserve(n * n);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != n) invalid("matrix rows must have length " + std::to_string(n));
    for (const auto& v : row) {
      if (v.is_number()) {
        entries.emplace_back(v.get<double>(), 0.0);
      } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        entries.emplace_back(v[0].get<double>(), v[1].get<double>());
      } else {
        invalid("matrix entries must be numbers or [re, im]");
      }
    }
  }
  try {
    return Matrix(n, std::move(entries));
  } catch (const Error& e) {
    invalid(e.what());
  }
}

MatrixSeqRule parse_matrix_rule_spec(std::string_view text, std::size_t n) {
  if (n == 0) invalid("matrix order must be positive");
  if (!text.empty() && (text.front() == '[' || text.front() == '{')) {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const std::exception& e) {
      invalid(std::string("bad JSON matrix rule: ") + e.what());
    }
    return parse_matrix_rule(j, n);
  }
  if (text == "zero") return MatrixSeqRule::zero(n);
  if (text == "christ-stolz" || text == "christ_stolz") return MatrixSeqRule::christ_stolz(n);
  const auto parts = split(text, ':');
  if (parts.size() == 2 && parts[0] == "const") {
    return MatrixSeqRule::constant(Matrix::scalar(n, parse_real(parts[1], text)));
  }
  if (parts.size() == 3 && parts[0] == "affine") {
    return MatrixSeqRule::affine(Matrix::scalar(n, parse_real(parts[1], text)),
                                 Matrix::scalar(n, parse_real(parts[2], text)));
  }
  invalid("unknown matrix rule '" + std::string(text) + "'");
}

MatrixSeqRule parse_matrix_rule(const Json& j, std::size_t n) {
  if (j.is_string()) return parse_matrix_rule_spec(j.get<std::string>(), n);
  MatrixSeqRule rule = [&] {
    if (j.is_array()) return MatrixSeqRule::explicit_values(as_matrices(j, "H"));
    if (j.is_object() && j.contains("const")) return MatrixSeqRule::constant(parse_matrix(j.at("const")));
    if (j.is_object() && j.contains("affine")) {
      const Json& a = j.at("affine");
      return MatrixSeqRule::affine(parse_matrix(req(a, "base")), parse_matrix(req(a, "slope")));
    }
    if (j.is_object() && j.contains("periodic")) {
      return MatrixSeqRule::periodic(as_matrices(j.at("periodic"), "H periodic"));
    }
    invalid("unrecognized matrix rule");
  }();
  if (rule.order() != n) invalid("matrix rule has order " + std::to_string(rule.order()) + ", expected " +
                                 std::to_string(n));
  return rule;
}

SeqRule parse_seq_rule(const Json& j) {
  if (j.is_string()) return SeqRule::parse(j.get<std::string>());
  if (j.is_array()) return SeqRule::explicit_values(as_numbers(j, "d"));
  invalid("a spacing rule must be a shorthand string or an array");
}

CoefficientModel parse_model(const Json& j) {
  if (!j.is_object()) invalid("model must be an object");
  const std::string variant = req(j, "variant").is_string() ? j.at("variant").get<std::string>() : "";
  const double X = as_number(req(j, "X"), "X");
  auto breakpoints = [&] { return j.contains("breakpoints") ? as_numbers(j.at("breakpoints"), "breakpoints")
                                                             : std::vector<double>{}; };
  if (variant == "free") return CoefficientModel::free(as_count(req(j, "n"), "n"), X);
  if (variant == "step_sigma") return CoefficientModel::step_sigma(X, breakpoints(), as_matrices(req(j, "sigma"), "sigma"));
  if (variant == "delta_nodes") {
    std::vector<DeltaNode> nodes;
    const Json& list = req(j, "nodes");
    if (!list.is_array()) invalid("nodes must be an array");
    for (const auto& node : list) nodes.push_back({as_number(req(node, "x"), "node x"), parse_matrix(req(node, "H"))});
    return CoefficientModel::delta_nodes(as_count(req(j, "n"), "n"), X, std::move(nodes));
  }
  if (variant == "general_triple") {
    return CoefficientModel::general_triple(X, breakpoints(), as_matrices(req(j, "P"), "P"),
                                            as_matrices(req(j, "Q"), "Q"), as_matrices(req(j, "R"), "R"));
  }
  if (variant == "distributional") {
    return CoefficientModel::distributional(X, breakpoints(), as_matrices(req(j, "P0"), "P0"),
                                            as_matrices(req(j, "Q0"), "Q0"), as_matrices(req(j, "P1"), "P1"));
  }
  invalid("unknown model variant '" + variant + "'");
}

SigmaProfile parse_sigma(const Json& j) {
  const double X = as_number(req(j, "X"), "X");
  if (j.contains("linear")) return SigmaProfile::linear(X, parse_matrix(j.at("linear")));
  return SigmaProfile(X, j.contains("breakpoints") ? as_numbers(j.at("breakpoints"), "breakpoints") : std::vector<double>{},
                      as_matrices(req(j, "values"), "values"), as_matrices(req(j, "slopes"), "slopes"));
}

DeltaLattice parse_lattice(const Json& j) {
  const std::size_t n = as_count(req(j, "n"), "n");
  return DeltaLattice{n, parse_seq_rule(req(j, "d")), parse_matrix_rule(req(j, "H"), n)};
}

JacobiBlocks parse_blocks(const Json& j) {
  return JacobiBlocks(as_matrices(req(j, "A"), "A"), as_matrices(req(j, "B"), "B"));
}

IntervalSeq parse_interval_spec(std::string_view text, const CoefficientModel* model) {
  const auto parts = split(text, ':');
  if (parts.size() == 2 && parts[0] == "unit") return IntervalSeq::uniform(1.0, parse_size(parts[1], text));
  if (parts.size() == 3 && parts[0] == "uniform") {
    return IntervalSeq::uniform(parse_real(parts[1], text), parse_size(parts[2], text));
  }
  if (parts.size() == 2 && parts[0] == "lattice") {
    if (!model || model->nodes().empty()) invalid("'lattice:N' intervals need a delta_nodes model");
    const std::size_t count = parse_size(parts[1], text);
    if (count + 1 > model->nodes().size()) invalid("'lattice:N' needs N + 1 model nodes");
    std::vector<double> x;
    for (std::size_t k = 0; k <= count; ++k) x.push_back(model->nodes()[k].x);
    return IntervalSeq::around_nodes(x);
  }
  invalid("unknown interval shorthand '" + std::string(text) + "'");
}

IntervalSeq parse_intervals(const Json& j, const CoefficientModel* model) {
  if (j.is_string()) return parse_interval_spec(j.get<std::string>(), model);
  if (!j.is_array()) invalid("intervals must be a shorthand or an array");
  std::vector<Interval> items;
  for (const auto& iv : j) {
    Interval item{as_number(req(iv, "a"), "a"), as_number(req(iv, "b"), "b"), std::nullopt};
    if (iv.contains("c")) item.c = as_number(iv.at("c"), "c");
    items.push_back(item);
  }
  return IntervalSeq(std::move(items));
}

Problem parse_problem(const Json& j) {
  if (!j.is_object()) invalid("problem must be an object");
  static const char* known[] = {"name", "model", "sigma", "intervals", "lattice", "blocks"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known)) {
      invalid("unknown problem field '" + it.key() + "'");
    }
  }
  Problem p;
  p.name = j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>() : "problem";
  if (j.contains("model")) p.model = std::make_shared<const CoefficientModel>(parse_model(j.at("model")));
  if (j.contains("sigma")) p.sigma = parse_sigma(j.at("sigma"));
  if (j.contains("intervals")) p.intervals = parse_intervals(j.at("intervals"), p.model.get());
  if (j.contains("lattice")) p.lattice = parse_lattice(j.at("lattice"));
  if (j.contains("blocks")) p.blocks = parse_blocks(j.at("blocks"));
  if (!p.model && !p.sigma && !p.lattice && !p.blocks) invalid("problem needs a model, sigma, lattice or blocks");
  return p;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const std::exception& e) {
    invalid("'" + path + "' is not valid JSON: " + e.what());
  }
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  const std::size_t n = m.order();
  for (std::size_t i = 0; i < n; ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < n; ++k) {
      const Complex z = m(i, k);
      if (z.imag() == 0.0) row.push_back(number(z.real()));
      else row.push_back(Json::array({number(z.real()), number(z.imag())}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const CriterionReport& report) {
  Json j;
  j["criterion"] = report.criterion;
  j["terms"] = numbers(report.terms);
  j["partial_sums"] = numbers(report.partial_sums);
  if (!report.log_terms.empty()) j["log_terms"] = numbers(report.log_terms);
  j["verdict"] = verdict_name(report.verdict);
  j["verdict_basis"] = report.verdict_basis;
  j["policy"] = report.policy;
  if (report.certificate) {
    j["certificate"] = Json{{"kind", report.certificate->kind}, {"constant", number(report.certificate->constant)}};
  } else {
    j["certificate"] = nullptr;
  }
  return j;
}

Json to_json(const Verdict& verdict) {
  Json j;
  j["classification"] = classification_name(verdict.classification);
  Json evidence = Json::array();
  for (const auto& e : verdict.evidence) {
    evidence.push_back(Json{{"criterion", e.criterion}, {"verdict", verdict_name(e.verdict)}, {"basis", e.basis}});
  }
  j["evidence"] = std::move(evidence);
  j["side"] = side_name(verdict.side);
  return j;
}

Json to_json(const JacobiBlocks& blocks) {
  Json j;
  j["n"] = blocks.order();
  Json a = Json::array(), b = Json::array();
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    a.push_back(to_json(blocks.A(k)));
    b.push_back(to_json(blocks.B(k)));
  }
  j["A"] = std::move(a);
  j["B"] = std::move(b);
  if (const auto& prov = blocks.provenance()) {
    Json p;
    p["d"] = numbers(prov->d);
    if (prov->d_rule) p["d_rule"] = prov->d_rule->describe();
    p["boundary"] = prov->default_boundary ? "A_0 = O, B_0 = -I (default)" : "caller supplied";
    j["provenance"] = std::move(p);
  }
  return j;
}

Json to_json(const VecSeq& u) {
  Json j;
  j["offset"] = u.offset;
  Json values = Json::array();
  for (const auto& v : u.values) {
    Json row = Json::array();
    for (Complex z : v) {
      if (z.imag() == 0.0) row.push_back(number(z.real()));
      else row.push_back(Json::array({number(z.real()), number(z.imag())}));
    }
    values.push_back(std::move(row));
  }
  j["values"] = std::move(values);
  return j;
}

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_rec(out, j, indent, 0);
  if (indent >= 0) out += '\n';
  return out;
}

std::vector<std::string> validate_report(const Json& doc) {
  std::vector<std::string> errors;
  if (!doc.is_object()) return {"document is not an object"};
  if (!doc.contains("schema") || doc.at("schema") != kSchemaVersion) errors.push_back("schema must be 'sldl/1'");
  if (!doc.contains("command") || !doc.at("command").is_string()) errors.push_back("'command' must be a string");
  if (!doc.contains("reports") || !doc.at("reports").is_array()) {
    errors.push_back("'reports' must be an array");
  } else {
    for (std::size_t i = 0; i < doc.at("reports").size(); ++i) {
      check_report(doc.at("reports")[i], "reports[" + std::to_string(i) + "]", errors);
    }
  }
  if (doc.contains("verdict")) {
    const Json& v = doc.at("verdict");
    static const std::vector<std::string> classes = {"LimitPoint", "LimitCircle", "NotLimitCircle", "Inconclusive"};
    static const std::vector<std::string> sides = {"Continuous", "Discrete", "Both"};
    if (!v.is_object() || !v.contains("classification") || !v.at("classification").is_string() ||
        std::find(classes.begin(), classes.end(), v.at("classification").get<std::string>()) == classes.end()) {
      errors.push_back("verdict.classification invalid");
    }
    if (!v.is_object() || !v.contains("side") || !v.at("side").is_string() ||
        std::find(sides.begin(), sides.end(), v.at("side").get<std::string>()) == sides.end()) {
      errors.push_back("verdict.side invalid");
    }
    if (!v.is_object() || !v.contains("evidence") || !v.at("evidence").is_array()) {
      errors.push_back("verdict.evidence must be an array");
    } else {
      for (const auto& e : v.at("evidence")) {
        if (!e.is_object() || !e.contains("criterion") || !e.contains("verdict") || !e.contains("basis") ||
            !e.at("verdict").is_string() || !is_verdict_name(e.at("verdict").get<std::string>())) {
          errors.push_back("malformed evidence entry");
        }
      }
    }
  }
  return errors;
}

}  // namespace sldl

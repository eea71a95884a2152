#include "sldl/cli.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "sldl/bridge.hpp"
#include "sldl/criteria.hpp"
#include "sldl/errors.hpp"
#include "sldl/format.hpp"
#include "sldl/jacobi.hpp"
#include "sldl/json_io.hpp"

namespace sldl::cli {

namespace {

const std::set<std::string> kCriteria = {"t1", "t5", "cor1", "cor2", "t2", "carleman", "t7", "cor3"};

struct Options {
  // shared
  std::string output;
  std::string format = "json";
  bool periodic_extension = false;
  std::optional<double> threshold;
  // problem inputs
  std::string model_path;
  std::string sigma_path;
  std::string blocks_path;
  std::string config_path;
  std::string gallery;
  std::string intervals;
  std::string jumps_path;
  std::string d_rule;
  std::string h_rule = "zero";
  std::size_t n = 1;
  std::size_t N = 0;
  std::size_t count = 50;
  std::string channel = "0,0";
  // recurrence / cauchy / t4
  std::string u0;
  std::string u1;
  std::size_t i = 0;
  std::size_t j = 0;
  std::string segments;
};

struct Document {
  std::string command;
  std::optional<std::string> problem;
  std::vector<CriterionReport> reports;
  std::optional<Verdict> verdict;
  Json result;
};

Json render(const Document& doc) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["command"] = doc.command;
  if (doc.problem) j["problem"] = *doc.problem;
  Json reports = Json::array();
  for (const auto& r : doc.reports) reports.push_back(to_json(r));
  j["reports"] = std::move(reports);
  if (doc.verdict) j["verdict"] = to_json(*doc.verdict);
  if (!doc.result.is_null()) j["result"] = doc.result;
  return j;
}

std::string render_text(const Document& doc) {
  std::ostringstream os;
  os << doc.command;
  if (doc.problem) os << " (" << *doc.problem << ")";
  os << "\n";
  for (const auto& r : doc.reports) {
    os << "  " << r.criterion << ": " << verdict_name(r.verdict) << ", " << r.terms.size() << " terms";
    if (!r.partial_sums.empty()) os << ", partial sum " << format_number(r.partial_sums.back());
    os << "\n    " << r.verdict_basis << "\n";
  }
  if (doc.verdict) {
    os << "classification: " << classification_name(doc.verdict->classification) << " ("
       << side_name(doc.verdict->side) << ")\n";
    for (const auto& e : doc.verdict->evidence) {
      os << "  " << e.criterion << ": " << verdict_name(e.verdict) << "\n";
    }
  }
  if (!doc.result.is_null()) os << "result: " << dump(doc.result, -1) << "\n";
  return os.str();
}

void emit(const Document& doc, const Options& opt, std::ostream& out) {
  const std::string text = opt.format == "text" ? render_text(doc) : dump(render(doc));
  if (opt.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opt.output, std::ios::binary);
  if (!file || !(file << text)) throw Error(Errc::IoFailure, "cannot write '" + opt.output + "'");
}

SeriesPolicy policy_of(const Options& opt) { return {opt.periodic_extension, opt.threshold}; }

CoefficientModel load_model(const Options& opt) {
  if (opt.model_path.empty()) throw Error(Errc::ConfigInvalid, "--model is required");
  return parse_model(load_json_file(opt.model_path));
}

IntervalSeq load_intervals(const Options& opt, const CoefficientModel* model) {
  if (opt.intervals.empty()) throw Error(Errc::ConfigInvalid, "--intervals is required");
  if (opt.intervals.front() == '[') return parse_intervals(Json::parse(opt.intervals), model);
  if (opt.intervals.find(':') == std::string::npos) return parse_intervals(load_json_file(opt.intervals), model);
  return parse_interval_spec(opt.intervals, model);
}

DeltaLattice load_lattice(const Options& opt) {
  if (opt.d_rule.empty()) throw Error(Errc::ConfigInvalid, "--d is required");
  return DeltaLattice{opt.n, SeqRule::parse(opt.d_rule), parse_matrix_rule_spec(opt.h_rule, opt.n)};
}

std::size_t horizon(const Options& opt, std::size_t fallback) { return opt.N == 0 ? fallback : opt.N; }

JacobiBlocks load_blocks(const Options& opt, std::size_t count) {
  if (!opt.blocks_path.empty()) return parse_blocks(load_json_file(opt.blocks_path));
  return load_lattice(opt).blocks(count);
}

Channel parse_channel(const std::string& text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("comma");
    return {std::stoul(text.substr(0, comma)), std::stoul(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw Error(Errc::ConfigInvalid, "--channel must look like 'i,j'");
  }
}

Vector parse_vector(const std::string& text, std::size_t n, const char* flag) {
  Vector v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      v.emplace_back(std::stod(item, &pos), 0.0);
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(Errc::ConfigInvalid, std::string(flag) + ": bad number '" + item + "'");
    }
  }
  if (v.size() != n) {
    throw Error(Errc::ConfigInvalid, std::string(flag) + " needs " + std::to_string(n) + " comma-separated numbers");
  }
  return v;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_segments(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        const std::size_t k = std::stoul(item);
        out.emplace_back(k, k);
      } else {
        out.emplace_back(std::stoul(item.substr(0, dash)), std::stoul(item.substr(dash + 1)));
      }
    } catch (const std::exception&) {
      throw Error(Errc::ConfigInvalid, "--segments must look like '1-3,4-8'");
    }
  }
  if (out.empty()) throw Error(Errc::ConfigInvalid, "--segments is required");
  return out;
}

std::string criterion_base(std::string name) {
  name = name.substr(0, name.find('['));
  for (const char* base : {"carleman", "cor1", "cor2", "cor3", "t1", "t2", "t5", "t7"}) {
    const std::string b = base;
    if (name == b || name.rfind(b + "_", 0) == 0) return b;
  }
  return name;
}

Document classify_document(const Problem& problem, const ClassifyConfig& config, const std::vector<std::string>& only) {
  Document doc{"classify", problem.name, {}, classify(problem, config), nullptr};
  for (const auto& r : doc.verdict->reports) {
    if (only.empty() || std::find(only.begin(), only.end(), criterion_base(r.criterion)) != only.end()) {
      doc.reports.push_back(r);
    }
  }
  return doc;
}

Document cmd_classify(Options& opt) {
  if (!opt.gallery.empty()) {
    auto entry = gallery_entry(opt.gallery);
    if (!entry) throw Error(Errc::ConfigInvalid, "unknown gallery entry '" + opt.gallery + "'");
    ClassifyConfig config = entry->config;
    if (opt.N) config.horizon = opt.N;
    if (opt.periodic_extension) config.policy.periodic_extension = true;
    if (opt.threshold) config.policy.threshold = opt.threshold;
    return classify_document(entry->problem, config, {});
  }
  if (opt.config_path.empty()) throw Error(Errc::ConfigInvalid, "classify needs --gallery or --config");
  const Json cfg = load_json_file(opt.config_path);
  if (!cfg.is_object() || !cfg.contains("problem")) throw Error(Errc::ConfigInvalid, "config needs a 'problem'");
  Problem problem = parse_problem(cfg.at("problem"));
  if (cfg.contains("intervals")) problem.intervals = parse_intervals(cfg.at("intervals"), problem.model.get());
  ClassifyConfig config;
  std::vector<std::string> only;
  if (cfg.contains("criteria")) {
    if (!cfg.at("criteria").is_array()) throw Error(Errc::ConfigInvalid, "'criteria' must be an array");
    for (const auto& c : cfg.at("criteria")) {
      if (!c.is_string() || !kCriteria.count(c.get<std::string>())) {
        throw Error(Errc::ConfigInvalid, "unknown criterion " + c.dump());
      }
      only.push_back(c.get<std::string>());
    }
  }
  if (cfg.contains("N")) {
    if (!cfg.at("N").is_number_integer() || cfg.at("N").get<long long>() < 2) {
      throw Error(Errc::ConfigInvalid, "'N' must be an integer >= 2");
    }
    config.horizon = cfg.at("N").get<std::size_t>();
  }
  if (cfg.contains("policy")) {
    const Json& p = cfg.at("policy");
    if (p.contains("periodic_extension")) config.policy.periodic_extension = p.at("periodic_extension").get<bool>();
    if (p.contains("threshold")) config.policy.threshold = p.at("threshold").get<double>();
  }
  if (cfg.contains("output")) {
    const Json& o = cfg.at("output");
    if (o.contains("path") && opt.output.empty()) opt.output = o.at("path").get<std::string>();
    if (o.contains("format")) opt.format = o.at("format").get<std::string>();
    if (opt.format != "json" && opt.format != "text") throw Error(Errc::ConfigInvalid, "format must be json or text");
  }
  if (opt.N) config.horizon = opt.N;
  if (opt.periodic_extension) config.policy.periodic_extension = true;
  if (opt.threshold) config.policy.threshold = opt.threshold;
  return classify_document(problem, config, only);
}

Document cmd_criterion(const std::string& which, const Options& opt) {
  Document doc{"criterion " + which, std::nullopt, {}, std::nullopt, nullptr};
  const SeriesPolicy policy = policy_of(opt);
  if (which == "cor2") {
    const DeltaLattice lattice = load_lattice(opt);
    doc.reports.push_back(cor2_series(lattice.d, lattice.H, horizon(opt, 1000), parse_channel(opt.channel), policy));
    return doc;
  }
  if (which == "t2" && !opt.sigma_path.empty()) {
    const SigmaProfile sigma = parse_sigma(load_json_file(opt.sigma_path));
    T2Result t2 = t2_predicate(sigma, load_intervals(opt, nullptr), policy);
    doc.result = Json{{"hypothesis_ok", t2.hypothesis_ok}, {"limit_point", t2.limit_point()}};
    doc.reports.push_back(std::move(t2.series));
    return doc;
  }
  const CoefficientModel model = load_model(opt);
  const IntervalSeq intervals = load_intervals(opt, &model);
  if (which == "t1") {
    doc.reports.push_back(t1_series(model, intervals, policy));
  } else if (which == "t2") {
    T2Result t2 = t2_predicate(model, intervals, policy);
    doc.result = Json{{"hypothesis_ok", t2.hypothesis_ok}, {"limit_point", t2.limit_point()}};
    doc.reports.push_back(std::move(t2.series));
  } else {
    std::vector<Matrix> jumps;
    if (!opt.jumps_path.empty()) {
      const Json list = load_json_file(opt.jumps_path);
      if (!list.is_array()) throw Error(Errc::ConfigInvalid, "--jumps must hold an array of matrices");
      for (const auto& m : list) jumps.push_back(parse_matrix(m));
    } else {
      auto found = jumps_at_markers(model, intervals);
      if (!found) {
        throw Error(Errc::VariantUnsupported,
                    "the model has no single jump at each interval marker; pass --jumps explicitly");
      }
      jumps = std::move(*found);
    }
    const Channel channel = parse_channel(opt.channel);
    if (which == "t5") {
      doc.reports.push_back(t5_series(intervals, jumps, channel, policy));
    } else {
      std::vector<double> lengths;
      for (const auto& iv : intervals.items()) lengths.push_back(iv.b - iv.a);
      doc.reports.push_back(cor1_series(lengths, jumps, channel, policy));
    }
  }
  return doc;
}

Document cmd_jacobi(const std::string& which, const Options& opt) {
  Document doc{"jacobi " + which, std::nullopt, {}, std::nullopt, nullptr};
  if (which == "t7") {
    T7Result t7 = t7_check(load_lattice(opt), horizon(opt, 10000));
    for (auto* r : {&t7.a[0], &t7.a[1], &t7.b[0], &t7.b[1]}) doc.reports.push_back(std::move(*r));
    doc.result = Json{{"limit_circle_certified", t7.limit_circle_certified}};
    return doc;
  }
  if (which == "cor3") {
    Cor3Result c = corollary3_check(load_lattice(opt), horizon(opt, 10000));
    doc.reports.push_back(std::move(c.cond2));
    doc.reports.push_back(std::move(c.cond3));
    doc.result = Json{{"cond1", c.cond1}, {"limit_circle_certified", c.limit_circle_certified}};
    return doc;
  }
  if (which == "carleman") {
    const std::size_t N = horizon(opt, 1000);
    doc.reports.push_back(carleman_report(load_blocks(opt, N), N, policy_of(opt)));
    return doc;
  }
  if (which == "build") {
    doc.result = to_json(load_blocks(opt, horizon(opt, 10)));
    return doc;
  }
  if (which == "recurrence") {
    const std::size_t count = horizon(opt, 10);
    const JacobiBlocks blocks = load_blocks(opt, count);
    const std::size_t n = blocks.order();
    doc.result = to_json(solve_recurrence(blocks, parse_vector(opt.u0, n, "--u0"), parse_vector(opt.u1, n, "--u1"),
                                          count));
    return doc;
  }
  if (which == "cauchy") {
    const JacobiBlocks blocks = load_blocks(opt, std::max<std::size_t>(horizon(opt, 0), opt.i + 1));
    doc.result = Json{{"i", opt.i}, {"j", opt.j}, {"K", to_json(discrete_cauchy(blocks, opt.i, opt.j))}};
    return doc;
  }
  // t4
  const auto segments = parse_segments(opt.segments);
  std::size_t last = 0;
  for (const auto& s : segments) last = std::max(last, s.second);
  doc.reports.push_back(t4_series(load_blocks(opt, std::max(horizon(opt, 0), last + 1)), segments));
  return doc;
}

Document cmd_bridge(const std::string& which, const Options& opt) {
  Document doc{"bridge " + which, std::nullopt, {}, std::nullopt, nullptr};
  if (which == "residual") {
    const CoefficientModel model = opt.model_path.empty() ? load_lattice(opt).model(opt.count + 2) : load_model(opt);
    const std::size_t n = model.order();
    const QuasiState seed{parse_vector(opt.u0.empty() ? std::string("0") : opt.u0, n, "--u0"),
                          parse_vector(opt.u1.empty() ? std::string("1") : opt.u1, n, "--u1")};
    const EquivalenceResidual r = equivalence_residual(model, opt.count, seed);
    doc.result = Json{{"max_abs", r.max_abs}, {"max_normalized", r.max_normalized}, {"equations", r.equations}};
    return doc;
  }
  const std::size_t count = horizon(opt, opt.count);
  const JacobiBlocks blocks = load_blocks(opt, count);
  const std::size_t n = blocks.order();
  const VecSeq u = solve_recurrence(blocks, parse_vector(opt.u0, n, "--u0"), parse_vector(opt.u1, n, "--u1"), count);
  doc.reports.push_back(l2_tail_report(u));
  return doc;
}

int cmd_gallery(const std::string& which, const Options& opt, std::ostream& out) {
  Document doc{"gallery " + which, std::nullopt, {}, std::nullopt, nullptr};
  if (which == "list") {
    Json list = Json::array();
    for (const auto& e : gallery()) {
      list.push_back(Json{{"name", e.name}, {"slug", e.slug}, {"expected", classification_name(e.expected)},
                          {"note", e.note}});
    }
    doc.result = std::move(list);
    emit(doc, opt, out);
    return kOk;
  }
  std::vector<GalleryEntry> entries;
  if (opt.gallery.empty()) {
    entries = gallery();
  } else {
    auto e = gallery_entry(opt.gallery);
    if (!e) throw Error(Errc::ConfigInvalid, "unknown gallery entry '" + opt.gallery + "'");
    entries.push_back(std::move(*e));
    doc.problem = entries.front().name;
  }
  bool all = true;
  Json results = Json::array();
  for (const auto& e : entries) {
    Verdict v = classify(e.problem, e.config);
    const bool ok = v.classification == e.expected;
    all = all && ok;
    results.push_back(Json{{"name", e.name}, {"expected", classification_name(e.expected)},
                           {"classification", classification_name(v.classification)}, {"reproduced", ok}});
    doc.reports.insert(doc.reports.end(), v.reports.begin(), v.reports.end());
    if (entries.size() == 1) doc.verdict = std::move(v);
  }
  doc.result = Json{{"entries", std::move(results)}, {"all_reproduced", all}};
  emit(doc, opt, out);
  return all ? kOk : kGalleryMismatch;
}

void add_common(CLI::App* app, Options& opt) {
  app->add_option("-o,--output", opt.output, "write the report here instead of stdout");
  app->add_option("--format", opt.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  app->add_flag("--periodic-extension", opt.periodic_extension,
                "treat the supplied window as one period of periodically continued data");
  app->add_option("--threshold", opt.threshold, "threshold-mode partial sum for divergence");
}

void add_lattice(CLI::App* app, Options& opt) {
  app->add_option("--d", opt.d_rule, "spacing rule: const:c, harmonic, power:p, power:c:p, periodic:a,b, list:a,b");
  app->add_option("--H", opt.h_rule, "jump rule: zero, christ-stolz, const:c, affine:b:s or JSON");
  app->add_option("--n", opt.n, "matrix order")->check(CLI::PositiveNumber);
  app->add_option("--N", opt.N, "number of terms / blocks");
  app->add_option("--blocks", opt.blocks_path, "JSON file with {\"A\": [...], \"B\": [...]}");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Limit-point / limit-circle criteria for vector Sturm-Liouville operators with delta interactions",
               "sldl"};
  app.require_subcommand(1);
  Options opt;

  auto* classify_cmd = app.add_subcommand("classify", "run every applicable criterion and aggregate a verdict");
  add_common(classify_cmd, opt);
  classify_cmd->add_option("--gallery", opt.gallery, "gallery entry name or slug");
  classify_cmd->add_option("--config", opt.config_path, "run config JSON");
  classify_cmd->add_option("--N", opt.N, "discrete-side horizon");

  auto* criterion_cmd = app.add_subcommand("criterion", "evaluate one continuous-side series criterion");
  criterion_cmd->require_subcommand(1);
  for (const char* name : {"t1", "t5", "cor1", "cor2", "t2"}) {
    auto* sub = criterion_cmd->add_subcommand(name);
    add_common(sub, opt);
    sub->add_option("--model", opt.model_path, "coefficient model JSON");
    sub->add_option("--intervals", opt.intervals, "unit:N, uniform:L:N, lattice:N, a JSON array or a file");
    sub->add_option("--channel", opt.channel, "matrix entry i,j (0-based)");
    sub->add_option("--jumps", opt.jumps_path, "JSON array of jump matrices, one per interval");
    sub->add_option("--sigma", opt.sigma_path, "sigma profile JSON (t2)");
    add_lattice(sub, opt);
  }

  auto* jacobi_cmd = app.add_subcommand("jacobi", "block Jacobi matrices built from delta data");
  jacobi_cmd->require_subcommand(1);
  for (const char* name : {"build", "recurrence", "cauchy", "t4", "carleman", "t7", "cor3"}) {
    auto* sub = jacobi_cmd->add_subcommand(name);
    add_common(sub, opt);
    add_lattice(sub, opt);
    sub->add_option("--u0", opt.u0, "initial vector u_0, comma separated");
    sub->add_option("--u1", opt.u1, "initial vector u_1, comma separated");
    sub->add_option("--i", opt.i, "row index of K_ij");
    sub->add_option("--j", opt.j, "column index of K_ij");
    sub->add_option("--segments", opt.segments, "segments n-m, comma separated");
  }

  auto* bridge_cmd = app.add_subcommand("bridge", "continuous / discrete cross-checks");
  bridge_cmd->require_subcommand(1);
  for (const char* name : {"residual", "l2"}) {
    auto* sub = bridge_cmd->add_subcommand(name);
    add_common(sub, opt);
    add_lattice(sub, opt);
    sub->add_option("--model", opt.model_path, "delta_nodes model JSON");
    sub->add_option("--count", opt.count, "number of node equations / sequence length");
    sub->add_option("--u0", opt.u0, "residual: seed f(0); l2: u_0");
    sub->add_option("--u1", opt.u1, "residual: seed f^[1](0); l2: u_1");
  }

  auto* gallery_cmd = app.add_subcommand("gallery", "built-in examples");
  gallery_cmd->require_subcommand(1);
  auto* gallery_list = gallery_cmd->add_subcommand("list");
  add_common(gallery_list, opt);
  auto* gallery_run = gallery_cmd->add_subcommand("run");
  add_common(gallery_run, opt);
  gallery_run->add_option("name", opt.gallery, "entry name or slug (all when omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  auto chosen = [](CLI::App* parent) -> std::string {
    for (auto* sub : parent->get_subcommands()) return sub->get_name();
    return {};
  };

  try {
    if (classify_cmd->parsed()) {
      emit(cmd_classify(opt), opt, out);
    } else if (criterion_cmd->parsed()) {
      emit(cmd_criterion(chosen(criterion_cmd), opt), opt, out);
    } else if (jacobi_cmd->parsed()) {
      emit(cmd_jacobi(chosen(jacobi_cmd), opt), opt, out);
    } else if (bridge_cmd->parsed()) {
      emit(cmd_bridge(chosen(bridge_cmd), opt), opt, out);
    } else {
      return cmd_gallery(chosen(gallery_cmd), opt, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.code() == Errc::ConflictingEvidence) return kConflict;
    if (e.code() == Errc::IoFailure) return kIo;
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    err << "error: ConfigInvalid: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}

}  // namespace sldl::cli

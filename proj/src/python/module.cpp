#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "sldl/bridge.hpp"
#include "sldl/cli.hpp"
#include "sldl/criteria.hpp"
#include "sldl/errors.hpp"
#include "sldl/jacobi.hpp"
#include "sldl/json_io.hpp"

namespace py = pybind11;
using namespace sldl;

namespace {

// Structured results cross the boundary as JSON text; the Python package
// decodes them.
std::string text(const Json& j) { return dump(j, -1); }

DeltaLattice lattice(const std::string& d, const std::string& H, std::size_t n) {
  return DeltaLattice{n, SeqRule::parse(d), parse_matrix_rule_spec(H, n)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "vector Sturm-Liouville deficiency diagnostics";

  py::register_exception<Error>(m, "SldlError", PyExc_ValueError);

  m.def("lemma2_diag", &lemma2_diag, py::arg("h"), py::arg("rho"), py::arg("s"));
  m.def("lemma2_offdiag", [](double h, double rho, double s) { return lemma2_offdiag(h, rho, s); }, py::arg("h"),
        py::arg("rho"), py::arg("s"));
  m.def("lemma2_lower_bound", &lemma2_lower_bound, py::arg("h"), py::arg("rho"), py::arg("s"));

  m.def(
      "t1_series",
      [](const std::string& model_json, const std::string& intervals) {
        auto model = parse_model(Json::parse(model_json));
        IntervalSeq iv = intervals.starts_with("[") ? parse_intervals(Json::parse(intervals), &model)
                                                    : parse_interval_spec(intervals, &model);
        return text(to_json(t1_series(model, iv)));
      },
      py::arg("model_json"), py::arg("intervals"));

  m.def(
      "carleman",
      [](const std::string& d, const std::string& H, std::size_t n, std::size_t N) {
        return text(to_json(carleman_report(lattice(d, H, n).blocks(N + 1), N)));
      },
      py::arg("d"), py::arg("H"), py::arg("n"), py::arg("N"));

  m.def(
      "t7",
      [](const std::string& d, const std::string& H, std::size_t n, std::size_t N) {
        auto r = t7_check(lattice(d, H, n), N);
        Json j;
        j["limit_circle_certified"] = r.limit_circle_certified;
        j["a"] = Json::array({to_json(r.a[0]), to_json(r.a[1])});
        j["b"] = Json::array({to_json(r.b[0]), to_json(r.b[1])});
        return text(j);
      },
      py::arg("d"), py::arg("H"), py::arg("n"), py::arg("N"));

  m.def(
      "equivalence_residual",
      [](const std::string& d, const std::string& H, std::size_t n, std::size_t count, std::vector<double> f,
         std::vector<double> f1) {
        if (f.size() != n || f1.size() != n) throw Error(Errc::ShapeMismatch, "seed vectors must have length n");
        QuasiState seed{Vector(f.begin(), f.end()), Vector(f1.begin(), f1.end())};
        auto r = equivalence_residual(lattice(d, H, n).model(count + 2), count, seed);
        return std::make_tuple(r.max_abs, r.max_normalized, r.equations);
      },
      py::arg("d"), py::arg("H"), py::arg("n"), py::arg("count"), py::arg("f"), py::arg("f1"));

  m.def("gallery_names", [] {
    std::vector<std::string> out;
    for (const auto& e : gallery()) out.push_back(e.slug);
    return out;
  });

  m.def(
      "classify_gallery",
      [](const std::string& key) {
        auto e = gallery_entry(key);
        if (!e) throw Error(Errc::ConfigInvalid, "unknown gallery entry '" + key + "'");
        Verdict v;
        {
          py::gil_scoped_release release;
          v = classify(e->problem, e->config);
        }
        return text(to_json(v));
      },
      py::arg("key"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}

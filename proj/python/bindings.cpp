#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "yl/acceptance.hpp"
#include "yl/bundled.hpp"
#include "yl/errors.hpp"
#include "yl/lnumeric.hpp"
#include "yl/periods.hpp"
#include "yl/yoshida.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::object& o) {
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

yl::NewformRecord bundled_record(const std::string& name, long pmax) {
    if (name == "23a" || name == "23a#0") {
        auto [f, fs] = yl::load_level23_pair();
        return name == f.label ? f : fs;
    }
    if (name == "synth-f" || name == "synth-g") {
        auto [f, g] = yl::load_synthetic_pair();
        return name == "synth-f" ? f : g;
    }
    return yl::oracle_record(yl::load_oracle_spec(name), pmax);
}

yl::NewformRecord record(const py::object& o) { return yl::record_from_json(from_py(o)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Yoshida lift toolkit";
    static py::handle error = py::exception<yl::Error>(m, "Error", PyExc_RuntimeError).inc_ref();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const yl::Error& e) {
            PyErr_SetString(error.ptr(), (std::string(e.kind()) + ": " + e.what()).c_str());
        }
    });

    m.def("data_dir", &yl::data_dir);
    m.def("bundled_record", [](const std::string& name, long pmax) { return to_py(yl::record_to_json(bundled_record(name, pmax))); },
          py::arg("name"), py::arg("pmax") = 500);
    m.def("validate_record", [](const py::object& r) { yl::validate_record(record(r)); });
    m.def("eta_expansion",
          [](const std::vector<std::pair<long, long>>& spec, long M) {
              std::vector<std::string> out;
              for (const auto& c : yl::eta_oracle(spec, M).a) out.push_back(c.get_str());
              return out;
          },
          py::arg("spec"), py::arg("M"));
    m.def("elliptic_ap", &yl::elliptic_oracle, py::arg("curve"), py::arg("p"));
    m.def("check_conditions", [](const py::object& f, const py::object& g) { return to_py(yl::check_conditions(record(f), record(g)).to_json()); });
    m.def("build_lift", [](const py::object& f, const py::object& g) { return to_py(yl::lift_to_json(yl::build_lift(record(f), record(g)))); });
    m.def("ratio_identity_check", [](int k, bool odd) { return to_py(yl::ratio_identity_check(k, odd).to_json()); }, py::arg("k"),
          py::arg("odd"));
    m.def("detect_rational",
          [](const std::string& x, const std::string& eps, const std::string& height, const std::string& tol) -> py::object {
              yl::PrecisionScope ps(60);
              try {
                  auto a = yl::detect_algebraic(yl::Cx(yl::R(x)), yl::R(eps), yl::NumberField(), yl::Z(height), yl::R(tol));
                  return py::str(a.to_string());
              } catch (const yl::NotFound&) {
                  return py::none();
              }
          },
          py::arg("x"), py::arg("eps"), py::arg("height"), py::arg("tol"));
    m.def("criterion_ids", &yl::criterion_ids);
    m.def("run_criterion",
          [](const std::string& id, std::uint64_t seed, unsigned digits) {
              yl::AcceptanceOptions opt;
              opt.seed = seed;
              opt.digits = digits;
              return to_py(yl::run_criterion(id, opt).to_json());
          },
          py::arg("id"), py::arg("seed") = 20261016, py::arg("digits") = 30);
}

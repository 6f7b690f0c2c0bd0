#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include <json.hpp>

#include "maldist/cli.hpp"
#include "maldist/errors.hpp"
#include "maldist/submeasure.hpp"
#include "maldist/witness.hpp"

namespace py = pybind11;
using namespace maldist;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_maldist, m) {
  m.doc() = "Exact ideals, submeasures and maldistributed sequences";

  auto base = py::register_exception<Error>(m, "MaldistError");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());

  py::class_<SetExpr>(m, "Set")
      .def(py::init(&SetExpr::parse), py::arg("text"))
      .def("__contains__", [](const SetExpr& s, Natural n) { return s.contains(n); })
      .def("count_upto", [](const SetExpr& s, Natural n) { return s.canonical().count_upto(n); })
      .def("density", [](const SetExpr& s) { return s.canonical().density().get_str(); })
      .def("__str__", &SetExpr::to_string)
      .def("__repr__", [](const SetExpr& s) { return "Set(" + s.to_string() + ")"; });

  py::class_<Lscsm>(m, "Lscsm")
      .def(py::init(&Lscsm::parse), py::arg("text"))
      .def("__str__", &Lscsm::to_string);

  py::class_<GapFunction>(m, "Gap")
      .def(py::init(&GapFunction::parse), py::arg("text"))
      .def("__call__", &GapFunction::operator())
      .def("__str__", &GapFunction::to_string);

  py::class_<IntervalWitness>(m, "Witness")
      .def(py::init(&IntervalWitness::parse), py::arg("text"))
      .def("prefix",
           [](const IntervalWitness& w, Natural count) {
             std::vector<std::pair<Natural, Natural>> out;
             for (const Interval& iv : w.prefix(count)) out.emplace_back(iv.lo, iv.hi);
             return out;
           })
      .def("__str__", &IntervalWitness::to_string);

  m.def(
      "eval_phi",
      [](const Lscsm& phi, const SetExpr& s, Natural horizon) { return to_python(eval_phi(phi, s, horizon).to_json()); },
      py::arg("phi"), py::arg("set"), py::arg("horizon") = kDefaultHorizon);
  m.def("gap_to_intervals", &gap_to_intervals);
  m.def(
      "check_condition2",
      [](const GapFunction& g, const SetExpr& a, Natural horizon) {
        return to_python(check_condition2(g, a, horizon).to_json());
      },
      py::arg("gap"), py::arg("set"), py::arg("horizon"));
  m.def(
      "gap_from_lscsm",
      [](const Lscsm& phi, const std::string& alpha) { return gap_from_lscsm(phi, parse_rational(alpha)); },
      py::arg("phi"), py::arg("alpha"));
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args, const std::string& input) {
        std::ostringstream out, err;
        std::istringstream in(input);
        const int status = run_cli(args, out, err, in);
        return py::make_tuple(status, out.str(), err.str());
      },
      py::arg("args"), py::arg("input") = "");
}

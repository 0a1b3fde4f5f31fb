#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "raccess/analysis.hpp"
#include "raccess/cli.hpp"
#include "raccess/errors.hpp"

namespace py = pybind11;
using namespace raccess;

namespace {

// Exact values cross the boundary as strings ("3", "-1/4", "0.125").
std::vector<Rational> exact_vector(const std::vector<std::string>& xs) {
    std::vector<Rational> out;
    for (const auto& s : xs) out.push_back(parse_exact(s));
    return out;
}

std::map<std::string, Rational> exact_map(const std::map<std::string, std::string>& values) {
    std::map<std::string, Rational> out;
    for (const auto& [k, v] : values) out[k] = parse_exact(v);
    return out;
}

struct PySystem {
    SystemSpec spec;
    std::map<std::string, Rational> bindings;

    SystemModel model() const {
        SystemModel m = to_model(spec);
        return bindings.empty() ? m : m.bind(bindings);
    }
    NumericMap numeric() const {
        std::map<std::string, double> p;
        for (const auto& [k, v] : bindings) p[k] = v.get_d();
        return to_numeric_map(spec, p);
    }
};

std::vector<std::string> generators(const Ideal& i) {
    std::vector<std::string> out;
    for (const auto& g : i.basis()) out.push_back(factored_string(g));
    return out;
}

py::dict chain_dict(const ChainResult& r) {
    py::dict d;
    d["index"] = r.index ? py::cast(*r.index) : py::none();
    d["stabilized"] = r.status == ChainResult::Status::stabilized;
    d["certified"] = r.certified;
    py::list hist;
    for (const auto& st : r.history) {
        py::dict s;
        s["k"] = st.k;
        s["generators"] = generators(st.ideal);
        s["certified"] = st.certified;
        hist.append(s);
    }
    d["history"] = hist;
    return d;
}

py::list singular_points(const SingularSet& s) {
    py::list pts;
    for (const auto& p : s.points) {
        py::list coords;
        for (const auto& c : p) coords.append(c.exact ? py::cast(c.value.get_str()) : py::cast(c.approx()));
        pts.append(py::tuple(coords));
    }
    return pts;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Forward accessibility of rational discrete-time control systems";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);
    py::register_exception<PoleError>(m, "PoleError", PyExc_ArithmeticError);
    py::register_exception<DegeneracyError>(m, "DegeneracyError", PyExc_ArithmeticError);

    py::class_<PySystem>(m, "System")
        .def_static("from_text", [](const std::string& text) { return PySystem{parse_system(text), {}}; })
        .def_property_readonly("name", [](const PySystem& s) { return s.spec.name; })
        .def_property_readonly("params", [](const PySystem& s) { return s.spec.params; })
        .def_property_readonly("states", [](const PySystem& s) { return s.spec.states; })
        .def_property_readonly("inputs", [](const PySystem& s) { return s.spec.inputs; })
        .def_property_readonly("numeric", [](const PySystem& s) { return s.spec.numeric; })
        .def("to_text", [](const PySystem& s) { return print_system(s.spec); })
        .def("bind", [](const PySystem& s, const std::map<std::string, std::string>& values) {
            PySystem out = s;
            for (const auto& [k, v] : exact_map(values)) out.bindings[k] = v;
            return out;
        });

    m.def("generically_accessible", [](const PySystem& s) { return generic_accessibility(s.model()); });
    m.def("submersive", [](const PySystem& s) { return submersivity_check(s.model()); });

    m.def(
        "analyze",
        [](const PySystem& s, int max_k, bool exact_radical, bool confirm) {
            AnalysisOptions opt;
            opt.max_k = max_k;
            opt.exact_radical = exact_radical;
            opt.confirm = confirm;
            AnalysisReport rep;
            {
                py::gil_scoped_release release;
                rep = analyze(s.model(), opt);
            }
            py::dict d;
            d["submersive"] = rep.submersive;
            d["generically_accessible"] = rep.generically_accessible;
            d["kappa"] = chain_dict(rep.kappa);
            d["r_star"] = rep.r_star ? py::object(chain_dict(*rep.r_star)) : py::none();
            d["singular_points"] = singular_points(rep.singular_set);
            d["singular_everywhere"] = rep.singular_set.kind == SingularSet::Kind::entire_space;
            d["exact"] = rep.certification == Certification::exact;
            return d;
        },
        py::arg("system"), py::arg("max_k") = 0, py::arg("exact_radical") = false, py::arg("confirm") = false);

    m.def(
        "point_status",
        [](const PySystem& s, const std::vector<std::string>& x, int k) {
            PointVerdict v = point_status(s.model(), exact_vector(x), k);
            py::dict d;
            d["in_S_k"] = v.in_S_k;
            d["undefined"] = v.undefined;
            return d;
        },
        py::arg("system"), py::arg("x"), py::arg("k"));

    m.def(
        "simulate",
        [](const PySystem& s, const std::vector<double>& x0, const std::vector<std::vector<double>>& inputs) {
            return simulate(s.numeric(), x0, inputs).x;
        },
        py::arg("system"), py::arg("x0"), py::arg("inputs"));

    m.def(
        "jacobian_rank",
        [](const PySystem& s, const std::vector<double>& x0, int k, int samples, double tol, std::uint64_t seed) {
            RankOptions opt;
            opt.samples = samples;
            opt.tol = tol;
            opt.seed = seed;
            RankEstimate r = jacobian_rank(s.numeric(), x0, k, opt);
            py::dict d;
            d["rank"] = r.rank;
            d["singular_values"] = r.singular_values;
            return d;
        },
        py::arg("system"), py::arg("x0"), py::arg("k"), py::arg("samples") = 64, py::arg("tol") = 1e-8,
        py::arg("seed") = RankOptions{}.seed);

    m.def(
        "run",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = run_command(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        "Runs one command-line invocation and returns (exit code, stdout, stderr).");

    m.attr("__version__") = "0.1.0";
}

#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hamsim/circuit.hpp"
#include "hamsim/model.hpp"
#include "hamsim/optim.hpp"
#include "hamsim/pf.hpp"
#include "hamsim/qsp.hpp"
#include "hamsim/report.hpp"
#include "hamsim/ts.hpp"

namespace py = pybind11;
using namespace hamsim;

namespace {

EstimateOptions make_options(const std::string& algorithm, int n, std::optional<double> t, double epsilon,
                             double h_max, const std::vector<std::uint64_t>& seeds, int order,
                             const std::string& bound, const std::string& mode, const std::string& ja, int M,
                             const std::string& angles, std::uint64_t angle_seed, bool optimize,
                             const std::string& opt_mode, double c1, double c0) {
    EstimateOptions o;
    o.algorithm = parse_algorithm(algorithm);
    o.n = n;
    o.t = t;
    o.epsilon = epsilon;
    o.h_max = h_max;
    o.seeds = seeds;
    o.order = order;
    o.bound = parse_bound(bound);
    o.qsp_mode = parse_qsp_mode(mode);
    o.ja_bound = parse_ja_bound(ja);
    o.M = M;
    o.angle_file = angles;
    o.angle_seed = angle_seed;
    o.optimize = optimize;
    if (opt_mode == "periodic") o.opt_mode = OptMode::Periodic;
    else if (opt_mode == "whole") o.opt_mode = OptMode::WholeCircuit;
    else throw std::invalid_argument("opt_mode must be periodic or whole");
    o.calib = {c1, c0};
    validate(o);
    return o;
}

py::dict counts_dict(const GateCounts& g) {
    py::dict d;
    for (int k = 0; k < kGateKinds; ++k)
        d[gate_name(static_cast<GateKind>(k))] = static_cast<std::uint64_t>(g.by_kind[k]);
    d["TOTAL"] = static_cast<std::uint64_t>(g.total());
    d["qubits"] = g.qubits;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Circuit synthesis and resource estimates for Heisenberg-chain simulation";
    m.attr("__version__") = toolkit_version();

    py::register_exception<PlaceholderAngles>(m, "PlaceholderAngles", PyExc_ValueError);
    py::register_exception<KOverflow>(m, "KOverflow", PyExc_RuntimeError);

    m.def(
        "hamiltonian",
        [](int n, double h_max, std::uint64_t seed) {
            const auto H = build_hamiltonian(n, h_max, seed);
            py::dict d;
            d["n"] = H.n;
            d["h"] = H.h;
            d["alpha"] = H.alpha;
            d["lambda"] = H.lambda;
            d["terms"] = H.terms.size();
            return d;
        },
        py::arg("n"), py::arg("h_max") = 1.0, py::arg("seed") = 1);

    m.def(
        "pf_segments",
        [](int n, int order, const std::string& bound, std::optional<double> t, double epsilon, double h_max,
           std::uint64_t seed) {
            return pf_segments(build_hamiltonian(n, h_max, seed), order, parse_bound(bound), t ? *t : n, epsilon);
        },
        py::arg("n"), py::arg("order") = 4, py::arg("bound") = "commutator", py::arg("t") = py::none(),
        py::arg("epsilon") = 1e-3, py::arg("h_max") = 1.0, py::arg("seed") = 1);

    m.def(
        "ts_params",
        [](int n, std::optional<double> t, double epsilon, double h_max, std::uint64_t seed) {
            const auto p = ts_params(build_hamiltonian(n, h_max, seed), t ? *t : n, epsilon);
            py::dict d;
            d["r"] = p.r;
            d["K"] = p.K;
            d["xi"] = p.xi;
            d["success_probability_lb"] = p.success_prob_lb;
            d["alpha"] = p.alpha;
            return d;
        },
        py::arg("n"), py::arg("t") = py::none(), py::arg("epsilon") = 1e-3, py::arg("h_max") = 1.0,
        py::arg("seed") = 1);

    m.def(
        "qsp_segments", [](int n, std::optional<double> t, double epsilon, int M) {
            return qsp_segments(n, t ? *t : n, epsilon, M);
        },
        py::arg("n"), py::arg("t") = py::none(), py::arg("epsilon") = 1e-3, py::arg("M") = 28);

    m.def(
        "qsp_full_M",
        [](int n, std::optional<double> t, double epsilon, const std::string& bound) {
            return qsp_full_M(n, t ? *t : n, epsilon, parse_ja_bound(bound));
        },
        py::arg("n"), py::arg("t") = py::none(), py::arg("epsilon") = 1e-3, py::arg("bound") = "analytic");

    m.def("qsp_qubits", &qsp_qubits, py::arg("n"));
    m.def("qsp_success_lb", &qsp_success_lb, py::arg("epsilon"));

    m.def(
        "t_estimate",
        [](std::uint64_t rz, double epsilon, std::uint64_t toffoli, double c1, double c0) {
            return static_cast<std::uint64_t>(t_estimate(rz, epsilon, toffoli, {c1, c0}));
        },
        py::arg("rz_count"), py::arg("epsilon") = 1e-3, py::arg("toffoli_count") = 0, py::arg("c1") = 3.5,
        py::arg("c0") = 4.0);

    m.def(
        "estimate_json",
        [](const std::string& algorithm, int n, std::optional<double> t, double epsilon, double h_max,
           const std::vector<std::uint64_t>& seeds, int order, const std::string& bound, const std::string& mode,
           const std::string& ja, int M, const std::string& angles, std::uint64_t angle_seed, bool optimize,
           const std::string& opt_mode, double c1, double c0) {
            const auto o = make_options(algorithm, n, t, epsilon, h_max, seeds, order, bound, mode, ja, M, angles,
                                        angle_seed, optimize, opt_mode, c1, c0);
            py::gil_scoped_release release;
            return report_json(estimate(o));
        },
        py::arg("algorithm"), py::arg("n"), py::arg("t") = py::none(), py::arg("epsilon") = 1e-3,
        py::arg("h_max") = 1.0, py::arg("seeds") = std::vector<std::uint64_t>{1}, py::arg("order") = 4,
        py::arg("bound") = "commutator", py::arg("mode") = "segmented", py::arg("ja") = "analytic",
        py::arg("M") = 28, py::arg("angles") = "", py::arg("angle_seed") = 1, py::arg("optimize") = false,
        py::arg("opt_mode") = "periodic", py::arg("c1") = 3.5, py::arg("c0") = 4.0);

    m.def(
        "synth",
        [](const std::string& algorithm, int n, std::optional<double> t, double epsilon, double h_max,
           std::uint64_t seed, int order, const std::string& bound, const std::string& mode, const std::string& ja,
           int M, const std::string& angles) {
            const auto o = make_options(algorithm, n, t, epsilon, h_max, {seed}, order, bound, mode, ja, M, angles,
                                        1, false, "periodic", 3.5, 4.0);
            return serialize(build_circuit(o, seed));
        },
        py::arg("algorithm"), py::arg("n"), py::arg("t") = py::none(), py::arg("epsilon") = 1e-3,
        py::arg("h_max") = 1.0, py::arg("seed") = 1, py::arg("order") = 4, py::arg("bound") = "commutator",
        py::arg("mode") = "segmented", py::arg("ja") = "analytic", py::arg("M") = 28, py::arg("angles") = "");

    m.def(
        "count_gates", [](const std::string& circuit) { return counts_dict(count_gates(deserialize(circuit))); },
        py::arg("circuit"));

    m.def(
        "optimize",
        [](const std::string& circuit, const std::string& mode) {
            const auto c = deserialize(circuit);
            py::gil_scoped_release release;
            return serialize(optimize(c, mode == "whole" ? OptMode::WholeCircuit : OptMode::Periodic));
        },
        py::arg("circuit"), py::arg("mode") = "periodic");

    m.def(
        "sweep_json",
        [](const std::string& spec) {
            const auto cells = parse_sweep_spec(spec);
            py::gil_scoped_release release;
            return sweep_json(sweep(cells));
        },
        py::arg("spec"));
}

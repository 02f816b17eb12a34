#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hamsim/model.hpp"
#include "hamsim/optim.hpp"
#include "hamsim/pf.hpp"
#include "hamsim/qsp.hpp"
#include "hamsim/report.hpp"
#include "hamsim/sim.hpp"
#include "hamsim/ts.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace hamsim;
using ojson = nlohmann::ordered_json;

namespace {

struct Common {
    std::string algorithm = "pf";
    int n = 13;
    double t = 0.0;
    double epsilon = 1e-3;
    double h = 1.0;
    std::vector<std::uint64_t> seeds;
    int seed_count = 0;
    int order = 4;
    std::string bound = "commutator";
    std::string mode = "segmented";
    std::string ja = "analytic";
    int M = 28;
    std::string angles;
    std::uint64_t angle_seed = 1;
    bool optimize = false;
    std::string opt_mode = "periodic";
    double c1 = 3.5, c0 = 4.0;
    std::string format = "json";
    std::string out;
};

void add_common(CLI::App* app, Common& c, bool with_algorithm = true) {
    if (with_algorithm)
        app->add_option("algorithm", c.algorithm, "pf, ts or qsp")->check(CLI::IsMember({"pf", "ts", "qsp"}));
    app->add_option("--n", c.n, "chain length")->check(CLI::Range(3, 100000));
    app->add_option("--t", c.t, "evolution time (default n)");
    app->add_option("--epsilon", c.epsilon, "target error");
    app->add_option("--field", c.h, "field strength h (fields drawn from [-h, h])");
    app->add_option("--seed", c.seeds, "Hamiltonian seed; repeat for several");
    app->add_option("--seeds", c.seed_count, "use seeds 1..N and report the mean");
    app->add_option("--order", c.order, "product-formula order (1, 2, 4, 6, 8)");
    app->add_option("--bound", c.bound, "analytic, minimized, commutator or empirical");
    app->add_option("--mode", c.mode, "QSP mode: segmented or full");
    app->add_option("--ja", c.ja, "full-mode Jacobi-Anger bound: analytic or empirical");
    app->add_option("--M", c.M, "phased iterates per segment (segmented mode)");
    app->add_option("--angles", c.angles, "QSP angle file (JSON)");
    app->add_option("--angle-seed", c.angle_seed, "seed for placeholder phases");
    app->add_option("--c1", c.c1, "T-estimate slope per log2(1/tau)");
    app->add_option("--c0", c.c0, "T-estimate offset");
    app->add_option("--out", c.out, "output file (default stdout)");
}

EstimateOptions to_options(const Common& c) {
    EstimateOptions o;
    o.algorithm = parse_algorithm(c.algorithm);
    o.n = c.n;
    if (c.t > 0) o.t = c.t;
    o.epsilon = c.epsilon;
    o.h_max = c.h;
    if (c.seed_count > 0) {
        o.seeds.resize(c.seed_count);
        std::iota(o.seeds.begin(), o.seeds.end(), 1);
    } else if (!c.seeds.empty()) {
        o.seeds = c.seeds;
    }
    o.order = c.order;
    o.bound = parse_bound(c.bound);
    o.qsp_mode = parse_qsp_mode(c.mode);
    o.ja_bound = parse_ja_bound(c.ja);
    o.M = c.M;
    o.angle_file = c.angles;
    o.angle_seed = c.angle_seed;
    o.optimize = c.optimize;
    if (c.opt_mode == "periodic") o.opt_mode = OptMode::Periodic;
    else if (c.opt_mode == "whole") o.opt_mode = OptMode::WholeCircuit;
    else throw std::invalid_argument("--opt-mode must be periodic or whole");
    o.calib = {c.c1, c.c0};
    validate(o);
    return o;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ojson counts_object(const GateCounts& g) {
    ojson j = ojson::object();
    for (int k = 0; k < kGateKinds; ++k)
        j[gate_name(static_cast<GateKind>(k))] = static_cast<std::uint64_t>(g.by_kind[k]);
    j["TOTAL"] = static_cast<std::uint64_t>(g.total());
    j["qubits"] = g.qubits;
    return j;
}

int cmd_estimate(const Common& c) {
    const EstimateOptions o = to_options(c);
    const ResourceReport r = estimate(o);
    if (c.format == "json") emit(report_json(r) + "\n", c.out);
    else if (c.format == "csv") emit(csv_header() + csv_row(r), c.out);
    else throw std::invalid_argument("estimate supports --format json or csv");
    return 0;
}

int cmd_bound(const Common& c) {
    const EstimateOptions o = to_options(c);
    ojson rows = ojson::array();
    for (auto seed : o.seeds) {
        const SpinChainHamiltonian H = build_hamiltonian(o.n, o.h_max, seed);
        ojson j;
        j["seed"] = seed;
        j["alpha"] = H.alpha;
        j["Lambda"] = H.lambda;
        switch (o.algorithm) {
            case Algorithm::PF: {
                const auto p = plan_pf(H, o.order, o.bound, o.time(), o.epsilon);
                j["r"] = p.r;
                j["exponentials_per_segment"] = pf_exponentials(H, o.order, o.time() / p.r).size();
                break;
            }
            case Algorithm::TS: {
                const auto p = ts_params(H, o.time(), o.epsilon);
                j["r"] = p.r;
                j["K"] = p.K;
                j["xi"] = p.xi;
                j["success_probability_lb"] = p.success_prob_lb;
                break;
            }
            case Algorithm::QSP: {
                const auto p = o.qsp_mode == QspMode::Segmented ? plan_qsp_segmented(o.n, o.time(), o.epsilon, o.M)
                                                                 : plan_qsp_full(o.n, o.time(), o.epsilon, o.ja_bound);
                j["r"] = p.r;
                j["M"] = p.M;
                j["q"] = p.q();
                j["iterates"] = p.iterates();
                j["alpha_nominal"] = p.alpha_nominal;
                j["success_probability_lb"] = qsp_success_lb(o.epsilon);
                break;
            }
        }
        rows.push_back(j);
    }
    ojson out;
    out["algorithm"] = algorithm_name(o.algorithm);
    if (o.algorithm == Algorithm::PF) {
        out["order"] = o.order;
        out["bound"] = bound_name(o.bound);
    }
    if (o.algorithm == Algorithm::QSP) out["mode"] = qsp_mode_name(o.qsp_mode);
    out["n"] = o.n;
    out["t"] = o.time();
    out["epsilon"] = o.epsilon;
    out["plans"] = rows;
    emit(out.dump(2) + "\n", c.out);
    return 0;
}

int cmd_synth(const Common& c) {
    const EstimateOptions o = to_options(c);
    const CircuitBlock circ = build_circuit(o, o.seeds.front());
    if (c.format == "circ") emit(serialize(circ), c.out);
    else if (c.format == "json") emit(counts_object(count_gates(circ)).dump(2) + "\n", c.out);
    else throw std::invalid_argument("synth supports --format circ or json");
    return 0;
}

int cmd_optimize(const std::string& in, const std::string& mode, const std::string& out, int rounds) {
    const CircuitBlock c = deserialize(read_file(in));
    const OptMode m = mode == "whole" ? OptMode::WholeCircuit : OptMode::Periodic;
    const CircuitBlock o = optimize(c, m, rounds);
    ojson j;
    j["before"] = counts_object(count_gates(c));
    j["after"] = counts_object(count_gates(o));
    if (!out.empty()) emit(serialize(o), out);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const Common& c, const std::string& circuit, std::uint64_t r_override) {
    EstimateOptions o = to_options(c);
    ojson rows = ojson::array();
    for (auto seed : o.seeds) {
        const SpinChainHamiltonian H = build_hamiltonian(o.n, o.h_max, seed);
        const CMatrix exact = exact_evolution(H, o.time());
        ojson j;
        j["seed"] = seed;
        if (!circuit.empty()) {
            const CircuitBlock circ = deserialize(read_file(circuit));
            if (circ.qubits != o.n) throw std::invalid_argument("circuit must act on exactly n qubits");
            j["distance"] = spectral_distance(circuit_unitary(circ), exact);
        } else {
            if (o.algorithm != Algorithm::PF) throw std::invalid_argument("simulate without --circuit supports pf only");
            const std::uint64_t r = r_override ? r_override : plan_pf(H, o.order, o.bound, o.time(), o.epsilon).r;
            j["r"] = r;
            j["distance"] = spectral_distance(circuit_unitary(synth_pf(H, {Algorithm::PF, o.order, o.bound, o.n,
                                                                             o.time(), o.epsilon, r})),
                                              exact);
        }
        j["within_epsilon"] = j["distance"].get<double>() <= o.epsilon;
        rows.push_back(j);
    }
    ojson out;
    out["n"] = o.n;
    out["t"] = o.time();
    out["epsilon"] = o.epsilon;
    out["results"] = rows;
    emit(out.dump(2) + "\n", c.out);
    return 0;
}

int cmd_empirical_fit(const Common& c, const std::vector<int>& ns) {
    EstimateOptions o = to_options(c);
    std::vector<std::pair<double, double>> pts;
    ojson rows = ojson::array();
    for (int n : ns) {
        double sum = 0;
        ojson per = ojson::array();
        for (auto seed : o.seeds) {
            const SpinChainHamiltonian H = build_hamiltonian(n, o.h_max, seed);
            const double t = c.t > 0 ? c.t : n;
            const auto r = empirical_r_search(H, o.order, t, o.epsilon);
            per.push_back(r);
            sum += static_cast<double>(r);
        }
        const double mean = sum / o.seeds.size();
        pts.emplace_back(n, mean);
        rows.push_back({{"n", n}, {"r", per}, {"mean_r", mean}});
    }
    ojson out;
    out["order"] = o.order;
    out["epsilon"] = o.epsilon;
    out["seeds"] = o.seeds;
    out["points"] = rows;
    if (pts.size() >= 3) {
        const FitResult f = powerlaw_fit(pts);
        out["fit"] = {{"c", f.c}, {"gamma", f.gamma}, {"residual", f.residual}};
    }
    if (c.format == "csv") {
        std::string s = "n,mean_r\n";
        for (auto [n, r] : pts) s += std::to_string(static_cast<int>(n)) + "," + std::to_string(r) + "\n";
        emit(s, c.out);
    } else {
        emit(out.dump(2) + "\n", c.out);
    }
    return 0;
}

int cmd_sweep(const std::string& spec, const std::string& format, const std::string& out) {
    const auto rows = sweep(parse_sweep_spec(read_file(spec)));
    if (format == "csv") emit(sweep_csv(rows), out);
    else if (format == "json") emit(sweep_json(rows), out);
    else throw std::invalid_argument("sweep supports --format json or csv");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    omp_set_num_threads(sim_threads());
#endif
    CLI::App app{"Circuit synthesis and resource estimates for Heisenberg-chain simulation"};
    app.set_version_flag("--version", toolkit_version());
    app.require_subcommand(1);

    Common est;
    auto* e = app.add_subcommand("estimate", "synthesize, count and report resources");
    add_common(e, est);
    e->add_flag("--optimize", est.optimize, "run the circuit optimizer");
    e->add_option("--opt-mode", est.opt_mode, "periodic or whole");
    e->add_option("--format", est.format, "json or csv");

    Common bnd;
    auto* b = app.add_subcommand("bound", "segment counts and truncation orders only");
    add_common(b, bnd);

    Common syn;
    syn.format = "circ";
    auto* s = app.add_subcommand("synth", "dump the synthesized circuit");
    add_common(s, syn);
    s->add_option("--format", syn.format, "circ or json");

    std::string opt_in, opt_mode = "periodic", opt_out;
    int rounds = 64;
    auto* op = app.add_subcommand("optimize", "optimize a circuit file and print before/after counts");
    op->add_option("input", opt_in, "circuit file")->required();
    op->add_option("--opt-mode", opt_mode, "periodic or whole")->check(CLI::IsMember({"periodic", "whole"}));
    op->add_option("--rounds", rounds, "maximum pass rounds");
    op->add_option("--out", opt_out, "write the optimized circuit here");

    Common sim;
    sim.n = 5;
    std::string sim_circuit;
    std::uint64_t sim_r = 0;
    auto* sm = app.add_subcommand("simulate", "spectral distance to exact evolution (small n)");
    add_common(sm, sim);
    sm->add_option("--circuit", sim_circuit, "compare this circuit file instead");
    sm->add_option("--r", sim_r, "override the planned segment count");

    Common fit;
    fit.order = 4;
    std::vector<int> fit_ns{5, 6, 7, 8};
    auto* ef = app.add_subcommand("empirical-fit", "empirical segment counts and a power-law fit");
    add_common(ef, fit, false);
    ef->add_option("--ns", fit_ns, "chain lengths")->delimiter(',');
    ef->add_option("--format", fit.format, "json or csv");

    std::string sw_spec, sw_format = "json", sw_out;
    auto* sw = app.add_subcommand("sweep", "run a grid of estimates from a spec file");
    sw->add_option("spec", sw_spec, "JSON spec file")->required();
    sw->add_option("--format", sw_format, "json or csv");
    sw->add_option("--out", sw_out, "output file");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*e) return cmd_estimate(est);
        if (*b) return cmd_bound(bnd);
        if (*s) return cmd_synth(syn);
        if (*op) return cmd_optimize(opt_in, opt_mode, opt_out, rounds);
        if (*sm) return cmd_simulate(sim, sim_circuit, sim_r);
        if (*ef) return cmd_empirical_fit(fit, fit_ns);
        if (*sw) return cmd_sweep(sw_spec, sw_format, sw_out);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "usage error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}

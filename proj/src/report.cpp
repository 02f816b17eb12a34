#include "hamsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hamsim/model.hpp"
#include "hamsim/ts.hpp"

#ifndef HAMSIM_VERSION
#define HAMSIM_VERSION "0.0.0"
#endif

namespace hamsim {

using ojson = nlohmann::ordered_json;

const char* toolkit_version() { return HAMSIM_VERSION; }

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::PF: return "pf";
        case Algorithm::TS: return "ts";
        case Algorithm::QSP: return "qsp";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& s) {
    if (s == "pf") return Algorithm::PF;
    if (s == "ts") return Algorithm::TS;
    if (s == "qsp") return Algorithm::QSP;
    throw std::invalid_argument("unknown algorithm '" + s + "' (valid: pf, ts, qsp)");
}

u128 t_per_rotation(u128 rz_count, double epsilon, const TCalib& calib) {
    if (rz_count == 0) return 0;
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    const double tau = (epsilon / 2) / static_cast<double>(rz_count);
    const double per = std::round(calib.c1 * std::log2(1 / tau) + calib.c0);
    return per > 0 ? static_cast<u128>(per) : 0;
}

u128 t_estimate(u128 rz_count, double epsilon, u128 toffoli_count, const TCalib& calib) {
    return rz_count * t_per_rotation(rz_count, epsilon, calib) + 7 * toffoli_count;
}

void validate(const EstimateOptions& o) {
    if (o.n < 3) throw std::invalid_argument("n must be at least 3");
    if (!(o.epsilon > 0 && o.epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
    if (!(o.time() > 0)) throw std::invalid_argument("evolution time must be positive");
    if (!(o.h_max >= 0)) throw std::invalid_argument("field strength must be nonnegative");
    if (o.seeds.empty()) throw std::invalid_argument("at least one seed is required");
    switch (o.algorithm) {
        case Algorithm::PF:
            if (!valid_pf_order(o.order)) throw std::invalid_argument("PF order must be one of 1, 2, 4, 6, 8");
            if (o.bound == BoundKind::Commutator && o.order != 1 && o.order != 2 && o.order != 4)
                throw std::invalid_argument("commutator bound supports orders 1, 2, 4; analytic, minimized and "
                                            "empirical support 1, 2, 4, 6, 8");
            break;
        case Algorithm::TS:
            break;
        case Algorithm::QSP:
            if (o.qsp_mode == QspMode::Segmented && (o.M <= 0 || o.M % 2))
                throw std::invalid_argument("QSP iterate count M must be a positive even number");
            break;
    }
}

namespace {

QspPlan qsp_plan(const EstimateOptions& o) {
    return o.qsp_mode == QspMode::Segmented ? plan_qsp_segmented(o.n, o.time(), o.epsilon, o.M)
                                            : plan_qsp_full(o.n, o.time(), o.epsilon, o.ja_bound);
}

CircuitBlock qsp_circuit(const EstimateOptions& o, const SpinChainHamiltonian& H, const QspPlan& plan,
                         bool allow_placeholder) {
    if (!o.angle_file.empty()) {
        QspPlan p = plan;
        p.angles = read_angle_file(o.angle_file);
        return synth_qsp(H, p);
    }
    if (allow_placeholder) return synth_qsp_structure(H, plan, o.angle_seed);
    QspPlan p = plan;
    use_placeholder_angles(p, o.angle_seed);
    return synth_qsp(H, p);
}

SeedRun run_seed(const EstimateOptions& o, std::uint64_t seed) {
    const SpinChainHamiltonian H = build_hamiltonian(o.n, o.h_max, seed);
    SeedRun run;
    run.seed = seed;
    run.alpha = H.alpha;
    CircuitBlock c;
    switch (o.algorithm) {
        case Algorithm::PF: {
            const SegmentPlan p = plan_pf(H, o.order, o.bound, o.time(), o.epsilon);
            run.r = p.r;
            c = synth_pf(H, p);
            break;
        }
        case Algorithm::TS: {
            const TsParams p = ts_params(H, o.time(), o.epsilon);
            run.r = p.r;
            run.K = p.K;
            c = synth_ts(H, p);
            break;
        }
        case Algorithm::QSP: {
            const QspPlan p = qsp_plan(o);
            run.r = p.r;
            run.M = p.M;
            c = qsp_circuit(o, H, p, true);
            break;
        }
    }
    run.qubits = c.qubits;
    run.toffolis = count_gates(c)[GateKind::Toffoli];
    if (run.toffolis) c = lower_toffolis(c);
    run.pre = count_gates(c);
    if (o.optimize) run.post = count_gates(hamsim::optimize(c, o.opt_mode));
    const GateCounts& basis = run.post ? *run.post : run.pre;
    run.t_estimate = t_estimate(basis[GateKind::Rz], o.epsilon, 0, o.calib) + basis.t_count();
    return run;
}

template <class F>
double mean_of(const std::vector<SeedRun>& runs, F f) {
    if (runs.empty()) return 0.0;
    long double s = 0;
    for (const auto& r : runs) s += static_cast<long double>(f(r));
    return static_cast<double>(s / runs.size());
}

}  // namespace

double ResourceReport::mean_pre(GateKind k) const {
    return mean_of(runs, [k](const SeedRun& r) { return r.pre[k]; });
}

double ResourceReport::mean_post(GateKind k) const {
    return mean_of(runs, [k](const SeedRun& r) { return r.post ? (*r.post)[k] : u128(0); });
}

double ResourceReport::mean_t_estimate() const {
    return mean_of(runs, [](const SeedRun& r) { return r.t_estimate; });
}

double ResourceReport::mean_r() const {
    return mean_of(runs, [](const SeedRun& r) { return r.r; });
}

int ResourceReport::qubits() const { return runs.empty() ? 0 : runs.front().qubits; }

CircuitBlock build_circuit(const EstimateOptions& o, std::uint64_t seed) {
    validate(o);
    const SpinChainHamiltonian H = build_hamiltonian(o.n, o.h_max, seed);
    switch (o.algorithm) {
        case Algorithm::PF: return synth_pf(H, plan_pf(H, o.order, o.bound, o.time(), o.epsilon));
        case Algorithm::TS: return synth_ts(H, o.time(), o.epsilon);
        case Algorithm::QSP: return qsp_circuit(o, H, qsp_plan(o), false);
    }
    throw std::logic_error("unreachable");
}

ResourceReport estimate(const EstimateOptions& o) {
    validate(o);
    ResourceReport rep;
    rep.options = o;
    for (auto s : o.seeds) rep.runs.push_back(run_seed(o, s));
    if (o.algorithm == Algorithm::TS) {
        double lb = 1.0;
        for (auto s : o.seeds)
            lb = std::min(lb, ts_params(build_hamiltonian(o.n, o.h_max, s), o.time(), o.epsilon).success_prob_lb);
        rep.success_lb = lb;
    } else if (o.algorithm == Algorithm::QSP) {
        rep.success_lb = qsp_success_lb(o.epsilon);
        rep.placeholder_angles = o.angle_file.empty();
        rep.functional = !rep.placeholder_angles;
        if (rep.placeholder_angles)
            rep.note = "gate counts use placeholder phases (seed " + std::to_string(o.angle_seed) +
                       "); the circuit does not implement the evolution";
    }
    return rep;
}

namespace {

ojson num(u128 v) {
    if (v <= std::numeric_limits<std::uint64_t>::max()) return static_cast<std::uint64_t>(v);
    return static_cast<double>(v);
}

// Integer when every run agrees, the mean otherwise.
template <class F>
ojson agg(const std::vector<SeedRun>& runs, F f) {
    bool same = true;
    for (const auto& r : runs) same = same && f(r) == f(runs.front());
    if (same && !runs.empty()) return num(static_cast<u128>(f(runs.front())));
    return mean_of(runs, f);
}

ojson counts_json(const std::vector<SeedRun>& runs, bool post) {
    ojson j = ojson::object();
    auto pick = [post](const SeedRun& r) -> const GateCounts& { return post ? *r.post : r.pre; };
    for (int k = 0; k < kGateKinds; ++k) {
        const auto kind = static_cast<GateKind>(k);
        j[gate_name(kind)] = agg(runs, [&](const SeedRun& r) { return pick(r)[kind]; });
    }
    j["TOTAL"] = agg(runs, [&](const SeedRun& r) { return pick(r).total(); });
    return j;
}

ojson gate_counts_json(const GateCounts& g) {
    ojson j = ojson::object();
    for (int k = 0; k < kGateKinds; ++k) j[gate_name(static_cast<GateKind>(k))] = num(g.by_kind[k]);
    j["TOTAL"] = num(g.total());
    return j;
}

std::string bound_label(const EstimateOptions& o) {
    switch (o.algorithm) {
        case Algorithm::PF: return bound_name(o.bound);
        case Algorithm::TS: return "truncation";
        case Algorithm::QSP:
            if (o.qsp_mode == QspMode::Segmented) return "analytic";
            return o.ja_bound == JaBound::Analytic ? "analytic" : "empirical";
    }
    return "";
}

std::string mode_label(const EstimateOptions& o) {
    return o.algorithm == Algorithm::QSP ? qsp_mode_name(o.qsp_mode) : "";
}

ojson report_object(const ResourceReport& r) {
    const EstimateOptions& o = r.options;
    ojson j;
    j["toolkit"] = {{"name", "hamsim"}, {"version", toolkit_version()}};
    j["algorithm"] = algorithm_name(o.algorithm);
    j["order"] = o.algorithm == Algorithm::PF ? ojson(o.order) : ojson(nullptr);
    j["mode"] = o.algorithm == Algorithm::QSP ? ojson(mode_label(o)) : ojson(nullptr);
    j["bound"] = bound_label(o);
    j["n"] = o.n;
    j["t"] = o.time();
    j["epsilon"] = o.epsilon;
    j["h_max"] = o.h_max;
    j["seeds"] = o.seeds;
    j["r"] = agg(r.runs, [](const SeedRun& s) { return s.r; });
    if (o.algorithm == Algorithm::TS) j["K"] = agg(r.runs, [](const SeedRun& s) { return s.K; });
    if (o.algorithm == Algorithm::QSP) {
        const int M = r.runs.empty() ? 0 : r.runs.front().M;
        j["M"] = M;
        j["q"] = M / 2 + 1;
        j["iterates"] = agg(r.runs, [](const SeedRun& s) { return s.r * static_cast<std::uint64_t>(s.M); });
        ojson a;
        a["source"] = o.angle_file.empty() ? "placeholder" : "file";
        if (o.angle_file.empty()) a["seed"] = o.angle_seed;
        else a["file"] = o.angle_file;
        j["angles"] = a;
    }
    j["qubits"] = r.qubits();
    j["functional"] = r.functional;
    j["optimized"] = o.optimize;
    j["opt_mode"] = o.optimize ? ojson(o.opt_mode == OptMode::Periodic ? "periodic" : "whole") : ojson(nullptr);
    j["counts_pre"] = counts_json(r.runs, false);
    j["toffolis_before_lowering"] = agg(r.runs, [](const SeedRun& s) { return s.toffolis; });
    j["counts_post"] = o.optimize ? counts_json(r.runs, true) : ojson(nullptr);
    ojson te;
    te["label"] = "ESTIMATE";
    te["value"] = agg(r.runs, [](const SeedRun& s) { return s.t_estimate; });
    te["basis"] = o.optimize ? "post" : "pre";
    te["c1"] = o.calib.c1;
    te["c0"] = o.calib.c0;
    te["synthesis_epsilon"] = o.epsilon / 2;
    j["t_estimate"] = te;
    j["success_probability_lb"] = r.success_lb ? ojson(*r.success_lb) : ojson(nullptr);
    ojson runs = ojson::array();
    for (const auto& s : r.runs) {
        ojson x;
        x["seed"] = s.seed;
        x["alpha"] = s.alpha;
        x["r"] = s.r;
        if (o.algorithm == Algorithm::TS) x["K"] = s.K;
        if (o.algorithm == Algorithm::QSP) x["M"] = s.M;
        x["counts_pre"] = gate_counts_json(s.pre);
        x["counts_post"] = s.post ? gate_counts_json(*s.post) : ojson(nullptr);
        x["t_estimate"] = num(s.t_estimate);
        runs.push_back(x);
    }
    j["runs"] = runs;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

std::string fmt_num(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    if (v == std::floor(v) && std::fabs(v) < 1e18) std::snprintf(buf, sizeof buf, "%.0f", v);
    else std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string seeds_field(const std::vector<std::uint64_t>& seeds) {
    std::string s;
    for (std::size_t i = 0; i < seeds.size(); ++i) s += (i ? ";" : "") + std::to_string(seeds[i]);
    return s;
}

std::vector<std::string> option_fields(const EstimateOptions& o) {
    return {algorithm_name(o.algorithm),
            o.algorithm == Algorithm::PF ? std::to_string(o.order) : "",
            mode_label(o),
            bound_label(o),
            std::to_string(o.n),
            fmt_num(o.time()),
            fmt_num(o.epsilon),
            fmt_num(o.h_max),
            seeds_field(o.seeds)};
}

std::string join(const std::vector<std::string>& f) {
    std::string s;
    for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + csv_quote(f[i]);
    return s + "\n";
}

constexpr int kCsvColumns = 28;

}  // namespace

std::string report_json(const ResourceReport& r, int indent) { return report_object(r).dump(indent); }

std::string csv_header() {
    return "algorithm,order,mode,bound,n,t,epsilon,h_max,seeds,r,K,M,qubits,"
           "cnot_pre,rz_pre,t_pre,toffoli_pre,h_pre,total_pre,"
           "cnot_post,rz_post,t_post,total_post,t_estimate,success_lb,placeholder,functional,error\n";
}

std::string csv_row(const ResourceReport& r) {
    const EstimateOptions& o = r.options;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto pre = [&](GateKind k) { return fmt_num(r.mean_pre(k)); };
    auto post = [&](GateKind k) { return o.optimize ? fmt_num(r.mean_post(k)) : ""; };
    auto tcount = [&](bool after) {
        return fmt_num(mean_of(r.runs, [after](const SeedRun& s) { return after ? s.post->t_count() : s.pre.t_count(); }));
    };
    auto total = [&](bool after) {
        return fmt_num(mean_of(r.runs, [after](const SeedRun& s) { return after ? s.post->total() : s.pre.total(); }));
    };
    std::vector<std::string> f = option_fields(o);
    f.push_back(fmt_num(r.mean_r()));
    f.push_back(o.algorithm == Algorithm::TS ? fmt_num(mean_of(r.runs, [](const SeedRun& s) { return s.K; })) : "");
    f.push_back(o.algorithm == Algorithm::QSP && !r.runs.empty() ? std::to_string(r.runs.front().M) : "");
    f.push_back(std::to_string(r.qubits()));
    f.push_back(pre(GateKind::CNOT));
    f.push_back(pre(GateKind::Rz));
    f.push_back(tcount(false));
    f.push_back(fmt_num(mean_of(r.runs, [](const SeedRun& s) { return s.toffolis; })));
    f.push_back(pre(GateKind::H));
    f.push_back(total(false));
    f.push_back(post(GateKind::CNOT));
    f.push_back(post(GateKind::Rz));
    f.push_back(o.optimize ? tcount(true) : "");
    f.push_back(o.optimize ? total(true) : "");
    f.push_back(fmt_num(r.mean_t_estimate()));
    f.push_back(fmt_num(r.success_lb ? *r.success_lb : nan));
    f.push_back(r.placeholder_angles ? "true" : "false");
    f.push_back(r.functional ? "true" : "false");
    f.push_back("");
    return join(f);
}

std::string csv_error_row(const EstimateOptions& o, const std::string& error) {
    std::vector<std::string> f = option_fields(o);
    f.resize(kCsvColumns - 1);
    f.push_back(error);
    return join(f);
}

namespace {

std::vector<int> int_list(const ojson& v) {
    std::vector<int> out;
    if (v.is_array()) {
        for (const auto& x : v) out.push_back(x.get<int>());
    } else {
        out.push_back(v.get<int>());
    }
    return out;
}

}  // namespace

std::vector<EstimateOptions> parse_sweep_spec(const std::string& json_text) {
    const ojson spec = ojson::parse(json_text);
    const ojson& cells = spec.is_array() ? spec : spec.at("cells");
    std::vector<EstimateOptions> out;
    for (const auto& cell : cells) {
        EstimateOptions o;
        static const std::vector<std::string> known = {
            "algorithm", "n",        "t",     "epsilon",    "h_max",    "seeds",    "order",
            "bound",     "mode",     "ja",    "M",          "angles",   "angle_seed", "optimize",
            "opt_mode",  "c1",       "c0"};
        for (const auto& [k, v] : cell.items())
            if (std::find(known.begin(), known.end(), k) == known.end())
                throw std::invalid_argument("unknown sweep key '" + k + "'");
        o.algorithm = parse_algorithm(cell.value("algorithm", std::string("pf")));
        if (cell.contains("t")) o.t = cell["t"].get<double>();
        o.epsilon = cell.value("epsilon", o.epsilon);
        o.h_max = cell.value("h_max", o.h_max);
        if (cell.contains("seeds")) o.seeds = cell["seeds"].get<std::vector<std::uint64_t>>();
        o.order = cell.value("order", o.order);
        if (cell.contains("bound")) o.bound = parse_bound(cell["bound"].get<std::string>());
        if (cell.contains("mode")) o.qsp_mode = parse_qsp_mode(cell["mode"].get<std::string>());
        if (cell.contains("ja")) o.ja_bound = parse_ja_bound(cell["ja"].get<std::string>());
        o.M = cell.value("M", o.M);
        o.angle_file = cell.value("angles", std::string());
        o.angle_seed = cell.value("angle_seed", o.angle_seed);
        o.optimize = cell.value("optimize", false);
        if (cell.contains("opt_mode")) {
            const auto m = cell["opt_mode"].get<std::string>();
            if (m == "periodic") o.opt_mode = OptMode::Periodic;
            else if (m == "whole") o.opt_mode = OptMode::WholeCircuit;
            else throw std::invalid_argument("opt_mode must be periodic or whole");
        }
        o.calib.c1 = cell.value("c1", o.calib.c1);
        o.calib.c0 = cell.value("c0", o.calib.c0);
        for (int n : int_list(cell.at("n"))) {
            EstimateOptions c = o;
            c.n = n;
            out.push_back(c);
        }
    }
    return out;
}

std::vector<SweepRow> sweep(const std::vector<EstimateOptions>& cells) {
    std::vector<SweepRow> rows(cells.size());
    const long count = static_cast<long>(cells.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        rows[i].options = cells[i];
        try {
            rows[i].report = estimate(cells[i]);
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    }
    return rows;
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
    ojson arr = ojson::array();
    for (const auto& row : rows) {
        if (row.report) {
            arr.push_back(report_object(*row.report));
        } else {
            EstimateOptions o = row.options;
            arr.push_back({{"algorithm", algorithm_name(o.algorithm)},
                           {"n", o.n},
                           {"seeds", o.seeds},
                           {"error", row.error}});
        }
    }
    ojson j;
    j["toolkit"] = {{"name", "hamsim"}, {"version", toolkit_version()}};
    j["rows"] = arr;
    return j.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = csv_header();
    for (const auto& row : rows) out += row.report ? csv_row(*row.report) : csv_error_row(row.options, row.error);
    return out;
}

}  // namespace hamsim

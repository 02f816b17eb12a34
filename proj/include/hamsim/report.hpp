#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamsim/circuit.hpp"
#include "hamsim/optim.hpp"
#include "hamsim/pf.hpp"
#include "hamsim/qsp.hpp"

namespace hamsim {

const char* toolkit_version();

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

// Per-rotation T cost round(c1 log2(1/tau) + c0) with tau = (epsilon/2) / rz.
struct TCalib {
    double c1 = 3.5;
    double c0 = 4.0;
};
u128 t_per_rotation(u128 rz_count, double epsilon, const TCalib& calib = {});
u128 t_estimate(u128 rz_count, double epsilon, u128 toffoli_count, const TCalib& calib = {});

struct EstimateOptions {
    Algorithm algorithm = Algorithm::PF;
    int n = 13;
    std::optional<double> t;  // defaults to n
    double epsilon = 1e-3;
    double h_max = 1.0;
    std::vector<std::uint64_t> seeds{1};

    int order = 4;
    BoundKind bound = BoundKind::Commutator;

    QspMode qsp_mode = QspMode::Segmented;
    JaBound ja_bound = JaBound::Analytic;
    int M = 28;
    std::string angle_file;
    std::uint64_t angle_seed = 1;

    bool optimize = false;
    OptMode opt_mode = OptMode::Periodic;
    TCalib calib;

    double time() const { return t ? *t : static_cast<double>(n); }
};

// Throws std::invalid_argument naming the valid choices.
void validate(const EstimateOptions& o);

struct SeedRun {
    std::uint64_t seed = 0;
    double alpha = 0.0;
    std::uint64_t r = 0;
    int K = 0;
    int M = 0;
    int qubits = 0;
    // Toffolis before lowering to Clifford+T (TS and QSP).
    u128 toffolis = 0;
    GateCounts pre;
    std::optional<GateCounts> post;
    u128 t_estimate = 0;
};

struct ResourceReport {
    EstimateOptions options;
    std::vector<SeedRun> runs;
    std::optional<double> success_lb;
    bool placeholder_angles = false;
    bool functional = true;
    std::string note;

    // Mean over runs.
    double mean_pre(GateKind k) const;
    double mean_post(GateKind k) const;
    double mean_t_estimate() const;
    double mean_r() const;
    int qubits() const;
};

ResourceReport estimate(const EstimateOptions& o);

// The synthesized circuit for one seed, as counted by estimate (before lowering).
CircuitBlock build_circuit(const EstimateOptions& o, std::uint64_t seed);

std::string report_json(const ResourceReport& r, int indent = 2);
std::string csv_header();
std::string csv_row(const ResourceReport& r);
// A failed sweep cell: options plus the error text.
std::string csv_error_row(const EstimateOptions& o, const std::string& error);

struct SweepRow {
    EstimateOptions options;
    std::optional<ResourceReport> report;
    std::string error;
};

// Spec file: {"cells": [{"algorithm": "pf", "n": [13, 16], "seeds": [1, 2], ...}]}.
// Each cell expands over its n-list; keys mirror the CLI flags.
std::vector<EstimateOptions> parse_sweep_spec(const std::string& json_text);
std::vector<SweepRow> sweep(const std::vector<EstimateOptions>& cells);
std::string sweep_json(const std::vector<SweepRow>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace hamsim

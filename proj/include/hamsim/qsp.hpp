#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamsim/circuit.hpp"
#include "hamsim/model.hpp"

namespace hamsim {

enum class QspMode { Segmented, Full };
enum class JaBound { Analytic, Empirical };

const char* qsp_mode_name(QspMode m);
QspMode parse_qsp_mode(const std::string& s);
JaBound parse_ja_bound(const std::string& s);

class PlaceholderAngles : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct QspPlan {
    QspMode mode = QspMode::Segmented;
    int M = 28;
    std::uint64_t r = 1;
    double t = 0.0;
    double epsilon = 1e-3;
    double alpha_nominal = 0.0;
    // One list of M phases per segment, or a single list shared by all segments.
    std::vector<std::vector<double>> angles;
    bool placeholder = false;

    int q() const { return M / 2 + 1; }
    std::uint64_t iterates() const { return r * static_cast<std::uint64_t>(M); }
};

// 4 x^q / (2^q q!) evaluated in log space.
double ja_analytic_tail(double x, int q);
// 2 sum_{k >= q} |J_k(x)| by Miller's downward recurrence.
double ja_bessel_tail(double x, int q);

std::uint64_t qsp_segments(int n, double t, double epsilon, int M = 28);
int qsp_full_M(int n, double t, double epsilon, JaBound bound);
double qsp_success_lb(double epsilon);

// Fitted M for the Bessel-tail bound, 9.849 n^1.939.
double qsp_empirical_fit_M(int n);

QspPlan plan_qsp_segmented(int n, double t, double epsilon, int M = 28);
QspPlan plan_qsp_full(int n, double t, double epsilon, JaBound bound);

// Uniform phases in [0, 2 pi), for counting only.
std::vector<double> placeholder_angles(int M, std::uint64_t seed);
// One random pair repeated M/2 times, so the segment folds into a Repeat.
void use_placeholder_angles(QspPlan& plan, std::uint64_t seed);

// JSON: {"angles": [[...], ...]} or a bare array of arrays.
std::vector<std::vector<double>> read_angle_file(const std::string& path);
void write_angle_file(const std::string& path, const std::vector<std::vector<double>>& angles);

struct QspLayout {
    int n = 0, w = 0;
    std::vector<int> system;
    int b = -1;
    std::vector<int> reg;
    std::vector<int> pool;
    int total = 0;
};
QspLayout qsp_layout(int n);
int qsp_qubits(int n);

// |G> amplitudes over 2^w indices, normalized by 4n with the remainder on the
// first unused index. Without a spare index the realized alpha is used.
std::vector<double> qsp_g_amplitudes(const SpinChainHamiltonian& H);
// Normalization of the block encoding: <G|select|G> = (H + (a - alpha) I) / a.
double qsp_block_alpha(const SpinChainHamiltonian& H);

// One segment: prepare |+>|G>, V_{phi_1}, V^dag_{phi_2 + pi}, ..., unprepare.
CircuitBlock qsp_segment(const SpinChainHamiltonian& H, const QspLayout& l, const std::vector<double>& phases);
CircuitBlock synth_qsp(const SpinChainHamiltonian& H, const QspPlan& plan);
// Same gate structure with placeholder phases, in either mode; for counting only.
CircuitBlock synth_qsp_structure(const SpinChainHamiltonian& H, const QspPlan& plan, std::uint64_t seed = 1);

}  // namespace hamsim

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hamsim/circuit.hpp"
#include "hamsim/model.hpp"

namespace hamsim {

class KOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr int kMaxTruncationOrder = 10;

// delta = 2 (ln 2)^{K+1} / (K+1)!, the truncation error of one segment.
double ts_delta(int K);
// Per-segment error xi / r = delta (delta^2 + 3 delta + 4) / 2.
double ts_xi_per_segment(int K);

struct TsParams {
    std::uint64_t r = 0;
    int K = 0;
    double t_seg = 0.0;
    double t_rem = 0.0;
    double xi = 0.0;
    double success_prob_lb = 0.0;
    double alpha = 0.0;
};

TsParams ts_params(const SpinChainHamiltonian& H, double t, double epsilon);

// Qubit roles of the TS circuit.
struct TsLayout {
    int n = 0, K = 0, w = 0;
    std::vector<int> system, unary;
    std::vector<std::vector<int>> binary;  // K registers of w qubits
    int rot = -1;
    std::vector<int> pool;  // clean ancillas shared by the walks and the reflection
    int total = 0;

    // Qubits reflected about |0>: unary, binary registers, boost qubit.
    std::vector<int> reflected() const;
};

TsLayout ts_layout(int n, int K);
int ts_qubits(int n, int K);

// sum_k sqrt((alpha t)^k / k!) |1^k 0^{K-k}> / sqrt(s) on K fresh qubits.
CircuitBlock synth_unary_prep(int K, double alpha_t);
void emit_unary_prep(CircuitBlock& c, const std::vector<int>& qubits, double alpha_t);
std::vector<double> unary_amplitudes(int K, double alpha_t);

// sum_l sqrt(alpha_l / alpha) |l> on ceil(log2 L) fresh qubits.
CircuitBlock synth_coeff_prep(const SpinChainHamiltonian& H);
std::vector<double> coeff_amplitudes(const SpinChainHamiltonian& H, double norm);

// One segment -W R W^dag R W for duration dt, with the boost rotation folded into W.
CircuitBlock ts_segment(const SpinChainHamiltonian& H, const TsLayout& layout, double dt);
CircuitBlock synth_ts(const SpinChainHamiltonian& H, const TsParams& p);
CircuitBlock synth_ts(const SpinChainHamiltonian& H, double t, double epsilon);

}  // namespace hamsim

#pragma once

#include <vector>

#include "hamsim/circuit.hpp"

namespace hamsim {

enum class OptMode { WholeCircuit, Periodic };

struct OptStats {
    int rounds = 0;
};

// Replaces every Toffoli with Clifford+T. With `pair`, Toffolis on the same
// (control, target) that differ only in the polarity of the other control and
// are separated by gates that XOR onto the shared control are lowered jointly.
CircuitBlock lower_toffolis(const CircuitBlock& c, bool pair = true);
std::vector<Gate> lower_toffolis_flat(const std::vector<Gate>& g, bool pair = true);

// Individual passes on flat gate lists; each returns true when it changed something.
bool pass_cancel(std::vector<Gate>& g, int qubits);
bool pass_hadamard(std::vector<Gate>& g, int qubits);
bool pass_phase_poly(std::vector<Gate>& g, int qubits);

std::vector<Gate> optimize_flat(std::vector<Gate> g, int qubits, int max_rounds = 64, OptStats* stats = nullptr);
CircuitBlock optimize(const CircuitBlock& c, OptMode mode = OptMode::Periodic, int max_rounds = 64);

// Rz angle equivalent (up to global phase) of a diagonal single-qubit gate.
double phase_angle(const Gate& g);
bool is_phase_gate(GateKind k);
bool gates_commute(const Gate& a, const Gate& b);

}  // namespace hamsim

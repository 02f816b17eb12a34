#pragma once

#include <vector>

#include "hamsim/circuit.hpp"
#include "hamsim/model.hpp"

namespace hamsim {

// A Pauli string applied under a single control, together with a phase on the
// control: the controlled unitary is phase * P.
struct ControlledPauli {
    enum class Phase : std::uint8_t { One, MinusOne, I, MinusI };
    Phase phase = Phase::One;
    std::vector<std::pair<int, Axis>> paulis;

    void emit(CircuitBlock& c, int control) const;
    bool empty() const { return phase == Phase::One && paulis.empty(); }
};

struct SelectSpec {
    int w = 0;
    int gamma = 0;
    // Control register, most significant bit first; size w.
    std::vector<int> control;
    // Either empty (control generation only) or exactly gamma entries.
    std::vector<ControlledPauli> targets;
    int extra_control = -1;
    // Walk ancillas; needs select_ancillas(w, extra) entries, all in |0>.
    std::vector<int> ancillas;
};

int select_width(int gamma);
int select_ancillas(int w, bool extra_control);

void emit_select(CircuitBlock& c, const SelectSpec& spec);
// Standalone select on a fresh register layout: control x_1..x_w, ancillas,
// then target qubits from `target_qubits` (already counted in `total_qubits`).
CircuitBlock synth_select(const SelectSpec& spec, int total_qubits);

// Targets (-i)^k-style phase times H_l for each term of H. With `minus_i` the
// phase (-i)*sign(coeff) is used, otherwise sign(coeff).
std::vector<ControlledPauli> hamiltonian_targets(const SpinChainHamiltonian& H, int first_system_qubit,
                                                 bool minus_i);

// Multi-controlled X with ceil((c-2)/2) clean ancillas (relative-phase chain).
int mcx_ancillas(int controls);
void emit_mcx(CircuitBlock& c, const std::vector<int>& controls, int target, const std::vector<int>& ancillas);
// Phase -1 on |1...1> over `qubits`.
void emit_mcz(CircuitBlock& c, const std::vector<int>& qubits, const std::vector<int>& ancillas);

// Relative-phase Toffolis (diagonal phase error on the controls).
void emit_rccx(CircuitBlock& c, int c1, int c2, int t, bool inverse = false);
void emit_rcccx(CircuitBlock& c, int c1, int c2, int c3, int t, bool inverse = false);

// Clifford+T lowering of a control-generation circuit using paired Toffolis.
CircuitBlock lower_select_cliffordT(const CircuitBlock& c);

}  // namespace hamsim

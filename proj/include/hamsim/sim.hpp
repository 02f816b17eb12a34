#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hamsim/circuit.hpp"
#include "hamsim/model.hpp"
#include "hamsim/pf.hpp"

namespace hamsim {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;

// Qubit q of an m-qubit register is bit (m-1-q) of the basis index.
void apply_gate(cplx* psi, int qubits, const Gate& g);
void apply_circuit(CVector& psi, const CircuitBlock& c);

// Basis state with the given qubits set.
CVector basis_state(int qubits, const std::vector<int>& ones = {});

// Dense unitary of a circuit; Repeat bodies are raised to their count by squaring.
CMatrix circuit_unitary(const CircuitBlock& c);

CMatrix exact_evolution(const SpinChainHamiltonian& H, double t);

// Largest singular value of A - B.
double spectral_distance(const CMatrix& A, const CMatrix& B);
// Same after removing the global phase of B that best matches A.
double spectral_distance_up_to_phase(const CMatrix& A, const CMatrix& B);

CMatrix matrix_power(const CMatrix& U, std::uint64_t k);

// Product-formula unitary with r segments of length t/r, built from the term
// exponentials directly (equal to the synthesized circuit's unitary).
CMatrix pf_segment_unitary(const SpinChainHamiltonian& H, int order, double dt);
CMatrix pf_unitary(const SpinChainHamiltonian& H, int order, double t, std::uint64_t r);
double pf_error(const SpinChainHamiltonian& H, int order, double t, std::uint64_t r, const CMatrix& exact);

// Smallest r whose product formula is within epsilon of exact evolution. A
// nonzero hint starts the bracketing there instead of doubling from 1.
std::uint64_t empirical_r_search(const SpinChainHamiltonian& H, int order, double t, double epsilon,
                                 std::uint64_t hint = 0);

struct FitResult {
    double c = 0.0;
    double gamma = 0.0;
    double residual = 0.0;  // sum of squared log residuals
    std::vector<std::pair<double, double>> points;
};
FitResult powerlaw_fit(const std::vector<std::pair<double, double>>& points);

// Threads used by dense kernels; HAMSIM_THREADS overrides the default.
int sim_threads();

}  // namespace hamsim

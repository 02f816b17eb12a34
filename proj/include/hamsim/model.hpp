#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace hamsim {

enum class Axis : std::uint8_t { X, Y, Z };

struct PauliTerm {
    double coeff = 0.0;
    Axis axis = Axis::Z;
    int site0 = 0;
    int site1 = -1;  // -1 for a single-site term

    bool two_site() const { return site1 >= 0; }
    bool touches(int site) const { return site0 == site || site1 == site; }
};

struct SpinChainHamiltonian {
    int n = 0;
    double h_max = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> h;
    std::vector<PauliTerm> terms;
    double alpha = 0.0;
    double lambda = 1.0;

    std::size_t size() const { return terms.size(); }
};

class InvalidSize : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using CMatrix = Eigen::MatrixXcd;

SpinChainHamiltonian build_hamiltonian(int n, double h_max, std::uint64_t seed);
SpinChainHamiltonian hamiltonian_from_fields(const std::vector<double>& h, double h_max = 1.0,
                                             std::uint64_t seed = 0);

bool terms_commute(const PauliTerm& a, const PauliTerm& b);

// Dense matrix for site-0-as-most-significant-bit ordering.
CMatrix term_matrix(const PauliTerm& term, int n);
CMatrix hamiltonian_matrix(const SpinChainHamiltonian& H);

int dense_cap();
void set_dense_cap(int qubits);

}  // namespace hamsim

#include "hamsim/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>

namespace hamsim {

namespace {
std::atomic<int> g_dense_cap{12};
}

int dense_cap() { return g_dense_cap.load(); }
void set_dense_cap(int qubits) { g_dense_cap.store(qubits); }

SpinChainHamiltonian hamiltonian_from_fields(const std::vector<double>& h, double h_max, std::uint64_t seed) {
    const int n = static_cast<int>(h.size());
    if (n < 3) throw InvalidSize("chain needs at least 3 sites, got " + std::to_string(n));
    SpinChainHamiltonian H;
    H.n = n;
    H.h_max = h_max;
    H.seed = seed;
    H.h = h;
    H.terms.reserve(static_cast<std::size_t>(4 * n));
    for (Axis a : {Axis::X, Axis::Y, Axis::Z})
        for (int j = 0; j < n; ++j) H.terms.push_back({1.0, a, j, (j + 1) % n});
    for (int j = 0; j < n; ++j) H.terms.push_back({h[static_cast<std::size_t>(j)], Axis::Z, j, -1});
    double sum_abs = 0.0, max_abs = 0.0;
    for (double v : h) {
        sum_abs += std::abs(v);
        max_abs = std::max(max_abs, std::abs(v));
    }
    H.alpha = 3.0 * n + sum_abs;
    H.lambda = std::max({1.0, h_max, max_abs});
    return H;
}

SpinChainHamiltonian build_hamiltonian(int n, double h_max, std::uint64_t seed) {
    if (n < 3) throw InvalidSize("chain needs at least 3 sites, got " + std::to_string(n));
    if (h_max < 0) throw std::invalid_argument("h_max must be nonnegative");
    std::mt19937_64 rng(seed);
    std::vector<double> h(static_cast<std::size_t>(n));
    // Scaled 53-bit uniform keeps the draw identical across standard libraries.
    for (auto& v : h) {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v = h_max * (2.0 * u - 1.0);
    }
    return hamiltonian_from_fields(h, h_max, seed);
}

bool terms_commute(const PauliTerm& a, const PauliTerm& b) {
    int clashes = 0;
    for (int sa : {a.site0, a.site1}) {
        if (sa < 0) continue;
        for (int sb : {b.site0, b.site1})
            if (sb == sa && a.axis != b.axis) ++clashes;
    }
    return clashes % 2 == 0;
}

namespace {

CMatrix pauli(Axis a) {
    using C = std::complex<double>;
    CMatrix m(2, 2);
    switch (a) {
        case Axis::X: m << 0, 1, 1, 0; break;
        case Axis::Y: m << 0, C(0, -1), C(0, 1), 0; break;
        case Axis::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

}  // namespace

CMatrix term_matrix(const PauliTerm& term, int n) {
    if (n > dense_cap()) throw InvalidSize("dense matrix above cap of " + std::to_string(dense_cap()) + " qubits");
    const Eigen::Index dim = Eigen::Index(1) << n;
    CMatrix m = CMatrix::Zero(dim, dim);
    const CMatrix P = pauli(term.axis);
    // Site s maps to bit (n-1-s) of the basis index.
    for (Eigen::Index col = 0; col < dim; ++col) {
        Eigen::Index row = col;
        std::complex<double> amp = term.coeff;
        for (int s : {term.site0, term.site1}) {
            if (s < 0) continue;
            int bit = n - 1 - s;
            int in = static_cast<int>((col >> bit) & 1);
            int out = (term.axis == Axis::Z) ? in : 1 - in;
            amp *= P(out, in);
            row ^= static_cast<Eigen::Index>(in ^ out) << bit;
        }
        m(row, col) += amp;
    }
    return m;
}

CMatrix hamiltonian_matrix(const SpinChainHamiltonian& H) {
    const Eigen::Index dim = Eigen::Index(1) << H.n;
    if (H.n > dense_cap()) throw InvalidSize("dense matrix above cap");
    CMatrix m = CMatrix::Zero(dim, dim);
    for (const auto& t : H.terms) m += term_matrix(t, H.n);
    return m;
}

}  // namespace hamsim

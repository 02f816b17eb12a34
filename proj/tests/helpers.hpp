#pragma once

#include <cstdint>
#include <random>

#include "hamsim/circuit.hpp"

namespace testutil {

inline std::uint64_t u64(hamsim::u128 v) { return static_cast<std::uint64_t>(v); }

// Random circuit over the full gate set, including Toffolis with mixed polarity.
inline hamsim::CircuitBlock random_circuit(int qubits, int gates, std::uint64_t seed, bool toffoli = true) {
    using namespace hamsim;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> kind(0, toffoli ? kGateKinds - 1 : kGateKinds - 2);
    std::uniform_int_distribution<int> qd(0, qubits - 1);
    std::uniform_real_distribution<double> ang(-3.0, 3.0);
    CircuitBlock c(qubits);
    while (static_cast<int>(c.items.size()) < gates) {
        auto k = static_cast<GateKind>(kind(rng));
        int a = qd(rng), b = qd(rng), d = qd(rng);
        switch (k) {
            case GateKind::CNOT:
            case GateKind::CZ:
                if (a == b) continue;
                c.add(k == GateKind::CNOT ? gates::cnot(a, b) : gates::cz(a, b));
                break;
            case GateKind::Toffoli:
                if (a == b || b == d || a == d) continue;
                c.add(gates::toffoli(a, b, d, rng() & 1, rng() & 1));
                break;
            case GateKind::Rz: c.add(gates::rz(a, ang(rng))); break;
            default: {
                Gate g;
                g.kind = k;
                g.q = {a, -1, -1};
                c.add(g);
            }
        }
    }
    return c;
}

}  // namespace testutil

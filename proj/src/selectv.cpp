#include "hamsim/selectv.hpp"

#include <stdexcept>

#include "hamsim/optim.hpp"

namespace hamsim {

void ControlledPauli::emit(CircuitBlock& c, int control) const {
    switch (phase) {
        case Phase::One: break;
        case Phase::MinusOne: c.add(gates::z(control)); break;
        case Phase::I: c.add(gates::s(control)); break;
        case Phase::MinusI: c.add(gates::sdg(control)); break;
    }
    for (auto [q, a] : paulis) {
        switch (a) {
            case Axis::X: c.add(gates::cnot(control, q)); break;
            case Axis::Y:
                c.add(gates::sdg(q));
                c.add(gates::cnot(control, q));
                c.add(gates::s(q));
                break;
            case Axis::Z:
                c.add(gates::h(q));
                c.add(gates::cnot(control, q));
                c.add(gates::h(q));
                break;
        }
    }
}

int select_width(int gamma) {
    if (gamma < 1) throw std::invalid_argument("select needs gamma >= 1");
    int w = 0;
    while ((1LL << w) < gamma) ++w;
    return w;
}

int select_ancillas(int w, bool extra_control) { return extra_control ? w : std::max(0, w - 1); }

namespace {

class Walk {
public:
    Walk(CircuitBlock& c, const SelectSpec& s) : c_(c), s_(s), extra_(s.extra_control >= 0) {}

    void run() {
        const int w = s_.w;
        if (!extra_) c_.add(gates::x(x(1)));
        for (int d = first_real(); d <= w; ++d) edge(d, 0);
        fire(0);
        for (int j = 0; j + 1 < s_.gamma; ++j) {
            int ones = 0;
            while ((j >> ones) & 1) ++ones;
            const int e = w - 1 - ones;  // depth of the common ancestor of leaves j, j+1
            if (e == w - 1) {
                red(w);
            } else {
                for (int d = w; d >= e + 3; --d) edge(d, 1);
                green(e);
                for (int d = e + 3; d <= w; ++d) edge(d, 0);
            }
            fire(j + 1);
        }
        const int last = s_.gamma - 1;
        for (int d = w; d >= first_real(); --d) edge(d, bit(last, d));
        if (!extra_ && bit(last, 1) == 0) c_.add(gates::x(x(1)));
    }

private:
    int x(int d) const { return s_.control[static_cast<std::size_t>(d - 1)]; }
    int bit(int leaf, int d) const { return (leaf >> (s_.w - d)) & 1; }
    int first_real() const { return extra_ ? 1 : 2; }
    // Qubit holding the product of the first d literals.
    int q(int d) const {
        if (d == 0) return s_.extra_control;
        if (extra_) return s_.ancillas[static_cast<std::size_t>(d - 1)];
        if (d == 1) return x(1);
        return s_.ancillas[static_cast<std::size_t>(d - 2)];
    }
    // q(d) ^= q(d-1) AND literal(x_d); right-hand literal is x_d, left-hand is its negation.
    void edge(int d, int right) { c_.add(gates::toffoli(q(d - 1), x(d), q(d), true, right != 0)); }
    // Switch q(d) between the two children of its parent.
    void red(int d) {
        if (d == 1 && !extra_) c_.add(gates::x(x(1)));
        else c_.add(gates::cnot(q(d - 1), q(d)));
    }
    // Moves from the rightmost depth-(e+2) node under the left child of the
    // depth-e ancestor to the leftmost one under its right child.
    void green(int e) {
        if (e == 0 && !extra_) {
            c_.add(gates::x(x(1)));
            c_.add(gates::cnot(x(1), q(2)));
            c_.add(gates::cnot(x(2), q(2)));
            return;
        }
        c_.add(gates::cnot(q(e + 1), q(e + 2)));
        c_.add(gates::toffoli(q(e), x(e + 2), q(e + 2), true, false));
        red(e + 1);
    }
    void fire(int leaf) {
        if (s_.targets.empty()) return;
        s_.targets[static_cast<std::size_t>(leaf)].emit(c_, q(s_.w));
    }

    CircuitBlock& c_;
    const SelectSpec& s_;
    bool extra_;
};

}  // namespace

void emit_select(CircuitBlock& c, const SelectSpec& spec) {
    if (spec.w < 1) throw std::invalid_argument("select needs w >= 1");
    if (spec.gamma < 1 || spec.gamma > (1 << spec.w)) throw std::invalid_argument("gamma out of range for w");
    if (static_cast<int>(spec.control.size()) != spec.w) throw std::invalid_argument("control register size != w");
    if (!spec.targets.empty() && static_cast<int>(spec.targets.size()) != spec.gamma)
        throw std::invalid_argument("target count does not match gamma");
    if (static_cast<int>(spec.ancillas.size()) < select_ancillas(spec.w, spec.extra_control >= 0))
        throw std::invalid_argument("not enough walk ancillas");
    Walk(c, spec).run();
}

CircuitBlock synth_select(const SelectSpec& spec, int total_qubits) {
    CircuitBlock c(total_qubits);
    emit_select(c, spec);
    return c;
}

std::vector<ControlledPauli> hamiltonian_targets(const SpinChainHamiltonian& H, int first_system_qubit,
                                                 bool minus_i) {
    std::vector<ControlledPauli> out;
    out.reserve(H.terms.size());
    for (const auto& t : H.terms) {
        ControlledPauli p;
        const bool neg = t.coeff < 0;
        if (minus_i) p.phase = neg ? ControlledPauli::Phase::I : ControlledPauli::Phase::MinusI;
        else p.phase = neg ? ControlledPauli::Phase::MinusOne : ControlledPauli::Phase::One;
        p.paulis.emplace_back(first_system_qubit + t.site0, t.axis);
        if (t.two_site()) p.paulis.emplace_back(first_system_qubit + t.site1, t.axis);
        out.push_back(std::move(p));
    }
    return out;
}

void emit_rccx(CircuitBlock& c, int c1, int c2, int t, bool inv) {
    CircuitBlock b(c.qubits);
    b.add(gates::h(t));
    b.add(gates::t(t));
    b.add(gates::cnot(c2, t));
    b.add(gates::tdg(t));
    b.add(gates::cnot(c1, t));
    b.add(gates::t(t));
    b.add(gates::cnot(c2, t));
    b.add(gates::tdg(t));
    b.add(gates::h(t));
    c.append(inv ? inverse(b) : b);
}

void emit_rcccx(CircuitBlock& c, int c1, int c2, int c3, int t, bool inv) {
    CircuitBlock b(c.qubits);
    b.add(gates::h(t));
    b.add(gates::t(t));
    b.add(gates::cnot(c3, t));
    b.add(gates::tdg(t));
    b.add(gates::h(t));
    b.add(gates::cnot(c1, t));
    b.add(gates::t(t));
    b.add(gates::cnot(c2, t));
    b.add(gates::tdg(t));
    b.add(gates::cnot(c1, t));
    b.add(gates::t(t));
    b.add(gates::cnot(c2, t));
    b.add(gates::tdg(t));
    b.add(gates::h(t));
    b.add(gates::t(t));
    b.add(gates::cnot(c3, t));
    b.add(gates::tdg(t));
    b.add(gates::h(t));
    c.append(inv ? inverse(b) : b);
}

int mcx_ancillas(int controls) { return controls <= 2 ? 0 : (controls - 1) / 2; }

void emit_mcx(CircuitBlock& c, const std::vector<int>& ctl, int target, const std::vector<int>& anc) {
    const int k = static_cast<int>(ctl.size());
    if (k == 0) {
        c.add(gates::x(target));
        return;
    }
    if (k == 1) {
        c.add(gates::cnot(ctl[0], target));
        return;
    }
    if (k == 2) {
        c.add(gates::toffoli(ctl[0], ctl[1], target));
        return;
    }
    const int need = mcx_ancillas(k);
    if (static_cast<int>(anc.size()) < need) throw std::invalid_argument("not enough ancillas for multi-controlled X");
    // Accumulate the first k-1 controls into anc[need-1], then one exact Toffoli.
    CircuitBlock chain(c.qubits);
    int used = 0;
    if ((k - 1) % 2 == 0) {
        emit_rccx(chain, ctl[0], ctl[1], anc[0]);
        used = 2;
    } else {
        emit_rcccx(chain, ctl[0], ctl[1], ctl[2], anc[0]);
        used = 3;
    }
    for (int a = 1; a < need; ++a) {
        emit_rcccx(chain, anc[static_cast<std::size_t>(a - 1)], ctl[static_cast<std::size_t>(used)],
                   ctl[static_cast<std::size_t>(used + 1)], anc[static_cast<std::size_t>(a)]);
        used += 2;
    }
    c.append(chain);
    c.add(gates::toffoli(anc[static_cast<std::size_t>(need - 1)], ctl[static_cast<std::size_t>(k - 1)], target));
    c.append_inverse(chain);
}

void emit_mcz(CircuitBlock& c, const std::vector<int>& qubits, const std::vector<int>& anc) {
    if (qubits.empty()) throw std::invalid_argument("multi-controlled Z needs a qubit");
    if (qubits.size() == 1) {
        c.add(gates::z(qubits[0]));
        return;
    }
    const int t = qubits.back();
    std::vector<int> ctl(qubits.begin(), qubits.end() - 1);
    if (ctl.size() == 1) {
        c.add(gates::h(t));
        c.add(gates::cnot(ctl[0], t));
        c.add(gates::h(t));
        return;
    }
    c.add(gates::h(t));
    emit_mcx(c, ctl, t, anc);
    c.add(gates::h(t));
}

CircuitBlock lower_select_cliffordT(const CircuitBlock& c) { return lower_toffolis(c, true); }

}  // namespace hamsim

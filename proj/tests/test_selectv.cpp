#include <doctest.h>

#include <random>

#include "hamsim/optim.hpp"
#include "hamsim/selectv.hpp"
#include "hamsim/sim.hpp"
#include "helpers.hpp"

using namespace hamsim;
using testutil::u64;

namespace {

struct Layout {
    SelectSpec spec;
    int total = 0;
    std::vector<int> targets;
};

Layout make_layout(int w, int gamma, bool extra, int target_qubits, std::uint64_t seed) {
    Layout l;
    int next = 0;
    l.spec.w = w;
    l.spec.gamma = gamma;
    if (extra) l.spec.extra_control = next++;
    for (int i = 0; i < w; ++i) l.spec.control.push_back(next++);
    for (int i = 0; i < select_ancillas(w, extra); ++i) l.spec.ancillas.push_back(next++);
    for (int i = 0; i < target_qubits; ++i) l.targets.push_back(next++);
    l.total = next;
    if (target_qubits == 0) return l;
    std::mt19937_64 rng(seed);
    for (int j = 0; j < gamma; ++j) {
        ControlledPauli p;
        p.phase = static_cast<ControlledPauli::Phase>(rng() % 4);
        for (int q : l.targets) {
            int a = static_cast<int>(rng() % 4);
            if (a < 3) p.paulis.emplace_back(q, static_cast<Axis>(a));
        }
        l.spec.targets.push_back(p);
    }
    return l;
}

// Applies target j directly, as an uncontrolled operator.
void apply_target(CVector& psi, int total, const ControlledPauli& p) {
    CircuitBlock c(total);
    for (auto [q, a] : p.paulis) c.add(a == Axis::X ? gates::x(q) : a == Axis::Y ? gates::y(q) : gates::z(q));
    apply_circuit(psi, c);
    const cplx ph[] = {1.0, -1.0, cplx(0, 1), cplx(0, -1)};
    psi *= ph[static_cast<int>(p.phase)];
}

// Checks c against the select oracle on every input with clean ancillas.
void check_select(const Layout& l, const CircuitBlock& c) {
    const int w = l.spec.w;
    const bool extra = l.spec.extra_control >= 0;
    const int nt = static_cast<int>(l.targets.size());
    for (int e = 0; e < (extra ? 2 : 1); ++e) {
        for (int j = 0; j < (1 << w); ++j) {
            for (int tv = 0; tv < (1 << nt); ++tv) {
                std::vector<int> ones;
                if (extra && e) ones.push_back(l.spec.extra_control);
                for (int d = 0; d < w; ++d)
                    if ((j >> (w - 1 - d)) & 1) ones.push_back(l.spec.control[static_cast<std::size_t>(d)]);
                for (int k = 0; k < nt; ++k)
                    if ((tv >> (nt - 1 - k)) & 1) ones.push_back(l.targets[static_cast<std::size_t>(k)]);
                CVector in = basis_state(l.total, ones);
                CVector out = in;
                apply_circuit(out, c);
                CVector want = in;
                if ((!extra || e) && j < l.spec.gamma) apply_target(want, l.total, l.spec.targets[static_cast<std::size_t>(j)]);
                CHECK((out - want).norm() < 1e-10);
            }
        }
    }
}

}  // namespace

TEST_CASE("NCT control generation counts") {
    for (int w = 3; w <= 5; ++w) {
        auto l = make_layout(w, 1 << w, false, 0, 0);
        auto k = count_gates(synth_select(l.spec, l.total));
        const std::uint64_t p = 1ULL << w;
        CHECK(u64(k[GateKind::X]) == 2);
        CHECK(u64(k[GateKind::CNOT]) == 3 * p / 2 - 2);
        CHECK(u64(k[GateKind::Toffoli]) == 3 * p / 2 - 4);
        CHECK(static_cast<int>(l.spec.ancillas.size()) == w - 1);
    }
}

TEST_CASE("Clifford+T control generation counts") {
    for (int w = 3; w <= 5; ++w) {
        auto l = make_layout(w, 1 << w, false, 0, 0);
        auto k = count_gates(lower_select_cliffordT(synth_select(l.spec, l.total)));
        const std::int64_t p = 1LL << w;
        CHECK(static_cast<std::int64_t>(k.t_count()) == 15 * p / 2 + 6 * w - 28);
        CHECK(static_cast<std::int64_t>(k[GateKind::CNOT]) == 15 * p / 2 + 6 * w - 26);
        CHECK(static_cast<std::int64_t>(k[GateKind::H]) == 2 * p + 2 * w - 8);
        CHECK(static_cast<std::int64_t>(k.phase_count()) == p / 2 - w);
        CHECK(u64(k[GateKind::Toffoli]) == 0);
    }
}

TEST_CASE("Toffoli count approaches 1.5x the lower bound") {
    double prev = 1e9;
    for (int w = 3; w <= 20; ++w) {
        const double lower = std::pow(2.0, w) - w - 1;
        const double ratio = (1.5 * std::pow(2.0, w) - 4) / lower;
        CHECK(ratio < prev);
        CHECK(ratio <= 1.5 + 1.5 * (w + 1) / lower);
        prev = ratio;
    }
    CHECK(prev == doctest::Approx(1.5).epsilon(1e-4));
}

TEST_CASE("select matches the direct operator") {
    for (int w = 2; w <= 3; ++w) {
        for (int gamma : {1 << w, (1 << w) - 1, (1 << (w - 1)) + 1}) {
            auto l = make_layout(w, gamma, false, 2, 100 + w + gamma);
            auto c = synth_select(l.spec, l.total);
            check_select(l, c);
            check_select(l, lower_select_cliffordT(c));
        }
    }
}

TEST_CASE("controlled select matches the direct operator") {
    for (int w = 1; w <= 3; ++w) {
        for (int gamma : {1 << w, (1 << w) - 1}) {
            if (gamma < 1) continue;
            auto l = make_layout(w, gamma, true, 2, 7 * w + gamma);
            auto c = synth_select(l.spec, l.total);
            check_select(l, c);
            check_select(l, lower_select_cliffordT(c));
        }
    }
}

TEST_CASE("controlled walk cost") {
    for (int w = 2; w <= 5; ++w) {
        auto l = make_layout(w, 1 << w, true, 0, 0);
        auto k = count_gates(synth_select(l.spec, l.total));
        CHECK(u64(k[GateKind::Toffoli]) == 3 * (1ULL << w) / 2 - 1);
        CHECK(static_cast<int>(l.spec.ancillas.size()) == w);
    }
}

TEST_CASE("multi-controlled X") {
    for (int k = 1; k <= 7; ++k) {
        const int anc = mcx_ancillas(k);
        const int total = k + 1 + anc;
        std::vector<int> ctl;
        for (int i = 0; i < k; ++i) ctl.push_back(i);
        std::vector<int> ancillas;
        for (int i = 0; i < anc; ++i) ancillas.push_back(k + 1 + i);
        CircuitBlock c(total);
        emit_mcx(c, ctl, k, ancillas);
        CircuitBlock low = lower_toffolis(c, false);
        for (int v = 0; v < (1 << (k + 1)); ++v) {
            std::vector<int> ones;
            for (int i = 0; i <= k; ++i)
                if ((v >> i) & 1) ones.push_back(i);
            CVector in = basis_state(total, ones);
            CVector out = in;
            apply_circuit(out, low);
            std::vector<int> want = ones;
            if (v % (1 << k) == (1 << k) - 1) {
                if ((v >> k) & 1) want.pop_back();
                else want.push_back(k);
            }
            CHECK((out - basis_state(total, want)).norm() < 1e-10);
        }
        if (k >= 3) {
            auto cnt = count_gates(low);
            CHECK(u64(cnt[GateKind::CNOT]) == static_cast<std::uint64_t>(6 * k - 6));
            CHECK(u64(cnt.t_count()) == static_cast<std::uint64_t>(8 * k - 9));
        }
    }
}

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include <doctest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "helpers.hpp"
#include "hamsim/prep.hpp"
#include "hamsim/qsp.hpp"
#include "hamsim/selectv.hpp"
#include "hamsim/sim.hpp"

using namespace hamsim;

namespace {

// <0_anc| C |0_anc> on the system qubits, which occupy the top of the register.
CMatrix postselected_block(const CircuitBlock& c, int n) {
    const int shift = c.qubits - n;
    const Eigen::Index dim = Eigen::Index(1) << n;
    CMatrix out(dim, dim);
    for (Eigen::Index x = 0; x < dim; ++x) {
        CVector psi = CVector::Zero(Eigen::Index(1) << c.qubits);
        psi(x << shift) = 1.0;
        apply_circuit(psi, c);
        for (Eigen::Index y = 0; y < dim; ++y) out(y, x) = psi(y << shift);
    }
    return out;
}

// V sequence built from its definition, on b (x) register (x) system.
CMatrix dense_qsp_block(const SpinChainHamiltonian& H, const std::vector<double>& phases) {
    const int n = H.n;
    const int w = select_width(static_cast<int>(H.size()));
    const Eigen::Index ds = Eigen::Index(1) << n, dr = Eigen::Index(1) << w, da = dr * ds;
    const auto g = qsp_g_amplitudes(H);

    CMatrix sel = CMatrix::Zero(da, da);
    for (Eigen::Index l = 0; l < dr; ++l) {
        CMatrix blk = CMatrix::Identity(ds, ds);
        if (static_cast<std::size_t>(l) < H.size()) {
            PauliTerm unit = H.terms[static_cast<std::size_t>(l)];
            unit.coeff = unit.coeff < 0 ? -1.0 : 1.0;
            blk = term_matrix(unit, n);
        }
        sel.block(l * ds, l * ds, ds, ds) = blk;
    }
    Eigen::VectorXd gv(dr);
    for (Eigen::Index i = 0; i < dr; ++i) gv(i) = g[static_cast<std::size_t>(i)];
    CMatrix refl_r = 2.0 * (gv * gv.transpose()).cast<cplx>() - CMatrix::Identity(dr, dr);
    CMatrix refl = Eigen::kroneckerProduct(refl_r, CMatrix::Identity(ds, ds));
    CMatrix miq = cplx(0, -1) * refl * sel;

    const double h = 1.0 / std::sqrt(2.0);
    CMatrix plus(2, 2), minus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    minus << 0.5, -0.5, -0.5, 0.5;
    CVector state = CVector::Zero(2 * da);
    CMatrix inputs = CMatrix::Zero(2 * da, ds);
    for (Eigen::Index x = 0; x < ds; ++x)
        for (Eigen::Index l = 0; l < dr; ++l) {
            inputs(l * ds + x, x) = h * g[static_cast<std::size_t>(l)];
            inputs(da + l * ds + x, x) = h * g[static_cast<std::size_t>(l)];
        }
    CMatrix psi = inputs;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const bool dagger = i % 2 == 1;
        const double phi = dagger ? phases[i] + std::numbers::pi : phases[i];
        CMatrix core = Eigen::kroneckerProduct(plus, CMatrix::Identity(da, da)) + Eigen::kroneckerProduct(minus, miq);
        if (dagger) core = core.adjoint().eval();
        CMatrix rz = CMatrix::Zero(2, 2);
        rz(0, 0) = std::exp(cplx(0, -phi / 2));
        rz(1, 1) = std::exp(cplx(0, phi / 2));
        CMatrix outer = Eigen::kroneckerProduct(rz, CMatrix::Identity(da, da));
        psi = outer * core * outer.adjoint() * psi;
    }
    return inputs.adjoint() * psi;
}

std::string data_file(const char* name) { return std::string(HAMSIM_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("segment counts") {
    auto p = plan_qsp_segmented(13, 13, 1e-3);
    CHECK(p.r == 147);
    CHECK(p.iterates() == 4116);
    CHECK(p.q() == 15);
    CHECK(plan_qsp_segmented(51, 51, 1e-3).iterates() == 76776);
    for (int n : {5, 13, 30}) {
        const auto r = qsp_segments(n, n, 1e-3);
        const double at = 4.0 * n * n;
        CHECK(ja_analytic_tail(at / double(r), 15) <= 1e-3 / (8.0 * double(r)));
        CHECK(ja_analytic_tail(at / double(r - 1), 15) > 1e-3 / (8.0 * double(r - 1)));
    }
}

TEST_CASE("segment count follows the closed form") {
    for (int n = 10; n <= 100; ++n) {
        const double closed = std::ceil(0.6010 * std::pow(double(n), 15.0 / 7.0));
        CHECK(std::abs(double(qsp_segments(n, n, 1e-3)) - closed) <= 1.0);
    }
}

TEST_CASE("full-mode iterate counts are minimal") {
    for (int n : {6, 10, 14}) {
        const double at = 4.0 * n * n;
        const int ma = qsp_full_M(n, n, 1e-3, JaBound::Analytic);
        CHECK(ma % 2 == 0);
        CHECK(8 * ja_analytic_tail(at, ma / 2 + 1) <= 1e-3);
        CHECK(8 * ja_analytic_tail(at, ma / 2) > 1e-3);
        const int me = qsp_full_M(n, n, 1e-3, JaBound::Empirical);
        CHECK(me < ma);
        CHECK(8 * ja_bessel_tail(at, me / 2 + 1) <= 1e-3);
        CHECK(8 * ja_bessel_tail(at, me / 2) > 1e-3);
        CHECK(std::abs(me - qsp_empirical_fit_M(n)) / me < 0.05);
    }
    // Values at n = 10 with the truncation order q = M/2 + 1.
    CHECK(qsp_full_M(10, 10, 1e-3, JaBound::Analytic) == 1098);
    CHECK(qsp_full_M(10, 10, 1e-3, JaBound::Empirical) == 858);
}

TEST_CASE("Bessel tail matches direct evaluation") {
    for (double x : {0.5, 3.0, 40.0}) {
        for (int q : {1, 5, 30, 60}) {
            double direct = 0;
            for (int k = q; k < q + 200; ++k) direct += std::abs(std::cyl_bessel_j(double(k), x));
            CHECK(ja_bessel_tail(x, q) == doctest::Approx(2 * direct).epsilon(1e-8).scale(1e-300));
            if (q > x) CHECK(ja_bessel_tail(x, q) < ja_analytic_tail(x, q));
        }
    }
}

TEST_CASE("success probability") {
    CHECK(qsp_success_lb(1e-3) == doctest::Approx(0.998));
    CHECK(qsp_success_lb(0.0) == 1.0);
    CHECK(qsp_success_lb(1e-2) < qsp_success_lb(1e-3));
}

TEST_CASE("qubit layout") {
    CHECK(qsp_qubits(50) == 67);
    const auto l = qsp_layout(13);
    CHECK(l.w == 6);
    CHECK(l.total == 13 + 1 + 6 + 6);
}

TEST_CASE("G amplitudes carry the deficit on a spare index") {
    auto H = build_hamiltonian(5, 1.0, 2);
    const auto g = qsp_g_amplitudes(H);
    double norm = 0;
    for (double a : g) norm += a * a;
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g[20] * g[20] == doctest::Approx(1.0 - H.alpha / 20.0));
    CHECK(qsp_block_alpha(H) == 20.0);
    // Full register: normalized by the realized alpha.
    auto H4 = build_hamiltonian(4, 1.0, 2);
    CHECK(qsp_block_alpha(H4) == H4.alpha);
}

TEST_CASE("placeholder phases are refused in segmented mode") {
    auto H = build_hamiltonian(4, 1.0, 1);
    auto p = plan_qsp_segmented(4, 4, 1e-3);
    CHECK_THROWS_AS(synth_qsp(H, p), std::invalid_argument);
    use_placeholder_angles(p, 7);
    CHECK_THROWS_AS(synth_qsp(H, p), PlaceholderAngles);
    auto f = plan_qsp_full(4, 4, 1e-3, JaBound::Empirical);
    use_placeholder_angles(f, 7);
    CHECK(synth_qsp(H, f).qubits == qsp_qubits(4));
    f.angles[0].pop_back();
    CHECK_THROWS_AS(synth_qsp(H, f), std::invalid_argument);
    CHECK(placeholder_angles(10, 3) == placeholder_angles(10, 3));
}

TEST_CASE("angle files round trip") {
    const auto path = (std::filesystem::temp_directory_path() / "hamsim_angles_test.json").string();
    std::vector<std::vector<double>> a{{0.1, -0.2, 3.5, 1e-9}, {1, 2, 3, 4}};
    write_angle_file(path, a);
    CHECK(read_angle_file(path) == a);
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("{\"angles\": 3}", f);
    std::fclose(f);
    CHECK_THROWS_AS(read_angle_file(path), std::runtime_error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_angle_file(path), std::runtime_error);
}

TEST_CASE("prepare and unprepare appear M/2 + 1 times each per segment") {
    auto H = build_hamiltonian(6, 1.0, 4);
    const auto l = qsp_layout(6);
    const int M = 6;
    auto seg = qsp_segment(H, l, placeholder_angles(M, 1));

    SelectSpec spec;
    spec.w = l.w;
    spec.gamma = static_cast<int>(H.size());
    spec.control = l.reg;
    spec.targets = hamiltonian_targets(H, l.system.front(), false);
    spec.extra_control = l.b;
    spec.ancillas.assign(l.pool.begin(), l.pool.begin() + select_ancillas(l.w, true));
    CircuitBlock sel(l.total), mcz(l.total), ug(l.total);
    emit_select(sel, spec);
    std::vector<int> refl{l.b};
    refl.insert(refl.end(), l.reg.begin(), l.reg.end());
    emit_mcz(mcz, refl, l.pool);
    emit_generic_state_prep(ug, l.reg, qsp_g_amplitudes(H));

    auto cnot = [](const CircuitBlock& c) { return testutil::u64(count_gates(c)[GateKind::CNOT]); };
    CHECK(cnot(seg) == M * (cnot(sel) + cnot(mcz)) + 2 * (M / 2 + 1) * cnot(ug));
    CHECK(cnot(ug) == (std::uint64_t(2) << l.w) - 4);
    // One Rz pair on the phase qubit per iterate.
    CHECK(testutil::u64(count_gates(seg)[GateKind::Rz]) >= std::uint64_t(2 * M));
}

TEST_CASE("segment circuit equals the phased-iterate sequence") {
    for (auto [n, seed] : {std::pair{3, 5}, std::pair{4, 9}}) {
        auto H = build_hamiltonian(n, 1.0, static_cast<std::uint64_t>(seed));
        const auto l = qsp_layout(n);
        const auto phases = placeholder_angles(4, static_cast<std::uint64_t>(seed));
        auto seg = qsp_segment(H, l, phases);
        CHECK(spectral_distance(postselected_block(seg, n), dense_qsp_block(H, phases)) < 1e-10);

        // Pool ancillas are returned clean on every input.
        const int shift = l.total - n;
        for (int x = 0; x < (1 << n); ++x) {
            CVector psi = CVector::Zero(Eigen::Index(1) << l.total);
            psi(Eigen::Index(x) << shift) = 1.0;
            apply_circuit(psi, seg);
            double leak = 0;
            const Eigen::Index pool_mask = (Eigen::Index(1) << l.pool.size()) - 1;
            for (Eigen::Index i = 0; i < psi.size(); ++i)
                if (i & pool_mask) leak += std::norm(psi(i));
            CHECK(leak < 1e-20);
        }
    }
}

TEST_CASE("block encoding of the shifted Hamiltonian") {
    auto H = build_hamiltonian(3, 1.0, 6);
    const int w = select_width(static_cast<int>(H.size()));
    const auto g = qsp_g_amplitudes(H);
    const Eigen::Index ds = 8;
    CMatrix got = CMatrix::Zero(ds, ds);
    for (std::size_t l = 0; l < (std::size_t(1) << w); ++l) {
        CMatrix blk = CMatrix::Identity(ds, ds);
        if (l < H.size()) {
            PauliTerm unit = H.terms[l];
            unit.coeff = unit.coeff < 0 ? -1.0 : 1.0;
            blk = term_matrix(unit, 3);
        }
        got += g[l] * g[l] * blk;
    }
    const double a = qsp_block_alpha(H);
    CMatrix want = (hamiltonian_matrix(H) + (a - H.alpha) * CMatrix::Identity(ds, ds)) / a;
    CHECK(spectral_distance(got, want) < 1e-12);
}

TEST_CASE("genuine phases reproduce the evolution after postselection") {
    // Phases fitted for alpha * dt = 1 with M = 8 by tools/qsp_phases.py.
    const auto angles = read_angle_file(data_file("qsp_phases_M8_tau1.json"));
    REQUIRE(angles.size() == 1);
    REQUIRE(angles[0].size() == 8);
    auto H = build_hamiltonian(5, 1.0, 3);
    const double a = qsp_block_alpha(H);
    REQUIRE(a == 20.0);
    const double dt = 1.0 / a;
    const double bound = 8 * ja_analytic_tail(1.0, 5);

    QspPlan plan;
    plan.M = 8;
    plan.r = 1;
    plan.angles = angles;
    auto seg = synth_qsp(H, plan);
    CMatrix block = postselected_block(seg, 5);

    // The spare index shifts H by (a - alpha) I, a global phase.
    const CMatrix U = exact_evolution(H, dt) * std::exp(cplx(0, -(a - H.alpha) * dt));
    const double err = spectral_distance(block, U);
    MESSAGE("segment error " << err << " bound " << bound);
    CHECK(err <= bound);

    CMatrix four = block * block * block * block;
    CHECK(spectral_distance(four, U * U * U * U) <= 4 * bound);
}

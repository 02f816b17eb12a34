#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hamsim/circuit.hpp"
#include "hamsim/sim.hpp"
#include "helpers.hpp"

using namespace hamsim;

TEST_CASE("counts see through repeats without expanding") {
    CircuitBlock body(2);
    body.add(gates::cnot(0, 1));
    body.rz(1, 0.3);
    CircuitBlock c(2);
    c.add(gates::h(0));
    c.repeat(1'000'000'000'000ULL, body);
    auto k = count_gates(c);
    CHECK(testutil::u64(k[GateKind::CNOT]) == 1'000'000'000'000ULL);
    CHECK(testutil::u64(k[GateKind::H]) == 1);
    CHECK(testutil::u64(expanded_size(c)) == 2'000'000'000'001ULL);
    CHECK_THROWS_AS(expand(c), SizeError);
}

TEST_CASE("zero-angle rotations are dropped") {
    CircuitBlock c(1);
    c.rz(0, 0.0);
    CHECK(c.empty());
}

TEST_CASE("gate validation") {
    CircuitBlock c(2);
    CHECK_THROWS(c.add(gates::cnot(0, 0)));
    CHECK_THROWS(c.add(gates::h(2)));
    CHECK_THROWS(c.add(gates::rz(0, 0.0)));
}

TEST_CASE("text format round trip") {
    auto c = testutil::random_circuit(4, 60, 7);
    CircuitBlock outer(4);
    outer.add(gates::x(3));
    outer.repeat(5, c);
    const std::string text = serialize(outer);
    CircuitBlock back = deserialize(text);
    CHECK(back == outer);
    CHECK(serialize(back) == text);
}

TEST_CASE("parse errors carry the line number") {
    try {
        deserialize("QUBITS 2\nH 0\nCNOT 0 7\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
    CHECK_THROWS_AS(deserialize("QUBITS 2\nREPEAT 3 {\nH 0\n"), ParseError);
    CHECK_THROWS_AS(deserialize("QUBITS 2\nFOO 1\n"), ParseError);
}

TEST_CASE("inverse undoes a circuit") {
    auto c = testutil::random_circuit(3, 40, 11);
    CircuitBlock both = c;
    both.append_inverse(c);
    CMatrix U = circuit_unitary(both);
    CHECK(spectral_distance(U, CMatrix::Identity(8, 8)) < 1e-12);
}

TEST_CASE("single gates have their textbook matrices") {
    CircuitBlock h(1);
    h.add(gates::h(0));
    CMatrix U = circuit_unitary(h);
    const double r = 1 / std::sqrt(2.0);
    CHECK(std::abs(U(0, 0) - r) < 1e-15);
    CHECK(std::abs(U(1, 1) + r) < 1e-15);

    CircuitBlock body(1);
    body.rz(0, std::numbers::pi / 4);
    CircuitBlock rep(1);
    rep.repeat(4, body);
    CircuitBlock direct(1);
    direct.rz(0, std::numbers::pi);
    CHECK(spectral_distance(circuit_unitary(rep), circuit_unitary(direct)) < 1e-12);
}

TEST_CASE("qubit 0 is the most significant bit") {
    CircuitBlock c(3);
    c.add(gates::x(0));
    CVector psi = basis_state(3);
    apply_circuit(psi, c);
    CHECK(std::abs(psi(4) - 1.0) < 1e-15);
}

TEST_CASE("unitary columns match statevector runs") {
    auto c = testutil::random_circuit(3, 80, 5);
    CMatrix U = circuit_unitary(c);
    for (int b = 0; b < 8; ++b) {
        CVector psi = CVector::Zero(8);
        psi(b) = 1.0;
        apply_circuit(psi, c);
        CHECK((psi - U.col(b)).norm() < 1e-12);
    }
    CHECK((U.adjoint() * U - CMatrix::Identity(8, 8)).norm() < 1e-10);
}

TEST_CASE("dense cap is enforced") {
    CircuitBlock c(dense_cap() + 1);
    CHECK_THROWS_AS(circuit_unitary(c), InvalidSize);
}

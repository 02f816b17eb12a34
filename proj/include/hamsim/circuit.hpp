#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hamsim {

using u128 = unsigned __int128;

enum class GateKind : std::uint8_t { X, Y, Z, H, S, Sdg, T, Tdg, CNOT, CZ, Rz, Toffoli };
inline constexpr int kGateKinds = 12;

const char* gate_name(GateKind k);
int gate_arity(GateKind k);

// Toffoli polarity bits: bit 0 set => first control fires on |1>, bit 1 likewise
// for the second control. Other kinds ignore `pol`.
struct Gate {
    GateKind kind = GateKind::X;
    std::uint8_t pol = 3;
    std::array<std::int32_t, 3> q{-1, -1, -1};
    double theta = 0.0;

    int arity() const { return gate_arity(kind); }
    bool acts_on(int qubit) const;
    bool operator==(const Gate& o) const;
};

namespace gates {
Gate x(int q);
Gate y(int q);
Gate z(int q);
Gate h(int q);
Gate s(int q);
Gate sdg(int q);
Gate t(int q);
Gate tdg(int q);
Gate cnot(int c, int tgt);
Gate cz(int a, int b);
Gate rz(int q, double theta);
Gate toffoli(int c1, int c2, int tgt, bool pos1 = true, bool pos2 = true);
}  // namespace gates

struct CircuitBlock;

struct Repeat {
    std::uint64_t count = 1;
    std::shared_ptr<const CircuitBlock> body;
};

using Item = std::variant<Gate, Repeat>;

struct CircuitBlock {
    int qubits = 0;
    std::vector<Item> items;

    CircuitBlock() = default;
    explicit CircuitBlock(int nq) : qubits(nq) {}

    void add(const Gate& g);
    // Skips exact-zero angles.
    void rz(int q, double theta);
    void repeat(std::uint64_t count, CircuitBlock body);
    void repeat(std::uint64_t count, std::shared_ptr<const CircuitBlock> body);
    void append(const CircuitBlock& other);
    // Gates of `other` appended in reverse order with each gate inverted.
    void append_inverse(const CircuitBlock& other);
    bool empty() const { return items.empty(); }

    // Structural equality (repeat bodies compared by value).
    bool operator==(const CircuitBlock& o) const;
};

Gate inverse(const Gate& g);
CircuitBlock inverse(const CircuitBlock& c);

struct GateCounts {
    std::array<u128, kGateKinds> by_kind{};
    int qubits = 0;

    u128 operator[](GateKind k) const { return by_kind[static_cast<int>(k)]; }
    u128 total() const;
    u128 t_count() const { return (*this)[GateKind::T] + (*this)[GateKind::Tdg]; }
    u128 phase_count() const { return (*this)[GateKind::S] + (*this)[GateKind::Sdg]; }
    u128 pauli_count() const;
    // Single-qubit Cliffords: X, Y, Z, H, S, Sdg.
    u128 clifford1_count() const;
    GateCounts& operator+=(const GateCounts& o);
    GateCounts scaled(u128 k) const;
};

GateCounts count_gates(const CircuitBlock& c);
// Gates after full expansion, computed without expanding.
u128 expanded_size(const CircuitBlock& c);

class SizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& msg);
    int line;
};

std::vector<Gate> expand(const CircuitBlock& c, std::uint64_t cap = 50'000'000);
CircuitBlock from_gates(int qubits, const std::vector<Gate>& g);

std::string serialize(const CircuitBlock& c);
CircuitBlock deserialize(const std::string& text);

std::string to_string(u128 v);
// Exact when the value fits in a double's integer range, rounded otherwise.
double to_double(u128 v);

}  // namespace hamsim

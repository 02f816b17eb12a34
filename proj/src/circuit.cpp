#include "hamsim/circuit.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hamsim {

namespace {

constexpr std::array<const char*, kGateKinds> kNames = {"X",  "Y",    "Z",    "H",  "S",  "SDG",
                                                        "T",  "TDG",  "CNOT", "CZ", "RZ", "TOFFOLI"};

}  // namespace

const char* gate_name(GateKind k) { return kNames[static_cast<int>(k)]; }

int gate_arity(GateKind k) {
    switch (k) {
        case GateKind::CNOT:
        case GateKind::CZ:
            return 2;
        case GateKind::Toffoli:
            return 3;
        default:
            return 1;
    }
}

bool Gate::acts_on(int qubit) const {
    for (int i = 0; i < arity(); ++i)
        if (q[i] == qubit) return true;
    return false;
}

bool Gate::operator==(const Gate& o) const {
    if (kind != o.kind || q != o.q) return false;
    if (kind == GateKind::Rz) return theta == o.theta;
    if (kind == GateKind::Toffoli) return pol == o.pol;
    return true;
}

namespace gates {
namespace {
Gate one(GateKind k, int q) {
    Gate g;
    g.kind = k;
    g.q = {q, -1, -1};
    return g;
}
}  // namespace
Gate x(int q) { return one(GateKind::X, q); }
Gate y(int q) { return one(GateKind::Y, q); }
Gate z(int q) { return one(GateKind::Z, q); }
Gate h(int q) { return one(GateKind::H, q); }
Gate s(int q) { return one(GateKind::S, q); }
Gate sdg(int q) { return one(GateKind::Sdg, q); }
Gate t(int q) { return one(GateKind::T, q); }
Gate tdg(int q) { return one(GateKind::Tdg, q); }
Gate cnot(int c, int tgt) {
    Gate g;
    g.kind = GateKind::CNOT;
    g.q = {c, tgt, -1};
    return g;
}
Gate cz(int a, int b) {
    Gate g;
    g.kind = GateKind::CZ;
    g.q = {a, b, -1};
    return g;
}
Gate rz(int q, double theta) {
    Gate g = one(GateKind::Rz, q);
    g.theta = theta;
    return g;
}
Gate toffoli(int c1, int c2, int tgt, bool pos1, bool pos2) {
    Gate g;
    g.kind = GateKind::Toffoli;
    g.q = {c1, c2, tgt};
    g.pol = static_cast<std::uint8_t>((pos1 ? 1 : 0) | (pos2 ? 2 : 0));
    return g;
}
}  // namespace gates

void CircuitBlock::add(const Gate& g) {
    for (int i = 0; i < g.arity(); ++i) {
        if (g.q[i] < 0 || g.q[i] >= qubits)
            throw std::out_of_range(std::string("operand out of range for ") + gate_name(g.kind));
        for (int j = 0; j < i; ++j)
            if (g.q[i] == g.q[j]) throw std::invalid_argument("repeated operand");
    }
    if (g.kind == GateKind::Rz && g.theta == 0.0) throw std::invalid_argument("zero-angle Rz");
    items.emplace_back(g);
}

void CircuitBlock::rz(int q, double theta) {
    if (theta != 0.0) add(gates::rz(q, theta));
}

void CircuitBlock::repeat(std::uint64_t count, CircuitBlock body) {
    repeat(count, std::make_shared<const CircuitBlock>(std::move(body)));
}

void CircuitBlock::repeat(std::uint64_t count, std::shared_ptr<const CircuitBlock> body) {
    if (count < 1) throw std::invalid_argument("repeat count must be >= 1");
    if (body->qubits > qubits) throw std::out_of_range("repeat body wider than enclosing block");
    if (body->empty()) return;
    items.emplace_back(Repeat{count, std::move(body)});
}

void CircuitBlock::append(const CircuitBlock& other) {
    if (other.qubits > qubits) throw std::out_of_range("appended block wider than target");
    items.insert(items.end(), other.items.begin(), other.items.end());
}

Gate inverse(const Gate& g) {
    Gate r = g;
    switch (g.kind) {
        case GateKind::S: r.kind = GateKind::Sdg; break;
        case GateKind::Sdg: r.kind = GateKind::S; break;
        case GateKind::T: r.kind = GateKind::Tdg; break;
        case GateKind::Tdg: r.kind = GateKind::T; break;
        case GateKind::Rz: r.theta = -g.theta; break;
        default: break;
    }
    return r;
}

CircuitBlock inverse(const CircuitBlock& c) {
    CircuitBlock r(c.qubits);
    r.items.reserve(c.items.size());
    for (auto it = c.items.rbegin(); it != c.items.rend(); ++it) {
        if (const auto* g = std::get_if<Gate>(&*it)) {
            r.items.emplace_back(inverse(*g));
        } else {
            const auto& rep = std::get<Repeat>(*it);
            r.items.emplace_back(Repeat{rep.count, std::make_shared<const CircuitBlock>(inverse(*rep.body))});
        }
    }
    return r;
}

void CircuitBlock::append_inverse(const CircuitBlock& other) { append(inverse(other)); }

bool CircuitBlock::operator==(const CircuitBlock& o) const {
    if (qubits != o.qubits || items.size() != o.items.size()) return false;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto* a = std::get_if<Gate>(&items[i]);
        const auto* b = std::get_if<Gate>(&o.items[i]);
        if ((a == nullptr) != (b == nullptr)) return false;
        if (a) {
            if (!(*a == *b)) return false;
        } else {
            const auto& ra = std::get<Repeat>(items[i]);
            const auto& rb = std::get<Repeat>(o.items[i]);
            if (ra.count != rb.count || !(*ra.body == *rb.body)) return false;
        }
    }
    return true;
}

u128 GateCounts::total() const {
    u128 s = 0;
    for (auto v : by_kind) s += v;
    return s;
}

u128 GateCounts::pauli_count() const {
    return (*this)[GateKind::X] + (*this)[GateKind::Y] + (*this)[GateKind::Z];
}

u128 GateCounts::clifford1_count() const {
    return pauli_count() + (*this)[GateKind::H] + phase_count();
}

GateCounts& GateCounts::operator+=(const GateCounts& o) {
    for (int i = 0; i < kGateKinds; ++i) by_kind[i] += o.by_kind[i];
    return *this;
}

GateCounts GateCounts::scaled(u128 k) const {
    GateCounts r = *this;
    for (auto& v : r.by_kind) v *= k;
    return r;
}

namespace {

GateCounts count_rec(const CircuitBlock& c) {
    GateCounts out;
    for (const auto& it : c.items) {
        if (const auto* g = std::get_if<Gate>(&it)) {
            out.by_kind[static_cast<int>(g->kind)] += 1;
        } else {
            const auto& rep = std::get<Repeat>(it);
            out += count_rec(*rep.body).scaled(rep.count);
        }
    }
    return out;
}

void expand_rec(const CircuitBlock& c, std::vector<Gate>& out) {
    for (const auto& it : c.items) {
        if (const auto* g = std::get_if<Gate>(&it)) {
            out.push_back(*g);
        } else {
            const auto& rep = std::get<Repeat>(it);
            for (std::uint64_t k = 0; k < rep.count; ++k) expand_rec(*rep.body, out);
        }
    }
}

}  // namespace

GateCounts count_gates(const CircuitBlock& c) {
    GateCounts g = count_rec(c);
    g.qubits = c.qubits;
    return g;
}

u128 expanded_size(const CircuitBlock& c) { return count_rec(c).total(); }

std::vector<Gate> expand(const CircuitBlock& c, std::uint64_t cap) {
    u128 n = expanded_size(c);
    if (n > cap)
        throw SizeError("expansion needs " + to_string(n) + " gates, cap is " + std::to_string(cap));
    std::vector<Gate> out;
    out.reserve(static_cast<std::size_t>(n));
    expand_rec(c, out);
    return out;
}

CircuitBlock from_gates(int qubits, const std::vector<Gate>& g) {
    CircuitBlock c(qubits);
    c.items.reserve(g.size());
    for (const auto& x : g) c.add(x);
    return c;
}

ParseError::ParseError(int ln, const std::string& msg)
    : std::runtime_error("line " + std::to_string(ln) + ": " + msg), line(ln) {}

namespace {

void write_rec(const CircuitBlock& c, std::string& out, int depth) {
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    char buf[64];
    for (const auto& it : c.items) {
        if (const auto* g = std::get_if<Gate>(&it)) {
            out += indent;
            out += gate_name(g->kind);
            if (g->kind == GateKind::Rz) {
                std::snprintf(buf, sizeof buf, " %.17g", g->theta);
                out += buf;
            } else if (g->kind == GateKind::Toffoli) {
                out += ' ';
                out += (g->pol & 1) ? '+' : '-';
                out += (g->pol & 2) ? '+' : '-';
            }
            for (int i = 0; i < g->arity(); ++i) {
                out += ' ';
                out += std::to_string(g->q[i]);
            }
            out += '\n';
        } else {
            const auto& rep = std::get<Repeat>(it);
            out += indent + "REPEAT " + std::to_string(rep.count) + " {\n";
            write_rec(*rep.body, out, depth + 1);
            out += indent + "}\n";
        }
    }
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

template <class T>
bool parse_num(const std::string& s, T& v) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
}

bool parse_kind(const std::string& s, GateKind& k) {
    for (int i = 0; i < kGateKinds; ++i)
        if (s == kNames[i]) {
            k = static_cast<GateKind>(i);
            return true;
        }
    return false;
}

}  // namespace

std::string serialize(const CircuitBlock& c) {
    std::string out = "QUBITS " + std::to_string(c.qubits) + "\n";
    write_rec(c, out, 0);
    return out;
}

CircuitBlock deserialize(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int ln = 0;
    int qubits = -1;
    // Stack of open blocks with their repeat counts.
    std::vector<std::pair<CircuitBlock, std::uint64_t>> stack;
    while (std::getline(is, line)) {
        ++ln;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok[0] == "QUBITS") {
            if (qubits >= 0 || tok.size() != 2 || !parse_num(tok[1], qubits) || qubits < 0)
                throw ParseError(ln, "bad QUBITS header");
            stack.emplace_back(CircuitBlock(qubits), 1);
            continue;
        }
        if (qubits < 0) throw ParseError(ln, "missing QUBITS header");
        if (tok[0] == "REPEAT") {
            std::uint64_t k = 0;
            if (tok.size() != 3 || tok[2] != "{" || !parse_num(tok[1], k) || k < 1)
                throw ParseError(ln, "bad REPEAT line");
            stack.emplace_back(CircuitBlock(qubits), k);
            continue;
        }
        if (tok[0] == "}") {
            if (tok.size() != 1 || stack.size() < 2) throw ParseError(ln, "unbalanced '}'");
            auto [body, k] = std::move(stack.back());
            stack.pop_back();
            if (!body.empty()) stack.back().first.repeat(k, std::move(body));
            continue;
        }
        GateKind kind;
        if (!parse_kind(tok[0], kind)) throw ParseError(ln, "unknown gate '" + tok[0] + "'");
        Gate g;
        g.kind = kind;
        std::size_t pos = 1;
        if (kind == GateKind::Rz) {
            if (tok.size() < 2 || !parse_num(tok[1], g.theta)) throw ParseError(ln, "bad RZ angle");
            pos = 2;
        } else if (kind == GateKind::Toffoli) {
            if (tok.size() < 2 || tok[1].size() != 2) throw ParseError(ln, "bad TOFFOLI polarity");
            g.pol = 0;
            for (int i = 0; i < 2; ++i) {
                char ch = tok[1][static_cast<std::size_t>(i)];
                if (ch == '+') g.pol |= static_cast<std::uint8_t>(1 << i);
                else if (ch != '-') throw ParseError(ln, "bad TOFFOLI polarity");
            }
            pos = 2;
        }
        if (tok.size() - pos != static_cast<std::size_t>(g.arity())) throw ParseError(ln, "wrong operand count");
        for (int i = 0; i < g.arity(); ++i)
            if (!parse_num(tok[pos + static_cast<std::size_t>(i)], g.q[static_cast<std::size_t>(i)]))
                throw ParseError(ln, "bad qubit index");
        try {
            stack.back().first.add(g);
        } catch (const std::exception& e) {
            throw ParseError(ln, e.what());
        }
    }
    if (qubits < 0) throw ParseError(ln, "missing QUBITS header");
    if (stack.size() != 1) throw ParseError(ln, "unterminated REPEAT");
    return std::move(stack.back().first);
}

std::string to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s += static_cast<char>('0' + static_cast<int>(v % 10));
        v /= 10;
    }
    return {s.rbegin(), s.rend()};
}

double to_double(u128 v) { return static_cast<double>(v); }

}  // namespace hamsim

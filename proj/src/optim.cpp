#include "hamsim/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace hamsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleTol = 1e-12;

enum class WireType { Z, X, Other };

WireType wire_type(const Gate& g, int slot) {
    switch (g.kind) {
        case GateKind::X: return WireType::X;
        case GateKind::Y:
        case GateKind::H: return WireType::Other;
        case GateKind::CNOT: return slot == 0 ? WireType::Z : WireType::X;
        case GateKind::Toffoli: return slot == 2 ? WireType::X : WireType::Z;
        default: return WireType::Z;
    }
}

int slot_of(const Gate& g, int q) {
    for (int i = 0; i < g.arity(); ++i)
        if (g.q[i] == q) return i;
    return -1;
}

double wrap_angle(double a) {
    a = std::fmod(a, 2 * kPi);
    if (a > kPi) a -= 2 * kPi;
    if (a <= -kPi) a += 2 * kPi;
    return a;
}

// Gates realizing Rz(angle) up to global phase; empty for identity.
std::vector<Gate> phase_gates(int q, double angle) {
    angle = wrap_angle(angle);
    if (std::abs(angle) < kAngleTol) return {};
    double k = angle / (kPi / 4);
    double kr = std::round(k);
    if (std::abs(k - kr) < 1e-10) {
        int m = ((static_cast<int>(kr) % 8) + 8) % 8;
        switch (m) {
            case 1: return {gates::t(q)};
            case 2: return {gates::s(q)};
            case 3: return {gates::s(q), gates::t(q)};
            case 4: return {gates::z(q)};
            case 5: return {gates::sdg(q), gates::tdg(q)};
            case 6: return {gates::sdg(q)};
            case 7: return {gates::tdg(q)};
            default: return {};
        }
    }
    return {gates::rz(q, angle)};
}

bool same_controls(const Gate& a, const Gate& b) {
    if (a.q[0] == b.q[0] && a.q[1] == b.q[1]) return a.pol == b.pol;
    if (a.q[0] == b.q[1] && a.q[1] == b.q[0]) {
        std::uint8_t swapped = static_cast<std::uint8_t>(((b.pol & 1) << 1) | ((b.pol >> 1) & 1));
        return a.pol == swapped;
    }
    return false;
}

bool is_inverse_pair(const Gate& a, const Gate& b) {
    switch (a.kind) {
        case GateKind::X:
        case GateKind::Y:
        case GateKind::Z:
        case GateKind::H:
            return b.kind == a.kind && b.q[0] == a.q[0];
        case GateKind::CNOT:
            return b.kind == a.kind && b.q[0] == a.q[0] && b.q[1] == a.q[1];
        case GateKind::CZ:
            return b.kind == a.kind && ((b.q[0] == a.q[0] && b.q[1] == a.q[1]) || (b.q[0] == a.q[1] && b.q[1] == a.q[0]));
        case GateKind::Toffoli:
            return b.kind == a.kind && b.q[2] == a.q[2] && same_controls(a, b);
        default:
            return false;
    }
}

}  // namespace

bool is_phase_gate(GateKind k) {
    switch (k) {
        case GateKind::Z:
        case GateKind::S:
        case GateKind::Sdg:
        case GateKind::T:
        case GateKind::Tdg:
        case GateKind::Rz:
            return true;
        default:
            return false;
    }
}

double phase_angle(const Gate& g) {
    switch (g.kind) {
        case GateKind::Z: return kPi;
        case GateKind::S: return kPi / 2;
        case GateKind::Sdg: return -kPi / 2;
        case GateKind::T: return kPi / 4;
        case GateKind::Tdg: return -kPi / 4;
        case GateKind::Rz: return g.theta;
        default: return 0.0;
    }
}

bool gates_commute(const Gate& a, const Gate& b) {
    for (int i = 0; i < a.arity(); ++i) {
        int s = slot_of(b, a.q[i]);
        if (s < 0) continue;
        WireType ta = wire_type(a, i), tb = wire_type(b, s);
        if (ta == WireType::Other || tb == WireType::Other || ta != tb) return false;
    }
    return true;
}

// ---------------------------------------------------------------- Toffoli lowering

namespace {

void emit_toffoli_plain(std::vector<Gate>& out, const Gate& g) {
    const int c1 = g.q[0], c2 = g.q[1], t = g.q[2];
    const bool n1 = !(g.pol & 1), n2 = !(g.pol & 2);
    // Phase on a parity flips sign once for each negated control it contains.
    auto ph = [&](bool positive, bool has1, bool has2, int q) {
        bool flip = (has1 && n1) != (has2 && n2);
        out.push_back(positive != flip ? gates::t(q) : gates::tdg(q));
    };
    out.push_back(gates::h(t));
    out.push_back(gates::cnot(c2, t));
    ph(false, false, true, t);
    out.push_back(gates::cnot(c1, t));
    ph(true, true, true, t);
    out.push_back(gates::cnot(c2, t));
    ph(false, true, false, t);
    out.push_back(gates::cnot(c1, t));
    ph(true, false, true, c2);
    ph(true, false, false, t);
    out.push_back(gates::h(t));
    out.push_back(gates::cnot(c1, c2));
    ph(true, true, false, c1);
    ph(false, true, true, c2);
    out.push_back(gates::cnot(c1, c2));
}

struct PairInfo {
    int partner = -1;
    bool first = false;
    int a = -1, x = -1, c = -1;
    bool first_positive = false;  // polarity of x in the first Toffoli
};

// T (true) / T-dagger (false) pattern on the shared control, by first-Toffoli polarity.
constexpr std::array<bool, 8> kPairNegFirst = {true, true, false, false, false, true, false, true};
constexpr std::array<bool, 8> kPairPosFirst = {true, false, true, false, false, false, true, true};

void emit_pair_half(std::vector<Gate>& out, const PairInfo& p, bool first_half) {
    const auto& pat = p.first_positive ? kPairPosFirst : kPairNegFirst;
    const int off = first_half ? 0 : 4;
    auto tg = [&](int i) { out.push_back(pat[static_cast<std::size_t>(off + i)] ? gates::t(p.a) : gates::tdg(p.a)); };
    if (first_half) {
        tg(0);
        out.push_back(gates::h(p.c));
        out.push_back(gates::cnot(p.x, p.a));
        tg(1);
        out.push_back(gates::cnot(p.c, p.a));
        tg(2);
        out.push_back(gates::cnot(p.x, p.a));
        tg(3);
        out.push_back(gates::s(p.c));
    } else {
        tg(0);
        out.push_back(gates::cnot(p.x, p.a));
        tg(1);
        out.push_back(gates::cnot(p.c, p.a));
        tg(2);
        out.push_back(gates::cnot(p.x, p.a));
        tg(3);
        out.push_back(gates::h(p.c));
    }
}

// Gate between a pair: must leave x and c alone and only XOR onto a.
bool allowed_between(const Gate& h, int a, int x, int c) {
    if (h.acts_on(x) || h.acts_on(c)) return false;
    if (!h.acts_on(a)) return true;
    switch (h.kind) {
        case GateKind::X: return true;
        case GateKind::CNOT: return h.q[1] == a;
        case GateKind::Toffoli: return h.q[2] == a;
        default: return false;
    }
}

constexpr int kPairWindow = 512;

}  // namespace

std::vector<Gate> lower_toffolis_flat(const std::vector<Gate>& g, bool pair) {
    std::vector<PairInfo> info(g.size());
    if (pair) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Gate& gi = g[i];
            if (gi.kind != GateKind::Toffoli || info[i].partner >= 0) continue;
            for (int role = 0; role < 2 && info[i].partner < 0; ++role) {
                const int ai = role, xi = 1 - role;
                if (!((gi.pol >> ai) & 1)) continue;
                const int a = gi.q[static_cast<std::size_t>(ai)], x = gi.q[static_cast<std::size_t>(xi)], c = gi.q[2];
                const bool xpos = (gi.pol >> xi) & 1;
                const std::size_t end = std::min(g.size(), i + kPairWindow);
                for (std::size_t j = i + 1; j < end; ++j) {
                    const Gate& h = g[j];
                    if (h.kind == GateKind::Toffoli && info[j].partner < 0 && h.q[2] == c) {
                        int sa = slot_of(h, a), sx = slot_of(h, x);
                        if (sa >= 0 && sx >= 0 && sa < 2 && sx < 2 && ((h.pol >> sa) & 1) &&
                            (((h.pol >> sx) & 1) != xpos)) {
                            info[i] = {static_cast<int>(j), true, a, x, c, xpos};
                            info[j] = {static_cast<int>(i), false, a, x, c, xpos};
                            break;
                        }
                    }
                    if (!allowed_between(h, a, x, c)) break;
                }
            }
        }
    }
    std::vector<Gate> out;
    out.reserve(g.size() * 2);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i].kind != GateKind::Toffoli) {
            out.push_back(g[i]);
        } else if (info[i].partner >= 0) {
            emit_pair_half(out, info[i], info[i].first);
        } else {
            emit_toffoli_plain(out, g[i]);
        }
    }
    return out;
}

CircuitBlock lower_toffolis(const CircuitBlock& c, bool pair) {
    CircuitBlock out(c.qubits);
    std::vector<Gate> run;
    auto flush = [&]() {
        for (const auto& x : lower_toffolis_flat(run, pair)) out.items.emplace_back(x);
        run.clear();
    };
    for (const auto& it : c.items) {
        if (const auto* g = std::get_if<Gate>(&it)) {
            run.push_back(*g);
        } else {
            flush();
            const auto& rep = std::get<Repeat>(it);
            out.items.emplace_back(Repeat{rep.count, std::make_shared<const CircuitBlock>(lower_toffolis(*rep.body, pair))});
        }
    }
    flush();
    return out;
}

// ---------------------------------------------------------------- cancellation / merging

namespace {

constexpr int kCancelWindow = 96;

class CancelPass {
public:
    explicit CancelPass(int qubits) : wires_(static_cast<std::size_t>(qubits)) {}

    bool run(std::vector<Gate>& g) {
        out_.clear();
        alive_.clear();
        for (auto& w : wires_) w.clear();
        out_.reserve(g.size());
        bool changed = false;
        for (const auto& x : g) {
            if (absorb(x)) {
                changed = true;
                continue;
            }
            push(x);
        }
        if (!changed) return false;
        std::vector<Gate> res;
        res.reserve(out_.size());
        for (std::size_t i = 0; i < out_.size(); ++i)
            if (alive_[i]) res.push_back(out_[i]);
        g.swap(res);
        return true;
    }

private:
    void push(const Gate& x) {
        int idx = static_cast<int>(out_.size());
        out_.push_back(x);
        alive_.push_back(1);
        for (int i = 0; i < x.arity(); ++i) wires_[static_cast<std::size_t>(x.q[i])].push_back(idx);
    }

    // Merges `g` into the earlier phase gate at `idx` when the result stays a single gate.
    bool merge_phase(int idx, const Gate& g) {
        Gate& h = out_[static_cast<std::size_t>(idx)];
        double total = phase_angle(h) + phase_angle(g);
        auto rep = phase_gates(h.q[0], total);
        if (rep.empty()) {
            alive_[static_cast<std::size_t>(idx)] = 0;
            return true;
        }
        if (rep.size() != 1) return false;
        h = rep[0];
        return true;
    }

    bool absorb(const Gate& g) {
        const int ar = g.arity();
        std::array<int, 3> pos{};
        for (int i = 0; i < ar; ++i) pos[static_cast<std::size_t>(i)] = static_cast<int>(wires_[static_cast<std::size_t>(g.q[i])].size()) - 1;
        for (int step = 0; step < kCancelWindow; ++step) {
            int cand = -1;
            for (int i = 0; i < ar; ++i) {
                auto& w = wires_[static_cast<std::size_t>(g.q[i])];
                int& p = pos[static_cast<std::size_t>(i)];
                while (p >= 0 && !alive_[static_cast<std::size_t>(w[static_cast<std::size_t>(p)])]) --p;
                if (p >= 0) cand = std::max(cand, w[static_cast<std::size_t>(p)]);
            }
            if (cand < 0) return false;
            const Gate& h = out_[static_cast<std::size_t>(cand)];
            if (is_inverse_pair(h, g) || is_inverse_pair(g, h) ||
                (h.kind == GateKind::S && g.kind == GateKind::Sdg && h.q[0] == g.q[0]) ||
                (h.kind == GateKind::Sdg && g.kind == GateKind::S && h.q[0] == g.q[0]) ||
                (h.kind == GateKind::T && g.kind == GateKind::Tdg && h.q[0] == g.q[0]) ||
                (h.kind == GateKind::Tdg && g.kind == GateKind::T && h.q[0] == g.q[0])) {
                alive_[static_cast<std::size_t>(cand)] = 0;
                return true;
            }
            if (is_phase_gate(h.kind) && is_phase_gate(g.kind) && h.q[0] == g.q[0]) {
                if (merge_phase(cand, g)) return true;
            }
            if (!gates_commute(h, g)) return false;
            for (int i = 0; i < ar; ++i) {
                auto& w = wires_[static_cast<std::size_t>(g.q[i])];
                int& p = pos[static_cast<std::size_t>(i)];
                if (p >= 0 && w[static_cast<std::size_t>(p)] == cand) --p;
            }
        }
        return false;
    }

    std::vector<Gate> out_;
    std::vector<char> alive_;
    std::vector<std::vector<int>> wires_;
};

}  // namespace

bool pass_cancel(std::vector<Gate>& g, int qubits) { return CancelPass(qubits).run(g); }

// ---------------------------------------------------------------- Hadamard rewrites

bool pass_hadamard(std::vector<Gate>& g, int qubits) {
    const std::size_t m = g.size();
    std::vector<std::vector<int>> wires(static_cast<std::size_t>(qubits));
    // Position of each gate within the wire list of each of its operands.
    std::vector<std::array<int, 3>> wpos(m);
    for (std::size_t i = 0; i < m; ++i)
        for (int k = 0; k < g[i].arity(); ++k) {
            auto& w = wires[static_cast<std::size_t>(g[i].q[k])];
            wpos[i][static_cast<std::size_t>(k)] = static_cast<int>(w.size());
            w.push_back(static_cast<int>(i));
        }
    std::vector<char> dead(m, 0), touched(m, 0);
    auto neighbour = [&](std::size_t i, int slot, int dir) -> int {
        const auto& w = wires[static_cast<std::size_t>(g[i].q[static_cast<std::size_t>(slot)])];
        int p = wpos[i][static_cast<std::size_t>(slot)] + dir;
        if (p < 0 || p >= static_cast<int>(w.size())) return -1;
        return w[static_cast<std::size_t>(p)];
    };
    bool changed = false;
    for (std::size_t i = 0; i < m; ++i) {
        if (dead[i] || touched[i]) continue;
        const Gate& x = g[i];
        if (x.kind == GateKind::CNOT) {
            int hs[4] = {neighbour(i, 0, -1), neighbour(i, 1, -1), neighbour(i, 0, 1), neighbour(i, 1, 1)};
            bool ok = true;
            for (int h : hs)
                if (h < 0 || dead[static_cast<std::size_t>(h)] || touched[static_cast<std::size_t>(h)] ||
                    g[static_cast<std::size_t>(h)].kind != GateKind::H)
                    ok = false;
            if (!ok) continue;
            for (int h : hs) dead[static_cast<std::size_t>(h)] = 1;
            g[i] = gates::cnot(x.q[1], x.q[0]);
            touched[i] = 1;
            changed = true;
        } else if (x.kind == GateKind::S || x.kind == GateKind::Sdg) {
            int a = neighbour(i, 0, -1), b = neighbour(i, 0, 1);
            if (a < 0 || b < 0) continue;
            auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
            if (dead[ua] || dead[ub] || touched[ua] || touched[ub]) continue;
            if (g[ua].kind != GateKind::H || g[ub].kind != GateKind::H) continue;
            // H S H = Sdg H Sdg and H Sdg H = S H S, up to global phase.
            const bool s = x.kind == GateKind::S;
            const int q = x.q[0];
            g[ua] = s ? gates::sdg(q) : gates::s(q);
            g[i] = gates::h(q);
            g[ub] = s ? gates::sdg(q) : gates::s(q);
            touched[ua] = touched[i] = touched[ub] = 1;
            changed = true;
        }
    }
    if (!changed) return false;
    std::vector<Gate> res;
    res.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
        if (!dead[i]) res.push_back(g[i]);
    g.swap(res);
    return true;
}

// ---------------------------------------------------------------- phase polynomial merging

namespace {

struct Parity {
    std::vector<std::uint32_t> vars;  // sorted
    bool constant = false;
};

void xor_into(Parity& dst, const Parity& src) {
    std::vector<std::uint32_t> r;
    r.reserve(dst.vars.size() + src.vars.size());
    std::set_symmetric_difference(dst.vars.begin(), dst.vars.end(), src.vars.begin(), src.vars.end(),
                                  std::back_inserter(r));
    dst.vars.swap(r);
    dst.constant = dst.constant != src.constant;
}

struct VecHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const {
        std::size_t h = 1469598103934665603ULL;
        for (auto x : v) {
            h ^= x;
            h *= 1099511628211ULL;
        }
        return h ^ v.size();
    }
};

constexpr std::size_t kMaxParity = 48;

}  // namespace

bool pass_phase_poly(std::vector<Gate>& g, int qubits) {
    std::uint32_t next_var = 0;
    std::vector<Parity> wire(static_cast<std::size_t>(qubits));
    for (auto& p : wire) p.vars = {next_var++};
    auto fresh = [&](int q) {
        auto& p = wire[static_cast<std::size_t>(q)];
        p.vars = {next_var++};
        p.constant = false;
    };
    struct Slot {
        std::size_t index;
        bool constant;
    };
    std::unordered_map<std::vector<std::uint32_t>, Slot, VecHash> seen;
    std::vector<double> angle(g.size(), 0.0);
    std::vector<char> is_rot(g.size(), 0), dead(g.size(), 0), merged(g.size(), 0);
    bool changed = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Gate& x = g[i];
        switch (x.kind) {
            case GateKind::X:
            case GateKind::Y:
                wire[static_cast<std::size_t>(x.q[0])].constant ^= true;
                break;
            case GateKind::CNOT: {
                auto& t = wire[static_cast<std::size_t>(x.q[1])];
                xor_into(t, wire[static_cast<std::size_t>(x.q[0])]);
                if (t.vars.size() > kMaxParity) fresh(x.q[1]);
                break;
            }
            case GateKind::CZ:
                break;
            case GateKind::H:
                fresh(x.q[0]);
                break;
            case GateKind::Toffoli:
                fresh(x.q[2]);
                break;
            default: {
                const auto& p = wire[static_cast<std::size_t>(x.q[0])];
                is_rot[i] = 1;
                angle[i] = phase_angle(x);
                auto it = seen.find(p.vars);
                if (it == seen.end()) {
                    seen.emplace(p.vars, Slot{i, p.constant});
                } else {
                    const double sgn = (it->second.constant == p.constant) ? 1.0 : -1.0;
                    angle[it->second.index] += sgn * angle[i];
                    merged[it->second.index] = 1;
                    dead[i] = 1;
                    changed = true;
                }
                break;
            }
        }
    }
    if (!changed) return false;
    std::vector<Gate> res;
    res.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (dead[i]) continue;
        if (is_rot[i] && merged[i]) {
            for (const auto& r : phase_gates(g[i].q[0], angle[i])) res.push_back(r);
        } else {
            res.push_back(g[i]);
        }
    }
    g.swap(res);
    return true;
}

// ---------------------------------------------------------------- drivers

namespace {

struct Cost {
    u128 cnot = 0, rz = 0, t = 0, total = 0;
    bool operator<(const Cost& o) const {
        u128 a = cnot + rz + t, b = o.cnot + o.rz + o.t;
        if (a != b) return a < b;
        return total < o.total;
    }
};

Cost cost_of(const GateCounts& c) {
    return {c[GateKind::CNOT], c[GateKind::Rz], c.t_count(), c.total()};
}

Cost flat_cost(const std::vector<Gate>& g) {
    CircuitBlock b;
    GateCounts c;
    for (const auto& x : g) c.by_kind[static_cast<int>(x.kind)] += 1;
    return cost_of(c);
}

}  // namespace

std::vector<Gate> optimize_flat(std::vector<Gate> g, int qubits, int max_rounds, OptStats* stats) {
    bool has_tof = std::any_of(g.begin(), g.end(), [](const Gate& x) { return x.kind == GateKind::Toffoli; });
    if (has_tof) g = lower_toffolis_flat(g, true);
    const std::vector<Gate> start = g;
    int rounds = 0;
    for (; rounds < max_rounds; ++rounds) {
        bool changed = false;
        while (pass_cancel(g, qubits)) changed = true;
        changed |= pass_hadamard(g, qubits);
        while (pass_cancel(g, qubits)) changed = true;
        changed |= pass_phase_poly(g, qubits);
        if (!changed) break;
    }
    if (stats) stats->rounds = rounds;
    if (flat_cost(start) < flat_cost(g)) return start;
    return g;
}

namespace {

void append_flat(CircuitBlock& out, const std::vector<Gate>& g) {
    for (const auto& x : g) out.items.emplace_back(x);
}

struct Unrolled {
    std::vector<Gate> pre, body, post;
    std::uint64_t count = 0;
};

// Ordering key: CNOT + Rz + T first, then all gates.
std::pair<u128, u128> unrolled_cost(const Unrolled& u) {
    Cost a = flat_cost(u.pre), b = flat_cost(u.body), c = flat_cost(u.post);
    const u128 k = u.count;
    return {(a.cnot + a.rz + a.t) + (c.cnot + c.rz + c.t) + k * (b.cnot + b.rz + b.t),
            a.total + c.total + k * b.total};
}

std::vector<std::size_t> cut_points(std::size_t m, bool with_zero) {
    const std::size_t cuts = m > 20000 ? 6 : std::min<std::size_t>(m, 32);
    std::vector<std::size_t> out;
    if (with_zero) out.push_back(0);
    for (std::size_t i = 1; i < cuts; ++i) out.push_back(m * i / cuts);
    return out;
}

std::vector<Gate> concat(std::vector<Gate> a, const std::vector<Gate>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// pre B^count post = pre B[:c] (B[c:] B[:c])^(count-1) B[c:] post.
Unrolled rotate(const Unrolled& u, std::size_t cut, int qubits, int max_rounds) {
    const auto mid = u.body.begin() + static_cast<std::ptrdiff_t>(cut);
    std::vector<Gate> head(u.body.begin(), mid), tail(mid, u.body.end());
    Unrolled out;
    out.count = u.count - 1;
    out.body = optimize_flat(concat(tail, head), qubits, max_rounds);
    out.pre = optimize_flat(concat(u.pre, head), qubits, max_rounds);
    out.post = optimize_flat(concat(tail, u.post), qubits, max_rounds);
    return out;
}

constexpr int kStitchRounds = 3;
constexpr std::uint64_t kUnrollBelow = 4;

CircuitBlock optimize_repeat(const Repeat& rep, int qubits, int max_rounds) {
    const std::vector<Gate> body = expand(*rep.body);
    CircuitBlock out(qubits);
    if (rep.count <= kUnrollBelow) {
        std::vector<Gate> all;
        for (std::uint64_t k = 0; k < rep.count; ++k) all.insert(all.end(), body.begin(), body.end());
        append_flat(out, optimize_flat(all, qubits, max_rounds));
        return out;
    }
    // First rotation picks where the period is cut; later ones let the
    // optimizer see the junctions between consecutive periods.
    const Unrolled start{{}, body, {}, rep.count};
    Unrolled best;
    bool have = false;
    for (std::size_t cut : cut_points(body.size(), true)) {
        Unrolled u = rotate(start, cut, qubits, max_rounds);
        if (!have || unrolled_cost(u) < unrolled_cost(best)) {
            best = std::move(u);
            have = true;
        }
    }
    for (int round = 0; round < kStitchRounds && best.count >= 2 && !best.body.empty(); ++round) {
        Unrolled next;
        bool improved = false;
        for (std::size_t cut : cut_points(best.body.size(), false)) {
            Unrolled u = rotate(best, cut, qubits, max_rounds);
            if (unrolled_cost(u) < unrolled_cost(improved ? next : best)) {
                next = std::move(u);
                improved = true;
            }
        }
        if (!improved) break;
        best = std::move(next);
    }
    append_flat(out, best.pre);
    if (!best.body.empty() && best.count > 0) {
        CircuitBlock mid(qubits);
        append_flat(mid, best.body);
        out.repeat(best.count, std::move(mid));
    }
    append_flat(out, best.post);
    return out;
}

}  // namespace

CircuitBlock optimize(const CircuitBlock& c, OptMode mode, int max_rounds) {
    CircuitBlock out(c.qubits);
    if (mode == OptMode::WholeCircuit) {
        append_flat(out, optimize_flat(expand(c), c.qubits, max_rounds));
        return out;
    }
    std::vector<Gate> run;
    auto flush = [&]() {
        if (run.empty()) return;
        append_flat(out, optimize_flat(run, c.qubits, max_rounds));
        run.clear();
    };
    for (const auto& it : c.items) {
        if (const auto* g = std::get_if<Gate>(&it)) {
            run.push_back(*g);
        } else {
            flush();
            out.append(optimize_repeat(std::get<Repeat>(it), c.qubits, max_rounds));
        }
    }
    flush();
    if (cost_of(count_gates(c)) < cost_of(count_gates(out))) return c;
    return out;
}

}  // namespace hamsim

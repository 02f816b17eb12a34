#include "hamsim/ts.hpp"

#include <cmath>
#include <numbers>

#include "hamsim/prep.hpp"
#include "hamsim/selectv.hpp"

namespace hamsim {

namespace {
constexpr double kLn2 = std::numbers::ln2;
}

double ts_delta(int K) {
    if (K < 0) throw std::invalid_argument("truncation order must be nonnegative");
    return 2.0 * std::exp((K + 1) * std::log(kLn2) - std::lgamma(K + 2.0));
}

double ts_xi_per_segment(int K) {
    const double d = ts_delta(K);
    return d * (d * d + 3 * d + 4) / 2;
}

TsParams ts_params(const SpinChainHamiltonian& H, double t, double epsilon) {
    if (!(t > 0)) throw std::invalid_argument("evolution time must be positive");
    if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
    TsParams p;
    p.alpha = H.alpha;
    p.t_seg = kLn2 / H.alpha;
    p.r = static_cast<std::uint64_t>(std::ceil(t / p.t_seg - 1e-12));
    if (p.r == 0) p.r = 1;
    p.t_rem = t - static_cast<double>(p.r - 1) * p.t_seg;
    const double target = std::sqrt(epsilon * epsilon - std::pow(epsilon, 4) / 4);
    for (int K = 1; K <= kMaxTruncationOrder; ++K) {
        const double xi = static_cast<double>(p.r) * ts_xi_per_segment(K);
        if (xi <= target) {
            p.K = K;
            p.xi = xi;
            p.success_prob_lb = (1 - xi) * (1 - xi);
            return p;
        }
    }
    throw KOverflow("no truncation order up to " + std::to_string(kMaxTruncationOrder) + " meets epsilon");
}

std::vector<int> TsLayout::reflected() const {
    std::vector<int> out = unary;
    for (const auto& b : binary) out.insert(out.end(), b.begin(), b.end());
    out.push_back(rot);
    return out;
}

TsLayout ts_layout(int n, int K) {
    if (n < 2) throw InvalidSize("chain needs n >= 2");
    if (K < 1) throw std::invalid_argument("truncation order must be at least 1");
    TsLayout l;
    l.n = n;
    l.K = K;
    l.w = select_width(4 * n);
    int next = 0;
    for (int i = 0; i < n; ++i) l.system.push_back(next++);
    for (int i = 0; i < K; ++i) l.unary.push_back(next++);
    l.binary.resize(static_cast<std::size_t>(K));
    for (auto& b : l.binary)
        for (int i = 0; i < l.w; ++i) b.push_back(next++);
    l.rot = next++;
    const int m = K + K * l.w + 1;
    const int pool = std::max(select_ancillas(l.w, true), mcx_ancillas(m - 1));
    for (int i = 0; i < pool; ++i) l.pool.push_back(next++);
    l.total = next;
    return l;
}

int ts_qubits(int n, int K) { return ts_layout(n, K).total; }

std::vector<double> unary_amplitudes(int K, double alpha_t) {
    std::vector<double> a(static_cast<std::size_t>(K + 1));
    double s = 0;
    for (int k = 0; k <= K; ++k) {
        a[static_cast<std::size_t>(k)] = std::exp(0.5 * (k * std::log(alpha_t) - std::lgamma(k + 1.0)));
        if (k == 0) a[0] = 1.0;
        s += a[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k)];
    }
    for (auto& x : a) x /= std::sqrt(s);
    return a;
}

void emit_unary_prep(CircuitBlock& c, const std::vector<int>& qubits, double alpha_t) {
    const int K = static_cast<int>(qubits.size());
    const auto a = unary_amplitudes(K, alpha_t);
    // tail[k] = probability that at least k qubits are set.
    std::vector<double> tail(static_cast<std::size_t>(K + 2), 0.0);
    for (int k = K; k >= 0; --k) tail[static_cast<std::size_t>(k)] = tail[static_cast<std::size_t>(k + 1)] + a[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k)];
    for (int k = 1; k <= K; ++k) {
        const double p = tail[static_cast<std::size_t>(k - 1)] > 0 ? tail[static_cast<std::size_t>(k)] / tail[static_cast<std::size_t>(k - 1)] : 0.0;
        const double theta = 2 * std::asin(std::sqrt(std::min(1.0, p)));
        if (k == 1) emit_ry(c, qubits[0], theta);
        else emit_controlled_ry(c, qubits[static_cast<std::size_t>(k - 2)], qubits[static_cast<std::size_t>(k - 1)], theta);
    }
}

CircuitBlock synth_unary_prep(int K, double alpha_t) {
    if (K < 1) throw std::invalid_argument("truncation order must be at least 1");
    CircuitBlock c(K);
    std::vector<int> q;
    for (int i = 0; i < K; ++i) q.push_back(i);
    emit_unary_prep(c, q, alpha_t);
    return c;
}

std::vector<double> coeff_amplitudes(const SpinChainHamiltonian& H, double norm) {
    const int w = select_width(static_cast<int>(H.size()));
    std::vector<double> a(std::size_t(1) << w, 0.0);
    for (std::size_t l = 0; l < H.size(); ++l) a[l] = std::sqrt(std::abs(H.terms[l].coeff) / norm);
    return a;
}

CircuitBlock synth_coeff_prep(const SpinChainHamiltonian& H) {
    const int w = select_width(static_cast<int>(H.size()));
    CircuitBlock c(w);
    std::vector<int> q;
    for (int i = 0; i < w; ++i) q.push_back(i);
    emit_generic_state_prep(c, q, coeff_amplitudes(H, H.alpha));
    return c;
}

namespace {

// Boost rotation, B, select, B^dag for one W.
CircuitBlock ts_w(const SpinChainHamiltonian& H, const TsLayout& l, double dt) {
    CircuitBlock B(l.total);
    const double at = H.alpha * dt;
    emit_unary_prep(B, l.unary, at);
    const auto amp = coeff_amplitudes(H, H.alpha);
    for (const auto& reg : l.binary) emit_generic_state_prep(B, reg, amp);

    double s = 0;
    for (int k = 0; k <= l.K; ++k) s += std::exp(k * std::log(at) - std::lgamma(k + 1.0));
    if (s > 2.0) throw std::invalid_argument("segment too long for the boost rotation");

    CircuitBlock w(l.total);
    emit_ry(w, l.rot, 2 * std::acos(s / 2));
    w.append(B);
    const auto targets = hamiltonian_targets(H, l.system.front(), true);
    const std::vector<int> walk(l.pool.begin(), l.pool.begin() + select_ancillas(l.w, true));
    for (int j = 0; j < l.K; ++j) {
        SelectSpec spec;
        spec.w = l.w;
        spec.gamma = static_cast<int>(H.size());
        spec.control = l.binary[static_cast<std::size_t>(j)];
        spec.targets = targets;
        spec.extra_control = l.unary[static_cast<std::size_t>(j)];
        spec.ancillas = walk;
        emit_select(w, spec);
    }
    w.append_inverse(B);
    return w;
}

void emit_reflection(CircuitBlock& c, const TsLayout& l) {
    const auto q = l.reflected();
    for (int x : q) c.add(gates::x(x));
    emit_mcz(c, q, l.pool);
    for (int x : q) c.add(gates::x(x));
}

}  // namespace

CircuitBlock ts_segment(const SpinChainHamiltonian& H, const TsLayout& l, double dt) {
    if (l.n != H.n) throw std::invalid_argument("layout does not match Hamiltonian");
    const CircuitBlock w = ts_w(H, l, dt);
    CircuitBlock seg(l.total);
    seg.append(w);
    emit_reflection(seg, l);
    seg.append_inverse(w);
    emit_reflection(seg, l);
    seg.append(w);
    // Overall sign -1 = (XZ)^2.
    for (int i = 0; i < 2; ++i) {
        seg.add(gates::x(l.rot));
        seg.add(gates::z(l.rot));
    }
    return seg;
}

CircuitBlock synth_ts(const SpinChainHamiltonian& H, const TsParams& p) {
    const TsLayout l = ts_layout(H.n, p.K);
    CircuitBlock c(l.total);
    if (p.r > 1) c.repeat(p.r - 1, ts_segment(H, l, p.t_seg));
    c.append(ts_segment(H, l, p.t_rem));
    return c;
}

CircuitBlock synth_ts(const SpinChainHamiltonian& H, double t, double epsilon) {
    return synth_ts(H, ts_params(H, t, epsilon));
}

}  // namespace hamsim

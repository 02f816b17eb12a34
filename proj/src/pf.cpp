#include "hamsim/pf.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace hamsim {

const char* bound_name(BoundKind b) {
    switch (b) {
        case BoundKind::Analytic: return "analytic";
        case BoundKind::Minimized: return "minimized";
        case BoundKind::Commutator: return "commutator";
        case BoundKind::Empirical: return "empirical";
    }
    return "?";
}

BoundKind parse_bound(const std::string& s) {
    if (s == "analytic" || s == "ana") return BoundKind::Analytic;
    if (s == "minimized" || s == "min") return BoundKind::Minimized;
    if (s == "commutator" || s == "com") return BoundKind::Commutator;
    if (s == "empirical" || s == "emp") return BoundKind::Empirical;
    throw std::invalid_argument("unknown bound '" + s + "' (analytic, minimized, commutator, empirical)");
}

bool valid_pf_order(int order) { return order == 1 || order == 2 || order == 4 || order == 6 || order == 8; }

int s2_blocks(int order) {
    if (!valid_pf_order(order)) throw UnsupportedOrder("PF order must be 1, 2, 4, 6 or 8");
    if (order == 1) return 0;
    int b = 1;
    for (int k = 2; k <= order / 2; ++k) b *= 5;
    return b;
}

namespace {

using ld = long double;

void check_scalars(double L, double Lambda, double t, double epsilon) {
    if (!(L > 0 && Lambda > 0 && t > 0 && epsilon > 0))
        throw std::invalid_argument("bound inputs L, Lambda, t, epsilon must be positive");
}

std::uint64_t ceil_u64(ld x) {
    ld c = std::ceil(x);
    if (c < 1) return 1;
    if (c > static_cast<ld>(std::numeric_limits<std::uint64_t>::max() / 2))
        throw std::overflow_error("segment count overflows 64 bits");
    return static_cast<std::uint64_t>(c);
}

// 2 L 5^{k-1} Lambda t for order 2k.
ld scaled_length(int order, ld L, ld Lambda, ld t) {
    if (order == 1) return L * Lambda * t;
    return 2 * L * static_cast<ld>(s2_blocks(order)) * Lambda * t;
}

ld safe_exp(ld x) { return x > 11000 ? std::numeric_limits<ld>::infinity() : std::exp(x); }

}  // namespace

std::uint64_t r_analytic(int order, double L, double Lambda, double t, double epsilon) {
    check_scalars(L, Lambda, t, epsilon);
    s2_blocks(order);
    const ld e = std::numbers::e_v<ld>;
    const ld a = scaled_length(order, L, Lambda, t);
    if (order == 1) return ceil_u64(std::max(a, e * a * a / epsilon));
    const int k = order / 2;
    ld second = std::pow(e * std::pow(a, static_cast<ld>(2 * k + 1)) / (3 * static_cast<ld>(epsilon)),
                         static_cast<ld>(1) / (2 * k));
    return ceil_u64(std::max(a, second));
}

double minimized_error(int order, double L, double Lambda, double t, std::uint64_t r) {
    const ld a = scaled_length(order, L, Lambda, t);
    const ld rr = static_cast<ld>(r);
    if (order == 1) return static_cast<double>(a * a / rr * safe_exp(a / rr));
    const int k = order / 2;
    ld lg = (2 * k + 1) * std::log(a) - std::log(static_cast<ld>(3)) - 2 * k * std::log(rr) + a / rr;
    return static_cast<double>(safe_exp(lg));
}

std::uint64_t r_minimized(int order, double L, double Lambda, double t, double epsilon) {
    check_scalars(L, Lambda, t, epsilon);
    s2_blocks(order);
    return doubling_search([&](std::uint64_t r) { return minimized_error(order, L, Lambda, t, r) <= epsilon; });
}

std::int64_t eval_T2(int n) {
    if (n < 3) throw InvalidSize("T2 needs n >= 3");
    if (n == 3) return 194;
    const std::int64_t m = n;
    return 40 * m * m - 58 * m;
}

std::int64_t eval_T4(int n) {
    if (n < 3) throw InvalidSize("T4 needs n >= 3");
    switch (n) {
        case 3: return 23073564672LL;
        case 4: return 94192316416LL;
        case 5: return 278878851840LL;
        default: break;
    }
    const __int128 m = n;
    __int128 v = 1280000000 * m * m * m * m - 7701760000LL * m * m * m + 23685120000LL * m * m - 30224677632LL * m;
    return static_cast<std::int64_t>(v);
}

double commutator_error(int order, int n, double t, std::uint64_t r, double Lambda) {
    const ld rr = static_cast<ld>(r);
    const ld lt = static_cast<ld>(Lambda) * t;
    const ld L = 4.0L * n;
    auto term = [](ld log_mag) { return safe_exp(log_mag); };
    switch (order) {
        case 1: {
            const ld C = static_cast<ld>(10) * n;  // non-commuting pairs of the chain ordering
            const ld a = L * lt;
            return static_cast<double>(C * lt * lt / rr + term(3 * std::log(a) - std::log(3.0L) - 2 * std::log(rr) + a / rr));
        }
        case 2: {
            const ld a = 4.0L * n * lt;
            ld first = lt * lt * lt * static_cast<ld>(eval_T2(n)) / (rr * rr);
            ld second = term(std::log(4.0L / 3.0L) + 4 * std::log(a) - 3 * std::log(rr) + 2 * a / rr);
            return static_cast<double>(first + second);
        }
        case 4: {
            const ld p = 1.0L / (4.0L - std::cbrt(4.0L));
            const ld b = 4 * p - 1;
            const ld a = 20.0L * b * n * lt;
            ld first = term(5 * std::log(b * lt / 2) + std::log(static_cast<ld>(eval_T4(n))) - std::log(120.0L) -
                            4 * std::log(rr));
            ld second = term(std::log(2.0L / 720.0L) + 6 * std::log(a) - 5 * std::log(rr) + a / rr);
            return static_cast<double>(first + second);
        }
        default:
            throw UnsupportedOrder("commutator bound defined only for orders 1, 2, 4");
    }
}

std::uint64_t r_commutator(int order, int n, double t, double epsilon, double Lambda) {
    if (order != 1 && order != 2 && order != 4)
        throw UnsupportedOrder("commutator bound defined only for orders 1, 2, 4");
    if (n < 3) throw InvalidSize("commutator bound needs n >= 3");
    check_scalars(1, Lambda, t, epsilon);
    return doubling_search([&](std::uint64_t r) { return commutator_error(order, n, t, r, Lambda) <= epsilon; });
}

PowerLaw paper_fit(int order) {
    switch (order) {
        case 1: return {2417, 1.964};
        case 2: return {39.47, 1.883};
        case 4: return {4.035, 1.555};
        case 6: return {1.789, 1.311};
        case 8: return {1.144, 1.141};
        default: throw UnsupportedOrder("PF order must be 1, 2, 4, 6 or 8");
    }
}

std::uint64_t r_empirical(const PowerLaw& fit, int n) {
    return ceil_u64(static_cast<ld>(fit.c) * std::pow(static_cast<ld>(n), static_cast<ld>(fit.gamma)));
}

std::uint64_t r_empirical(int order, int n) { return r_empirical(paper_fit(order), n); }

std::uint64_t count_noncommuting_pairs(const SpinChainHamiltonian& H) {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < H.terms.size(); ++i)
        for (std::size_t j = i + 1; j < H.terms.size(); ++j)
            if (!terms_commute(H.terms[i], H.terms[j])) ++c;
    return c;
}

TripleClasses count_triple_classes(const SpinChainHamiltonian& H) {
    if (H.n > 12) throw InvalidSize("triple enumeration limited to n <= 12");
    std::vector<PauliTerm> aug = H.terms;
    aug.insert(aug.end(), H.terms.rbegin(), H.terms.rend());
    const std::size_t m = aug.size();
    std::vector<std::int8_t> f(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) f[i * m + j] = terms_commute(aug[i], aug[j]) ? 1 : -1;
    TripleClasses out;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j && f[i * m + j] < 0) ++out.D;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const int fij = f[i * m + j];
            for (std::size_t k = j + 1; k < m; ++k) {
                const int fjk = f[j * m + k], fik = f[i * m + k];
                if (fij > 0 && fjk > 0 && fik > 0) ++out.T1;
                else if ((fij > 0 && fjk < 0 && fik < 0) || (fij < 0 && fik < 0 && fjk > 0)) ++out.T2;
                else if (fij < 0 && fjk < 0 && fik > 0) ++out.T3;
                else ++out.T4;
            }
        }
    return out;
}

std::uint64_t pf_segments(const SpinChainHamiltonian& H, int order, BoundKind bound, double t, double epsilon) {
    const double L = static_cast<double>(H.size());
    switch (bound) {
        case BoundKind::Analytic: return r_analytic(order, L, H.lambda, t, epsilon);
        case BoundKind::Minimized: return r_minimized(order, L, H.lambda, t, epsilon);
        case BoundKind::Commutator: return r_commutator(order, H.n, t, epsilon, H.lambda);
        case BoundKind::Empirical: return r_empirical(order, H.n);
    }
    return 1;
}

SegmentPlan plan_pf(const SpinChainHamiltonian& H, int order, BoundKind bound, double t, double epsilon) {
    SegmentPlan p;
    p.algorithm = Algorithm::PF;
    p.order = order;
    p.bound = bound;
    p.n = H.n;
    p.t = t;
    p.epsilon = epsilon;
    p.r = pf_segments(H, order, bound, t, epsilon);
    return p;
}

namespace {

struct Exp {
    int term;
    double dt;
};

void s2_durations(int order, double lambda, std::vector<double>& out) {
    if (order == 2) {
        out.push_back(lambda);
        return;
    }
    const int k = order / 2;
    const double p = 1.0 / (4.0 - std::pow(4.0, 1.0 / (2 * k - 1)));
    s2_durations(order - 2, p * lambda, out);
    s2_durations(order - 2, p * lambda, out);
    s2_durations(order - 2, (1 - 4 * p) * lambda, out);
    s2_durations(order - 2, p * lambda, out);
    s2_durations(order - 2, p * lambda, out);
}

bool overlap(const PauliTerm& a, const PauliTerm& b) {
    return a.touches(b.site0) || (b.site1 >= 0 && a.touches(b.site1));
}

// Merges a new exponential into `ops` when only disjoint-support exponentials
// separate it from an earlier one with the same generator.
void push_merged(std::vector<Exp>& ops, const SpinChainHamiltonian& H, Exp e) {
    const auto& term = H.terms[static_cast<std::size_t>(e.term)];
    for (std::size_t k = ops.size(); k-- > 0;) {
        if (ops[k].term == e.term) {
            ops[k].dt += e.dt;
            return;
        }
        if (overlap(H.terms[static_cast<std::size_t>(ops[k].term)], term)) break;
    }
    ops.push_back(e);
}

void emit_exp(CircuitBlock& c, const PauliTerm& term, double dt) {
    const double theta = 2.0 * term.coeff * dt;
    if (!term.two_site()) {
        c.rz(term.site0, theta);
        return;
    }
    if (theta == 0.0) return;
    const int a = term.site0, b = term.site1;
    switch (term.axis) {
        case Axis::X:
            c.add(gates::h(a));
            c.add(gates::h(b));
            break;
        case Axis::Y:
            c.add(gates::sdg(a));
            c.add(gates::h(a));
            c.add(gates::sdg(b));
            c.add(gates::h(b));
            break;
        case Axis::Z: break;
    }
    c.add(gates::cnot(a, b));
    c.add(gates::rz(b, theta));
    c.add(gates::cnot(a, b));
    switch (term.axis) {
        case Axis::X:
            c.add(gates::h(a));
            c.add(gates::h(b));
            break;
        case Axis::Y:
            c.add(gates::h(a));
            c.add(gates::s(a));
            c.add(gates::h(b));
            c.add(gates::s(b));
            break;
        case Axis::Z: break;
    }
}

}  // namespace

std::vector<TermExp> pf_exponentials(const SpinChainHamiltonian& H, int order, double dt) {
    s2_blocks(order);
    const int L = static_cast<int>(H.size());
    std::vector<TermExp> out;
    if (order == 1) {
        for (int j = 0; j < L; ++j) out.push_back({j, dt});
        return out;
    }
    std::vector<double> durations;
    s2_durations(order, dt, durations);
    std::vector<Exp> ops;
    for (double d : durations) {
        ops.clear();
        for (int j = 0; j < L; ++j) push_merged(ops, H, {j, d / 2});
        for (int j = L - 1; j >= 0; --j) push_merged(ops, H, {j, d / 2});
        for (const auto& e : ops) out.push_back({e.term, e.dt});
    }
    return out;
}

CircuitBlock pf_segment(const SpinChainHamiltonian& H, int order, double dt) {
    CircuitBlock seg(H.n);
    for (const auto& e : pf_exponentials(H, order, dt)) emit_exp(seg, H.terms[static_cast<std::size_t>(e.term)], e.dt);
    return seg;
}

CircuitBlock synth_pf(const SpinChainHamiltonian& H, const SegmentPlan& plan) {
    if (plan.r < 1) throw std::invalid_argument("plan needs r >= 1");
    CircuitBlock c(H.n);
    c.repeat(plan.r, pf_segment(H, plan.order, plan.t / static_cast<double>(plan.r)));
    return c;
}

}  // namespace hamsim

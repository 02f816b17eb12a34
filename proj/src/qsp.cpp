#include "hamsim/qsp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "hamsim/prep.hpp"
#include "hamsim/selectv.hpp"
#include "hamsim/ts.hpp"

namespace hamsim {

namespace {
constexpr double kPi = std::numbers::pi;

double nominal_alpha(int n) { return 4.0 * n; }

void check_common(int n, double t, double epsilon) {
    if (n < 2) throw InvalidSize("chain needs n >= 2");
    if (!(t > 0)) throw std::invalid_argument("evolution time must be positive");
    if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
}

// J_0..J_kmax at x by downward recurrence, normalized with J_0 + 2 sum J_2k = 1.
std::vector<double> bessel_j(double x, int kmax) {
    std::vector<double> j(static_cast<std::size_t>(kmax) + 1, 0.0);
    if (x == 0.0) {
        j[0] = 1.0;
        return j;
    }
    const int start = std::max(kmax, static_cast<int>(x)) + 30 + static_cast<int>(4 * std::cbrt(x + 1) + std::sqrt(x + 1));
    double next = 0.0, cur = 1e-300, norm = 0.0;
    std::vector<double> all(static_cast<std::size_t>(start) + 1, 0.0);
    all[static_cast<std::size_t>(start)] = cur;
    for (int k = start; k > 0; --k) {
        const double prev = 2.0 * k / x * cur - next;
        next = cur;
        cur = prev;
        all[static_cast<std::size_t>(k - 1)] = cur;
        if (std::abs(cur) > 1e250) {
            for (int i = k - 1; i <= start; ++i) all[static_cast<std::size_t>(i)] *= 1e-250;
            cur *= 1e-250;
            next *= 1e-250;
        }
    }
    norm = all[0];
    for (int k = 2; k <= start; k += 2) norm += 2 * all[static_cast<std::size_t>(k)];
    for (int k = 0; k <= kmax; ++k) j[static_cast<std::size_t>(k)] = all[static_cast<std::size_t>(k)] / norm;
    return j;
}

bool segmented_ok(double at, std::uint64_t r, int q, double epsilon) {
    const double rr = static_cast<double>(r);
    return ja_analytic_tail(at / rr, q) <= epsilon / (8 * rr);
}

}  // namespace

const char* qsp_mode_name(QspMode m) { return m == QspMode::Segmented ? "segmented" : "full"; }

QspMode parse_qsp_mode(const std::string& s) {
    if (s == "segmented") return QspMode::Segmented;
    if (s == "full") return QspMode::Full;
    throw std::invalid_argument("unknown QSP mode: " + s);
}

JaBound parse_ja_bound(const std::string& s) {
    if (s == "analytic") return JaBound::Analytic;
    if (s == "empirical") return JaBound::Empirical;
    throw std::invalid_argument("unknown Jacobi-Anger bound: " + s);
}

double ja_analytic_tail(double x, int q) {
    if (x <= 0) return 0.0;
    return 4.0 * std::exp(q * std::log(x) - q * std::numbers::ln2 - std::lgamma(q + 1.0));
}

double ja_bessel_tail(double x, int q) {
    if (q < 0) throw std::invalid_argument("order must be nonnegative");
    const int kmax = std::max(q, static_cast<int>(x)) + 64 + static_cast<int>(8 * std::cbrt(x + 1));
    const auto j = bessel_j(x, kmax);
    double s = 0.0;
    for (int k = kmax; k >= q; --k) s += std::abs(j[static_cast<std::size_t>(k)]);
    return 2.0 * s;
}

std::uint64_t qsp_segments(int n, double t, double epsilon, int M) {
    check_common(n, t, epsilon);
    if (M < 2 || M % 2) throw std::invalid_argument("M must be a positive even number");
    const double at = nominal_alpha(n) * t;
    const int q = M / 2 + 1;
    std::uint64_t hi = 1;
    while (!segmented_ok(at, hi, q, epsilon)) {
        if (hi > (std::uint64_t(1) << 50)) throw std::runtime_error("segment count search diverged");
        hi *= 2;
    }
    std::uint64_t lo = hi / 2;  // lo fails or is zero
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (segmented_ok(at, mid, q, epsilon) ? hi : lo) = mid;
    }
    return hi;
}

int qsp_full_M(int n, double t, double epsilon, JaBound bound) {
    check_common(n, t, epsilon);
    const double at = nominal_alpha(n) * t;
    if (bound == JaBound::Analytic) {
        for (int M = 2;; M += 2) {
            if (8 * ja_analytic_tail(at, M / 2 + 1) <= epsilon) return M;
            if (M > 100000000) throw std::runtime_error("M search diverged");
        }
    }
    const int kmax = static_cast<int>(at) + 64 + static_cast<int>(40 * std::cbrt(at + 1));
    const auto j = bessel_j(at, kmax);
    std::vector<double> suffix(static_cast<std::size_t>(kmax) + 2, 0.0);
    for (int k = kmax; k >= 0; --k) suffix[static_cast<std::size_t>(k)] = suffix[static_cast<std::size_t>(k) + 1] + std::abs(j[static_cast<std::size_t>(k)]);
    for (int M = 2; M / 2 + 1 <= kmax; M += 2)
        if (8 * 2 * suffix[static_cast<std::size_t>(M / 2 + 1)] <= epsilon) return M;
    throw std::runtime_error("M search exceeded the Bessel table");
}

double qsp_success_lb(double epsilon) { return 1.0 - 2.0 * epsilon; }

double qsp_empirical_fit_M(int n) { return 9.849 * std::pow(static_cast<double>(n), 1.939); }

QspPlan plan_qsp_segmented(int n, double t, double epsilon, int M) {
    QspPlan p;
    p.mode = QspMode::Segmented;
    p.M = M;
    p.t = t;
    p.epsilon = epsilon;
    p.alpha_nominal = nominal_alpha(n);
    p.r = qsp_segments(n, t, epsilon, M);
    return p;
}

QspPlan plan_qsp_full(int n, double t, double epsilon, JaBound bound) {
    QspPlan p;
    p.mode = QspMode::Full;
    p.t = t;
    p.epsilon = epsilon;
    p.alpha_nominal = nominal_alpha(n);
    p.M = qsp_full_M(n, t, epsilon, bound);
    p.r = 1;
    return p;
}

std::vector<double> placeholder_angles(int M, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    std::vector<double> a(static_cast<std::size_t>(M));
    for (auto& x : a) x = u(rng);
    return a;
}

void use_placeholder_angles(QspPlan& plan, std::uint64_t seed) {
    const auto pair = placeholder_angles(2, seed);
    std::vector<double> a(static_cast<std::size_t>(plan.M));
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = pair[i % 2];
    plan.angles = {a};
    plan.placeholder = true;
}

std::vector<std::vector<double>> read_angle_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open angle file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("angle file " + path + ": " + e.what());
    }
    if (j.is_object()) j = j.at("angles");
    if (!j.is_array() || j.empty()) throw std::runtime_error("angle file " + path + ": expected a list of phase lists");
    std::vector<std::vector<double>> out;
    for (const auto& seg : j) {
        if (!seg.is_array()) throw std::runtime_error("angle file " + path + ": each segment must be a list");
        out.push_back(seg.get<std::vector<double>>());
    }
    return out;
}

void write_angle_file(const std::string& path, const std::vector<std::vector<double>>& angles) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write angle file " + path);
    out << nlohmann::json{{"angles", angles}}.dump(1) << "\n";
}

QspLayout qsp_layout(int n) {
    if (n < 2) throw InvalidSize("chain needs n >= 2");
    QspLayout l;
    l.n = n;
    l.w = select_width(4 * n);
    int next = 0;
    for (int i = 0; i < n; ++i) l.system.push_back(next++);
    l.b = next++;
    for (int i = 0; i < l.w; ++i) l.reg.push_back(next++);
    const int pool = std::max(select_ancillas(l.w, true), mcx_ancillas(l.w));
    for (int i = 0; i < pool; ++i) l.pool.push_back(next++);
    l.total = next;
    return l;
}

int qsp_qubits(int n) { return qsp_layout(n).total; }

std::vector<double> qsp_g_amplitudes(const SpinChainHamiltonian& H) {
    const double nominal = nominal_alpha(H.n);
    const std::size_t L = H.size();
    auto a = coeff_amplitudes(H, H.alpha);
    // A spare index carries the deficit 4n - alpha; select leaves it untouched,
    // which only shifts H by a multiple of the identity.
    if (L < a.size() && H.alpha <= nominal) {
        a = coeff_amplitudes(H, nominal);
        a[L] = std::sqrt(std::max(0.0, 1.0 - H.alpha / nominal));
    }
    return a;
}

double qsp_block_alpha(const SpinChainHamiltonian& H) {
    const std::size_t m = std::size_t(1) << select_width(static_cast<int>(H.size()));
    return (H.size() < m && H.alpha <= nominal_alpha(H.n)) ? nominal_alpha(H.n) : H.alpha;
}

namespace {

struct SegmentParts {
    CircuitBlock ug;
    SelectSpec spec;
    std::vector<int> refl;
};

SegmentParts segment_parts(const SpinChainHamiltonian& H, const QspLayout& l) {
    if (l.n != H.n) throw std::invalid_argument("layout does not match Hamiltonian");
    SegmentParts p{CircuitBlock(l.total), {}, {l.b}};
    emit_generic_state_prep(p.ug, l.reg, qsp_g_amplitudes(H));
    p.spec.w = l.w;
    p.spec.gamma = static_cast<int>(H.size());
    p.spec.control = l.reg;
    p.spec.targets = hamiltonian_targets(H, l.system.front(), false);
    p.spec.extra_control = l.b;
    p.spec.ancillas.assign(l.pool.begin(), l.pool.begin() + select_ancillas(l.w, true));
    p.refl.insert(p.refl.end(), l.reg.begin(), l.reg.end());
    return p;
}

// V_{phi_a} followed by V^dag_{phi_b + pi}. The U_G^dag closing the first
// reflection and the U_G opening the second cancel.
CircuitBlock iterate_pair(const QspLayout& l, const SegmentParts& p, double phi_a, double phi_b) {
    auto reflect = [&](CircuitBlock& c) {
        for (int q : l.reg) c.add(gates::x(q));
        emit_mcz(c, p.refl, l.pool);
        for (int q : l.reg) c.add(gates::x(q));
    };
    CircuitBlock c(l.total);
    c.rz(l.b, -phi_a);
    c.add(gates::h(l.b));
    emit_select(c, p.spec);
    c.append_inverse(p.ug);
    reflect(c);
    c.add(gates::s(l.b));
    c.add(gates::h(l.b));
    c.rz(l.b, phi_a);

    const double phi = phi_b + kPi;
    c.rz(l.b, -phi);
    c.add(gates::h(l.b));
    reflect(c);
    c.append(p.ug);
    emit_select(c, p.spec);
    c.add(gates::sdg(l.b));
    c.add(gates::h(l.b));
    c.rz(l.b, phi);
    return c;
}

}  // namespace

CircuitBlock qsp_segment(const SpinChainHamiltonian& H, const QspLayout& l, const std::vector<double>& phases) {
    if (phases.empty() || phases.size() % 2) throw std::invalid_argument("QSP needs an even, nonzero number of phases");
    const SegmentParts parts = segment_parts(H, l);
    CircuitBlock c(l.total);
    c.add(gates::h(l.b));
    c.append(parts.ug);
    // Runs of identical phase pairs become one repeated block.
    for (std::size_t i = 0; i < phases.size();) {
        std::size_t j = i + 2;
        while (j < phases.size() && phases[j] == phases[i] && phases[j + 1] == phases[i + 1]) j += 2;
        CircuitBlock pair = iterate_pair(l, parts, phases[i], phases[i + 1]);
        if (j - i == 2) c.append(pair);
        else c.repeat((j - i) / 2, std::move(pair));
        i = j;
    }
    c.append_inverse(parts.ug);
    c.add(gates::h(l.b));
    return c;
}

CircuitBlock synth_qsp(const SpinChainHamiltonian& H, const QspPlan& plan) {
    if (plan.angles.empty()) throw std::invalid_argument("QSP synthesis needs phases (angle file or placeholders)");
    if (plan.placeholder && plan.mode == QspMode::Segmented)
        throw PlaceholderAngles("segmented synthesis requires genuine phases; placeholders are only for full-mode counting");
    for (const auto& a : plan.angles)
        if (static_cast<int>(a.size()) != plan.M)
            throw std::invalid_argument("angle list has " + std::to_string(a.size()) + " phases, expected " + std::to_string(plan.M));
    if (plan.angles.size() != 1 && plan.angles.size() != plan.r)
        throw std::invalid_argument("angle file must hold one list or one list per segment");
    const QspLayout l = qsp_layout(H.n);
    CircuitBlock c(l.total);
    if (plan.angles.size() == 1) {
        c.repeat(plan.r, qsp_segment(H, l, plan.angles.front()));
    } else {
        for (const auto& a : plan.angles) c.append(qsp_segment(H, l, a));
    }
    return c;
}

CircuitBlock synth_qsp_structure(const SpinChainHamiltonian& H, const QspPlan& plan, std::uint64_t seed) {
    QspPlan p = plan;
    use_placeholder_angles(p, seed);
    p.mode = QspMode::Full;
    return synth_qsp(H, p);
}

}  // namespace hamsim

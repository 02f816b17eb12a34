#include "hamsim/sim.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hamsim {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

void check_cap(int qubits) {
    if (qubits > dense_cap())
        throw InvalidSize("dense simulation limited to " + std::to_string(dense_cap()) + " qubits, got " +
                          std::to_string(qubits));
}

inline std::uint64_t bit_of(int qubits, int q) { return std::uint64_t(1) << (qubits - 1 - q); }

void apply_diag(cplx* psi, std::uint64_t dim, std::uint64_t mask, cplx phase) {
    for (std::uint64_t i = 0; i < dim; ++i)
        if (i & mask) psi[i] *= phase;
}

void apply_1q(cplx* psi, std::uint64_t dim, std::uint64_t mask, cplx a, cplx b, cplx c, cplx d) {
    for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & mask) continue;
        cplx v0 = psi[i], v1 = psi[i | mask];
        psi[i] = a * v0 + b * v1;
        psi[i | mask] = c * v0 + d * v1;
    }
}

}  // namespace

int sim_threads() {
    if (const char* env = std::getenv("HAMSIM_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void apply_gate(cplx* psi, int qubits, const Gate& g) {
    const std::uint64_t dim = std::uint64_t(1) << qubits;
    const std::uint64_t m0 = bit_of(qubits, g.q[0]);
    const double r2 = 1.0 / std::sqrt(2.0);
    switch (g.kind) {
        case GateKind::X: apply_1q(psi, dim, m0, 0, 1, 1, 0); break;
        case GateKind::Y: apply_1q(psi, dim, m0, 0, -kI, kI, 0); break;
        case GateKind::Z: apply_diag(psi, dim, m0, -1.0); break;
        case GateKind::H: apply_1q(psi, dim, m0, r2, r2, r2, -r2); break;
        case GateKind::S: apply_diag(psi, dim, m0, kI); break;
        case GateKind::Sdg: apply_diag(psi, dim, m0, -kI); break;
        case GateKind::T: apply_diag(psi, dim, m0, std::polar(1.0, kPi / 4)); break;
        case GateKind::Tdg: apply_diag(psi, dim, m0, std::polar(1.0, -kPi / 4)); break;
        case GateKind::Rz: {
            const cplx p0 = std::polar(1.0, -g.theta / 2), p1 = std::polar(1.0, g.theta / 2);
            for (std::uint64_t i = 0; i < dim; ++i) psi[i] *= (i & m0) ? p1 : p0;
            break;
        }
        case GateKind::CNOT: {
            const std::uint64_t mt = bit_of(qubits, g.q[1]);
            for (std::uint64_t i = 0; i < dim; ++i)
                if ((i & m0) && !(i & mt)) std::swap(psi[i], psi[i | mt]);
            break;
        }
        case GateKind::CZ: {
            const std::uint64_t both = m0 | bit_of(qubits, g.q[1]);
            for (std::uint64_t i = 0; i < dim; ++i)
                if ((i & both) == both) psi[i] = -psi[i];
            break;
        }
        case GateKind::Toffoli: {
            const std::uint64_t m1 = bit_of(qubits, g.q[1]), mt = bit_of(qubits, g.q[2]);
            const std::uint64_t want = ((g.pol & 1) ? m0 : 0) | ((g.pol & 2) ? m1 : 0);
            for (std::uint64_t i = 0; i < dim; ++i)
                if (!(i & mt) && (i & (m0 | m1)) == want) std::swap(psi[i], psi[i | mt]);
            break;
        }
    }
}

void apply_circuit(CVector& psi, const CircuitBlock& c) {
    if (psi.size() != (Eigen::Index(1) << c.qubits)) throw std::invalid_argument("state size does not match circuit");
    for (const auto& it : c.items) {
        if (const auto* g = std::get_if<Gate>(&it)) {
            apply_gate(psi.data(), c.qubits, *g);
        } else {
            const auto& rep = std::get<Repeat>(it);
            for (std::uint64_t k = 0; k < rep.count; ++k) apply_circuit(psi, *rep.body);
        }
    }
}

CVector basis_state(int qubits, const std::vector<int>& ones) {
    CVector v = CVector::Zero(Eigen::Index(1) << qubits);
    std::uint64_t idx = 0;
    for (int q : ones) idx |= bit_of(qubits, q);
    v(static_cast<Eigen::Index>(idx)) = 1.0;
    return v;
}

CMatrix matrix_power(const CMatrix& U, std::uint64_t k) {
    CMatrix result = CMatrix::Identity(U.rows(), U.cols());
    CMatrix base = U;
    bool first = true;
    while (k) {
        if (k & 1) {
            if (first) result = base;
            else result = result * base;
            first = false;
        }
        k >>= 1;
        if (k) base = base * base;
    }
    return result;
}

namespace {

void apply_block_columns(CMatrix& U, const CircuitBlock& c);

void apply_gates_columns(CMatrix& U, int qubits, const std::vector<Gate>& run) {
    if (run.empty()) return;
    const Eigen::Index cols = U.cols();
#pragma omp parallel for schedule(static) num_threads(sim_threads())
    for (Eigen::Index j = 0; j < cols; ++j)
        for (const auto& g : run) apply_gate(U.col(j).data(), qubits, g);
}

void apply_block_columns(CMatrix& U, const CircuitBlock& c) {
    std::vector<Gate> run;
    for (const auto& it : c.items) {
        if (const auto* g = std::get_if<Gate>(&it)) {
            run.push_back(*g);
            continue;
        }
        apply_gates_columns(U, c.qubits, run);
        run.clear();
        const auto& rep = std::get<Repeat>(it);
        U = matrix_power(circuit_unitary(*rep.body), rep.count) * U;
    }
    apply_gates_columns(U, c.qubits, run);
}

}  // namespace

CMatrix circuit_unitary(const CircuitBlock& c) {
    check_cap(c.qubits);
    CMatrix U = CMatrix::Identity(Eigen::Index(1) << c.qubits, Eigen::Index(1) << c.qubits);
    apply_block_columns(U, c);
    return U;
}

namespace {

bool conserves_parity(const SpinChainHamiltonian& H);
std::array<std::vector<Eigen::Index>, 2> parity_sectors(int n);

CMatrix hermitian_exp(const CMatrix& Hm, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(Hm);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    const auto& vals = es.eigenvalues();
    const CMatrix& V = es.eigenvectors();
    CMatrix scaled = V;
    for (Eigen::Index k = 0; k < vals.size(); ++k) scaled.col(k) *= std::polar(1.0, -vals(k) * t);
    return scaled * V.adjoint();
}

}  // namespace

CMatrix exact_evolution(const SpinChainHamiltonian& H, double t) {
    check_cap(H.n);
    const CMatrix Hm = hamiltonian_matrix(H);
    if (!conserves_parity(H) || H.n < 2) return hermitian_exp(Hm, t);
    CMatrix U = CMatrix::Zero(Hm.rows(), Hm.cols());
    for (const auto& idx : parity_sectors(H.n)) U(idx, idx) = hermitian_exp(Hm(idx, idx), t);
    return U;
}

double spectral_distance(const CMatrix& A, const CMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) throw std::invalid_argument("dimension mismatch");
    const CMatrix D = A - B;
    const Eigen::Index n = D.cols();
    if (n == 0) return 0.0;
    if (D.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> nd;
    double best = 0.0;
    bool converged_all = true;
    // Two restarts guard against a start vector orthogonal to the top singular vector.
    for (int restart = 0; restart < 2; ++restart) {
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
        v.normalize();
        double prev = -1.0, lam = 0.0;
        bool converged = false;
        for (int it = 0; it < 400; ++it) {
            CVector w = D.adjoint() * (D * v);
            lam = std::real(v.dot(w));
            double nw = w.norm();
            if (nw == 0.0) {
                lam = 0.0;
                converged = true;
                break;
            }
            v = w / nw;
            if (prev >= 0 && std::abs(lam - prev) <= 1e-10 * std::max(1e-300, lam)) {
                converged = true;
                break;
            }
            prev = lam;
        }
        converged_all = converged_all && converged;
        best = std::max(best, std::sqrt(std::max(0.0, lam)));
    }
    if (!converged_all) {
        Eigen::BDCSVD<CMatrix> svd(D);
        return svd.singularValues()(0);
    }
    return best;
}

double spectral_distance_up_to_phase(const CMatrix& A, const CMatrix& B) {
    cplx tr = (B.adjoint() * A).trace();
    cplx ph = std::abs(tr) > 0 ? tr / std::abs(tr) : cplx(1.0);
    return spectral_distance(A, ph * B);
}

CMatrix pf_segment_unitary(const SpinChainHamiltonian& H, int order, double dt) {
    check_cap(H.n);
    const int n = H.n;
    const std::uint64_t dim = std::uint64_t(1) << n;
    CMatrix U = CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    const auto seq = pf_exponentials(H, order, dt);
    // Per exponential: P|y> = ph(y)|y ^ flip>; exp(-i phi P) = cos(phi) - i sin(phi) P.
    struct Prepared {
        std::uint64_t flip, zmask, ymask;
        double phi;
    };
    std::vector<Prepared> prep;
    prep.reserve(seq.size());
    for (const auto& e : seq) {
        const auto& term = H.terms[static_cast<std::size_t>(e.term)];
        Prepared p{0, 0, 0, term.coeff * e.dt};
        for (int s : {term.site0, term.site1}) {
            if (s < 0) continue;
            const std::uint64_t m = bit_of(n, s);
            if (term.axis == Axis::X) p.flip |= m;
            if (term.axis == Axis::Y) {
                p.flip |= m;
                p.ymask |= m;
            }
            if (term.axis == Axis::Z) p.zmask |= m;
        }
        prep.push_back(p);
    }
    const Eigen::Index cols = U.cols();
#pragma omp parallel for schedule(static) num_threads(sim_threads())
    for (Eigen::Index j = 0; j < cols; ++j) {
        cplx* v = U.col(j).data();
        for (const auto& p : prep) {
            const double c = std::cos(p.phi), s = std::sin(p.phi);
            if (p.flip == 0) {
                const cplx e0 = std::polar(1.0, -p.phi), e1 = std::polar(1.0, p.phi);
                for (std::uint64_t y = 0; y < dim; ++y) v[y] *= (std::popcount(y & p.zmask) & 1) ? e1 : e0;
                continue;
            }
            const int ny = std::popcount(p.ymask);
            // Y|b> = i(-1)^b|1-b>, Z|b> = (-1)^b|b>.
            const cplx yph = ny == 0 ? cplx(1) : ny == 1 ? kI : ny == 2 ? cplx(-1) : -kI;
            for (std::uint64_t y = 0; y < dim; ++y) {
                const std::uint64_t x = y ^ p.flip;
                if (x < y) continue;
                // P|y> = c(y)|x>, P|x> = c(x)|y>.
                auto coef = [&](std::uint64_t b) {
                    const int sgn = std::popcount(b & (p.ymask | p.zmask)) & 1;
                    return sgn ? -yph : yph;
                };
                const cplx cy = coef(y), cx = coef(x);
                const cplx vy = v[y], vx = v[x];
                v[x] = c * vx - kI * s * cy * vy;
                v[y] = c * vy - kI * s * cx * vx;
            }
        }
    }
    return U;
}

CMatrix pf_unitary(const SpinChainHamiltonian& H, int order, double t, std::uint64_t r) {
    if (r == 0) throw std::invalid_argument("r must be positive");
    return matrix_power(pf_segment_unitary(H, order, t / static_cast<double>(r)), r);
}

namespace {

// True when every term flips an even number of spins, so the global Z parity
// is conserved and all evolutions are block diagonal in the parity sectors.
bool conserves_parity(const SpinChainHamiltonian& H) {
    for (const auto& term : H.terms) {
        int flips = 0;
        for (int s : {term.site0, term.site1})
            if (s >= 0 && term.axis != Axis::Z) ++flips;
        if (flips % 2) return false;
    }
    return true;
}

std::array<std::vector<Eigen::Index>, 2> parity_sectors(int n) {
    std::array<std::vector<Eigen::Index>, 2> out;
    const std::uint64_t dim = std::uint64_t(1) << n;
    for (std::uint64_t i = 0; i < dim; ++i) out[std::popcount(i) & 1].push_back(static_cast<Eigen::Index>(i));
    return out;
}

}  // namespace

double pf_error(const SpinChainHamiltonian& H, int order, double t, std::uint64_t r, const CMatrix& exact) {
    if (r == 0) throw std::invalid_argument("r must be positive");
    const CMatrix seg = pf_segment_unitary(H, order, t / static_cast<double>(r));
    if (!conserves_parity(H) || H.n < 2) return spectral_distance(matrix_power(seg, r), exact);
    double d = 0.0;
    for (const auto& idx : parity_sectors(H.n)) {
        const CMatrix s = seg(idx, idx);
        const CMatrix e = exact(idx, idx);
        d = std::max(d, spectral_distance(matrix_power(s, r), e));
    }
    return d;
}

std::uint64_t empirical_r_search(const SpinChainHamiltonian& H, int order, double t, double epsilon,
                                 std::uint64_t hint) {
    const CMatrix exact = exact_evolution(H, t);
    auto pred = [&](std::uint64_t r) { return pf_error(H, order, t, r, exact) <= epsilon; };
    if (hint == 0) return doubling_search(pred);
    // Bracket the threshold with growing steps away from the hint, then bisect.
    std::uint64_t lo = 0, hi = 0;  // lo fails (0 stands for "none"), hi passes
    std::uint64_t step = std::max<std::uint64_t>(1, hint / 16);
    if (pred(hint)) {
        hi = hint;
        while (hi > 1) {
            const std::uint64_t cand = hi > step ? hi - step : 1;
            if (!pred(cand)) {
                lo = cand;
                break;
            }
            hi = cand;
            step *= 2;
        }
    } else {
        lo = hint;
        for (;;) {
            const std::uint64_t cand = lo + step;
            if (pred(cand)) {
                hi = cand;
                break;
            }
            lo = cand;
            if (step > (std::uint64_t(1) << 40)) throw std::overflow_error("segment search diverged");
            step *= 2;
        }
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (pred(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

FitResult powerlaw_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("power-law fit needs at least 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [n, r] : points) {
        if (n <= 0 || r <= 0) throw std::invalid_argument("power-law fit needs positive data");
        const double x = std::log(n), y = std::log(r);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(points.size());
    const double den = m * sxx - sx * sx;
    if (std::abs(den) < 1e-12 * std::max(1.0, m * sxx)) throw std::invalid_argument("degenerate x values in fit");
    FitResult f;
    f.gamma = (m * sxy - sx * sy) / den;
    const double logc = (sy - f.gamma * sx) / m;
    f.c = std::exp(logc);
    for (auto [n, r] : points) {
        const double e = std::log(r) - logc - f.gamma * std::log(n);
        f.residual += e * e;
    }
    f.points = points;
    return f;
}

}  // namespace hamsim

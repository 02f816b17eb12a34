#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hamsim/circuit.hpp"
#include "hamsim/model.hpp"

namespace hamsim {

enum class Algorithm { PF, TS, QSP };
enum class BoundKind { Analytic, Minimized, Commutator, Empirical };

const char* bound_name(BoundKind b);
BoundKind parse_bound(const std::string& s);

bool valid_pf_order(int order);
// Number of second-order blocks in one segment (0 for order 1).
int s2_blocks(int order);

struct SegmentPlan {
    Algorithm algorithm = Algorithm::PF;
    int order = 4;
    BoundKind bound = BoundKind::Commutator;
    int n = 0;
    double t = 0.0;
    double epsilon = 1e-3;
    std::uint64_t r = 1;
};

class UnsupportedOrder : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::uint64_t r_analytic(int order, double L, double Lambda, double t, double epsilon);
std::uint64_t r_minimized(int order, double L, double Lambda, double t, double epsilon);
std::uint64_t r_commutator(int order, int n, double t, double epsilon, double Lambda = 1.0);

// Error expressions whose minimal satisfying r the searches return.
double minimized_error(int order, double L, double Lambda, double t, std::uint64_t r);
double commutator_error(int order, int n, double t, std::uint64_t r, double Lambda = 1.0);

std::int64_t eval_T2(int n);
std::int64_t eval_T4(int n);

struct PowerLaw {
    double c = 0.0;
    double gamma = 0.0;
};
PowerLaw paper_fit(int order);
std::uint64_t r_empirical(int order, int n);
std::uint64_t r_empirical(const PowerLaw& fit, int n);

std::uint64_t count_noncommuting_pairs(const SpinChainHamiltonian& H);

struct TripleClasses {
    std::uint64_t D = 0, T1 = 0, T2 = 0, T3 = 0, T4 = 0;
    // D/24 + T2/12 + T3/6 + T4/8, exact when the division is.
    double weighted() const { return D / 24.0 + T2 / 12.0 + T3 / 6.0 + T4 / 8.0; }
};
TripleClasses count_triple_classes(const SpinChainHamiltonian& H);

// Smallest r >= 1 with pred(r) true, by doubling then bisection; pred must be monotone.
template <class Pred>
std::uint64_t doubling_search(Pred&& pred) {
    std::uint64_t hi = 1;
    while (!pred(hi)) {
        if (hi > (std::uint64_t(1) << 62)) throw std::overflow_error("segment search diverged");
        hi *= 2;
    }
    if (hi == 1) return 1;
    std::uint64_t lo = hi / 2;  // fails
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (pred(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

std::uint64_t pf_segments(const SpinChainHamiltonian& H, int order, BoundKind bound, double t, double epsilon);
SegmentPlan plan_pf(const SpinChainHamiltonian& H, int order, BoundKind bound, double t, double epsilon);

struct TermExp {
    int term = 0;
    double dt = 0.0;  // exp(-i dt coeff P) for term `term`
};
// Exponential sequence of one segment after merging, in time order.
std::vector<TermExp> pf_exponentials(const SpinChainHamiltonian& H, int order, double dt);

// One segment S_{2k}(-i dt) (or the first-order product) lowered to Clifford+Rz.
CircuitBlock pf_segment(const SpinChainHamiltonian& H, int order, double dt);
CircuitBlock synth_pf(const SpinChainHamiltonian& H, const SegmentPlan& plan);

}  // namespace hamsim

#include "hamsim/prep.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hamsim {

namespace {

// Rx(-pi/2) frame: Ry(theta) = (H S H) Rz(-theta) (H Sdg H).
void enter_y_frame(CircuitBlock& c, int q) {
    c.add(gates::h(q));
    c.add(gates::sdg(q));
    c.add(gates::h(q));
}

void leave_y_frame(CircuitBlock& c, int q) {
    c.add(gates::h(q));
    c.add(gates::s(q));
    c.add(gates::h(q));
}

}  // namespace

void emit_ry(CircuitBlock& c, int q, double theta) {
    if (theta == 0.0) return;
    enter_y_frame(c, q);
    c.rz(q, -theta);
    leave_y_frame(c, q);
}

void emit_controlled_ry(CircuitBlock& c, int control, int target, double theta) {
    if (theta == 0.0) return;
    enter_y_frame(c, target);
    c.rz(target, -theta / 2);
    c.add(gates::cnot(control, target));
    c.rz(target, theta / 2);
    c.add(gates::cnot(control, target));
    leave_y_frame(c, target);
}

namespace {

// Gray-code multiplexor body; `sign` maps the rotation angle onto Rz.
void emit_multiplexed_rz(CircuitBlock& c, const std::vector<int>& controls, int target,
                         const std::vector<double>& angles, double sign) {
    const std::size_t k = controls.size();
    const std::size_t m = std::size_t(1) << k;
    // Rotation i carries sign (-1)^{v . gray(i)} for control value v.
    std::vector<double> theta(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t g = i ^ (i >> 1);
        double acc = 0.0;
        for (std::size_t v = 0; v < m; ++v) acc += (std::popcount(v & g) & 1) ? -angles[v] : angles[v];
        theta[i] = acc / static_cast<double>(m);
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (std::abs(theta[i]) > 1e-15) c.rz(target, sign * theta[i]);
        const std::size_t g0 = i ^ (i >> 1), j = (i + 1) % m, g1 = j ^ (j >> 1);
        const std::size_t flipped = static_cast<std::size_t>(std::countr_zero(g0 ^ g1));
        c.add(gates::cnot(controls[k - 1 - flipped], target));
    }
}

}  // namespace

void emit_uniform_ry(CircuitBlock& c, const std::vector<int>& controls, int target,
                     const std::vector<double>& angles) {
    const std::size_t k = controls.size();
    if (angles.size() != (std::size_t(1) << k)) throw std::invalid_argument("uniformly controlled rotation needs 2^k angles");
    if (k == 0) {
        emit_ry(c, target, angles[0]);
        return;
    }
    enter_y_frame(c, target);
    emit_multiplexed_rz(c, controls, target, angles, -1.0);
    leave_y_frame(c, target);
}

void emit_uniform_rz(CircuitBlock& c, const std::vector<int>& controls, int target,
                     const std::vector<double>& angles) {
    const std::size_t k = controls.size();
    if (angles.size() != (std::size_t(1) << k)) throw std::invalid_argument("uniformly controlled rotation needs 2^k angles");
    if (k == 0) {
        if (std::abs(angles[0]) > 1e-15) c.rz(target, angles[0]);
        return;
    }
    emit_multiplexed_rz(c, controls, target, angles, 1.0);
}

std::vector<std::vector<double>> state_prep_angles(const std::vector<double>& amplitudes) {
    const std::size_t m = amplitudes.size();
    if (m == 0 || (m & (m - 1))) throw std::invalid_argument("amplitude count must be a power of two");
    int w = std::countr_zero(m);
    std::vector<double> weight(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (amplitudes[i] < 0) throw std::invalid_argument("amplitudes must be nonnegative");
        weight[i] = amplitudes[i] * amplitudes[i];
    }
    std::vector<std::vector<double>> out(static_cast<std::size_t>(w));
    for (int d = 0; d < w; ++d) {
        const std::size_t nodes = std::size_t(1) << d, span = m >> d, half = span / 2;
        out[static_cast<std::size_t>(d)].resize(nodes);
        for (std::size_t p = 0; p < nodes; ++p) {
            double w0 = 0, w1 = 0;
            for (std::size_t i = 0; i < half; ++i) {
                w0 += weight[p * span + i];
                w1 += weight[p * span + half + i];
            }
            out[static_cast<std::size_t>(d)][p] = (w0 + w1 > 0) ? 2.0 * std::atan2(std::sqrt(w1), std::sqrt(w0)) : 0.0;
        }
    }
    return out;
}

void emit_state_prep(CircuitBlock& c, const std::vector<int>& qubits, const std::vector<double>& amplitudes) {
    if (amplitudes.size() != (std::size_t(1) << qubits.size()))
        throw std::invalid_argument("amplitude count does not match register");
    const auto angles = state_prep_angles(amplitudes);
    for (std::size_t d = 0; d < qubits.size(); ++d) {
        std::vector<int> ctl(qubits.begin(), qubits.begin() + static_cast<std::ptrdiff_t>(d));
        emit_uniform_ry(c, ctl, qubits[d], angles[d]);
    }
}

void emit_generic_state_prep(CircuitBlock& c, const std::vector<int>& qubits, const std::vector<double>& amplitudes) {
    const std::size_t m = amplitudes.size();
    if (m != (std::size_t(1) << qubits.size())) throw std::invalid_argument("amplitude count does not match register");
    std::vector<double> mag(m), phase(m);
    for (std::size_t i = 0; i < m; ++i) {
        mag[i] = std::abs(amplitudes[i]);
        phase[i] = amplitudes[i] < 0 ? std::numbers::pi : 0.0;
    }
    const auto ry = state_prep_angles(mag);
    // mean[d][p]: average phase of the subtree under node p at depth d.
    const std::size_t w = qubits.size();
    std::vector<std::vector<double>> mean(w + 1);
    mean[w] = phase;
    for (std::size_t d = w; d-- > 0;) {
        mean[d].resize(std::size_t(1) << d);
        for (std::size_t p = 0; p < mean[d].size(); ++p) mean[d][p] = 0.5 * (mean[d + 1][2 * p] + mean[d + 1][2 * p + 1]);
    }
    for (std::size_t d = 0; d < w; ++d) {
        std::vector<int> ctl(qubits.begin(), qubits.begin() + static_cast<std::ptrdiff_t>(d));
        emit_uniform_ry(c, ctl, qubits[d], ry[d]);
        std::vector<double> rz(std::size_t(1) << d);
        for (std::size_t p = 0; p < rz.size(); ++p) rz[p] = mean[d + 1][2 * p + 1] - mean[d + 1][2 * p];
        if (d == 0) {
            emit_uniform_rz(c, ctl, qubits[d], rz);
            continue;
        }
        // The phase multiplexor is kept even when every angle vanishes.
        emit_multiplexed_rz(c, ctl, qubits[d], rz, 1.0);
    }
}

}  // namespace hamsim

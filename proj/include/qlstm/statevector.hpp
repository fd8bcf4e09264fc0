// Copyright 2026 The qlstm-forecast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Dense statevector simulator for small registers.
 *
 * Basis ordering: qubit k is bit k of the amplitude index, so qubit 0 is the
 * least-significant bit. Gates are applied by pairwise amplitude updates over
 * the index pairs that differ only in the target bit; no 2^n x 2^n matrix is
 * ever formed.
 */
#pragma once

#include "qlstm/error.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qlstm {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 24;

enum class GateKind { H, RX, RY, RZ, CNOT };

inline bool is_rotation(GateKind kind) {
    return kind == GateKind::RX || kind == GateKind::RY ||
           kind == GateKind::RZ;
}

inline const char *gate_name(GateKind kind) {
    switch (kind) {
    case GateKind::H:
        return "H";
    case GateKind::RX:
        return "RX";
    case GateKind::RY:
        return "RY";
    case GateKind::RZ:
        return "RZ";
    case GateKind::CNOT:
        return "CNOT";
    }
    return "?";
}

struct GateOp {
    GateKind kind = GateKind::H;
    std::size_t target = 0;
    std::optional<std::size_t> control;
    std::optional<double> angle;

    static GateOp h(std::size_t target) { return {GateKind::H, target, {}, {}}; }
    static GateOp rx(std::size_t target, double theta) {
        return {GateKind::RX, target, {}, theta};
    }
    static GateOp ry(std::size_t target, double theta) {
        return {GateKind::RY, target, {}, theta};
    }
    static GateOp rz(std::size_t target, double theta) {
        return {GateKind::RZ, target, {}, theta};
    }
    static GateOp cnot(std::size_t control, std::size_t target) {
        return {GateKind::CNOT, target, control, {}};
    }
    static GateOp rotation(GateKind kind, std::size_t target, double theta) {
        return {kind, target, {}, theta};
    }
};

struct Circuit {
    std::size_t n_qubits = 1;
    std::vector<GateOp> ops;
};

class StateVector {
  public:
    StateVector(std::size_t n_qubits, std::vector<Complex> amplitudes)
        : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
        if (n_qubits_ == 0 || n_qubits_ > kMaxQubits) {
            throw CapacityError("register of " + std::to_string(n_qubits_) +
                                " qubits outside [1, 24]");
        }
        if (amplitudes_.size() != (std::size_t{1} << n_qubits_)) {
            throw ShapeError("amplitude count must equal 2^n_qubits");
        }
    }

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t size() const { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const {
        return amplitudes_;
    }
    [[nodiscard]] std::span<Complex> amplitudes() { return amplitudes_; }
    [[nodiscard]] const Complex &operator[](std::size_t i) const {
        return amplitudes_[i];
    }

    [[nodiscard]] double norm() const {
        double acc = 0.0;
        for (const auto &a : amplitudes_) {
            acc += std::norm(a);
        }
        return std::sqrt(acc);
    }

    /// Resets to |0...0> without reallocating.
    void reset() {
        std::fill(amplitudes_.begin(), amplitudes_.end(), Complex{0.0, 0.0});
        amplitudes_[0] = Complex{1.0, 0.0};
    }

  private:
    std::size_t n_qubits_;
    std::vector<Complex> amplitudes_;
};

[[nodiscard]] inline StateVector init_zero(std::size_t n_qubits) {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
        throw CapacityError("register of " + std::to_string(n_qubits) +
                            " qubits outside [1, 24]");
    }
    std::vector<Complex> amps(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amps[0] = Complex{1.0, 0.0};
    return StateVector(n_qubits, std::move(amps));
}

inline void validate_gate(const GateOp &gate, std::size_t n_qubits) {
    if (gate.target >= n_qubits) {
        throw IndexError(std::string(gate_name(gate.kind)) + " target " +
                         std::to_string(gate.target) + " out of range");
    }
    if (gate.kind == GateKind::CNOT) {
        if (!gate.control) {
            throw IndexError("CNOT requires a control qubit");
        }
        if (*gate.control >= n_qubits || *gate.control == gate.target) {
            throw IndexError("CNOT control " + std::to_string(*gate.control) +
                             " invalid for target " +
                             std::to_string(gate.target));
        }
    } else if (gate.control) {
        throw IndexError(std::string(gate_name(gate.kind)) +
                         " takes no control qubit");
    }
    if (is_rotation(gate.kind) != gate.angle.has_value()) {
        throw ShapeError(std::string(gate_name(gate.kind)) +
                         (gate.angle ? " takes no angle" : " requires an angle"));
    }
}

namespace detail {

// Applies the 2x2 matrix [[m00, m01], [m10, m11]] to every amplitude pair
// (i, i | bit) with bit `target` clear in i.
inline void apply_single(std::span<Complex> amps, std::size_t target,
                         Complex m00, Complex m01, Complex m10, Complex m11) {
    const std::size_t bit = std::size_t{1} << target;
    const std::size_t low_mask = bit - 1;
    const std::size_t half = amps.size() >> 1;
    for (std::size_t k = 0; k < half; ++k) {
        const std::size_t i0 = ((k & ~low_mask) << 1) | (k & low_mask);
        const std::size_t i1 = i0 | bit;
        const Complex a0 = amps[i0];
        const Complex a1 = amps[i1];
        amps[i0] = m00 * a0 + m01 * a1;
        amps[i1] = m10 * a0 + m11 * a1;
    }
}

inline void apply_cnot(std::span<Complex> amps, std::size_t control,
                       std::size_t target) {
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & cbit) != 0 && (i & tbit) == 0) {
            std::swap(amps[i], amps[i | tbit]);
        }
    }
}

// Unchecked gate kernel; callers validate once per circuit.
inline void apply_unchecked(std::span<Complex> amps, const GateOp &gate) {
    switch (gate.kind) {
    case GateKind::H: {
        const double r = 1.0 / std::sqrt(2.0);
        apply_single(amps, gate.target, r, r, r, -r);
        break;
    }
    case GateKind::RX: {
        const double c = std::cos(*gate.angle / 2.0);
        const double s = std::sin(*gate.angle / 2.0);
        apply_single(amps, gate.target, c, Complex{0.0, -s}, Complex{0.0, -s},
                     c);
        break;
    }
    case GateKind::RY: {
        const double c = std::cos(*gate.angle / 2.0);
        const double s = std::sin(*gate.angle / 2.0);
        apply_single(amps, gate.target, c, -s, s, c);
        break;
    }
    case GateKind::RZ: {
        const double c = std::cos(*gate.angle / 2.0);
        const double s = std::sin(*gate.angle / 2.0);
        apply_single(amps, gate.target, Complex{c, -s}, 0.0, 0.0,
                     Complex{c, s});
        break;
    }
    case GateKind::CNOT:
        apply_cnot(amps, *gate.control, gate.target);
        break;
    }
}

} // namespace detail

inline void apply_gate_inplace(StateVector &state, const GateOp &gate) {
    validate_gate(gate, state.n_qubits());
    detail::apply_unchecked(state.amplitudes(), gate);
}

[[nodiscard]] inline StateVector apply_gate(StateVector state,
                                            const GateOp &gate) {
    apply_gate_inplace(state, gate);
    return state;
}

inline void apply_circuit_inplace(StateVector &state, const Circuit &circuit) {
    if (circuit.n_qubits != state.n_qubits()) {
        throw ShapeError("circuit has " + std::to_string(circuit.n_qubits) +
                         " qubits, state has " +
                         std::to_string(state.n_qubits()));
    }
    for (const auto &op : circuit.ops) {
        validate_gate(op, state.n_qubits());
    }
    for (const auto &op : circuit.ops) {
        detail::apply_unchecked(state.amplitudes(), op);
    }
}

[[nodiscard]] inline StateVector apply_circuit(StateVector state,
                                               const Circuit &circuit) {
    apply_circuit_inplace(state, circuit);
    return state;
}

/// Exact <Z_qubit>: probability of bit clear minus probability of bit set.
[[nodiscard]] inline double expectation_z(const StateVector &state,
                                          std::size_t qubit) {
    if (qubit >= state.n_qubits()) {
        throw IndexError("qubit " + std::to_string(qubit) + " out of range");
    }
    const std::size_t bit = std::size_t{1} << qubit;
    double acc = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        acc += (i & bit) ? -p : p;
    }
    return acc;
}

} // namespace qlstm

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
 * Variational quantum circuit layer.
 *
 * A layer maps a classical vector v (one component per qubit) to the vector
 * of single-qubit Z expectations of
 *
 *     encoding(v) ; [ RX RY RZ on every qubit ; CNOT ring ] x n_layers
 *
 * applied to |0...0>. The ring is CNOT(k, k+1 mod n) for k = 0..n-1 and is
 * only emitted for two or more qubits.
 *
 * Gradients with respect to both the variational angles and the inputs use
 * the two-term parameter-shift rule, which is exact for exp(-i theta P / 2)
 * rotations. Input gradients chain the shift derivative of every encoding
 * angle through the derivative of the encoding map.
 */
#pragma once

#include "qlstm/error.hpp"
#include "qlstm/statevector.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qlstm {

enum class Encoding {
    /// H, RY(arctan v), RZ(arctan v^2) per qubit.
    AngleArctan,
    /// RY(v) per qubit.
    AngleLinear,
};

inline const char *encoding_name(Encoding e) {
    return e == Encoding::AngleArctan ? "angle_arctan" : "angle_linear";
}

inline Encoding parse_encoding(const std::string &name) {
    if (name == "angle_arctan") {
        return Encoding::AngleArctan;
    }
    if (name == "angle_linear") {
        return Encoding::AngleLinear;
    }
    throw UsageError("unknown encoding '" + name + "'");
}

struct VqcDescriptor {
    std::size_t n_qubits = 4;
    std::size_t n_layers = 2;
    Encoding encoding = Encoding::AngleArctan;

    [[nodiscard]] std::size_t angle_count() const {
        return n_layers * n_qubits * 3;
    }
    bool operator==(const VqcDescriptor &) const = default;
};

/// Trainable rotation angles, shape [n_layers, n_qubits, 3] (RX, RY, RZ).
struct VqcParams {
    std::size_t n_layers = 0;
    std::size_t n_qubits = 0;
    std::vector<double> angles;

    static VqcParams zeros(const VqcDescriptor &d) {
        return {d.n_layers, d.n_qubits, std::vector<double>(d.angle_count())};
    }

    [[nodiscard]] static std::size_t index(std::size_t n_qubits, std::size_t layer,
                                           std::size_t qubit, std::size_t axis) {
        return (layer * n_qubits + qubit) * 3 + axis;
    }
    double &at(std::size_t layer, std::size_t qubit, std::size_t axis) {
        return angles[index(n_qubits, layer, qubit, axis)];
    }
    [[nodiscard]] double at(std::size_t layer, std::size_t qubit,
                            std::size_t axis) const {
        return angles[index(n_qubits, layer, qubit, axis)];
    }
};

struct VqcGradients {
    /// Same layout as VqcParams::angles.
    std::vector<double> angle_grads;
    std::vector<double> input_grads;
};

namespace detail {

inline void check_vqc_shapes(const VqcDescriptor &d, const VqcParams &p,
                             std::span<const double> v) {
    if (d.n_qubits == 0 || d.n_qubits > kMaxQubits) {
        throw CapacityError("VQC needs 1..24 qubits");
    }
    require_shape(p.n_layers == d.n_layers && p.n_qubits == d.n_qubits &&
                      p.angles.size() == d.angle_count(),
                  "VQC parameter shape does not match descriptor");
    require_shape(v.size() == d.n_qubits,
                  "VQC input length " + std::to_string(v.size()) +
                      " != n_qubits " + std::to_string(d.n_qubits));
    require_finite(v, "VQC input");
}

inline constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);

/**
 * Circuit skeleton whose rotation angles are read from a slot array.
 * Encoding angles occupy the first slots, variational angles follow in
 * VqcParams order.
 */
class SlottedCircuit {
  public:
    explicit SlottedCircuit(const VqcDescriptor &d)
        : desc_(d), state_(init_zero(d.n_qubits)) {
        const std::size_t n = d.n_qubits;
        enc_per_qubit_ = d.encoding == Encoding::AngleArctan ? 2 : 1;
        for (std::size_t q = 0; q < n; ++q) {
            if (d.encoding == Encoding::AngleArctan) {
                push(GateOp::h(q), kNoSlot);
                push(GateOp::ry(q, 0.0), 2 * q);
                push(GateOp::rz(q, 0.0), 2 * q + 1);
            } else {
                push(GateOp::ry(q, 0.0), q);
            }
        }
        const std::size_t base = encoding_slots();
        static constexpr GateKind axes[3] = {GateKind::RX, GateKind::RY,
                                             GateKind::RZ};
        for (std::size_t l = 0; l < d.n_layers; ++l) {
            for (std::size_t q = 0; q < n; ++q) {
                for (std::size_t r = 0; r < 3; ++r) {
                    push(GateOp::rotation(axes[r], q, 0.0),
                         base + VqcParams::index(n, l, q, r));
                }
            }
            if (n >= 2) {
                for (std::size_t q = 0; q < n; ++q) {
                    push(GateOp::cnot(q, (q + 1) % n), kNoSlot);
                }
            }
        }
    }

    [[nodiscard]] std::size_t encoding_slots() const {
        return enc_per_qubit_ * desc_.n_qubits;
    }
    [[nodiscard]] std::size_t slot_count() const {
        return encoding_slots() + desc_.angle_count();
    }

    /// Slot values for input v and params p.
    [[nodiscard]] std::vector<double> slots(const VqcParams &p,
                                            std::span<const double> v) const {
        std::vector<double> s;
        s.reserve(slot_count());
        for (double x : v) {
            if (desc_.encoding == Encoding::AngleArctan) {
                s.push_back(std::atan(x));
                s.push_back(std::atan(x * x));
            } else {
                s.push_back(x);
            }
        }
        s.insert(s.end(), p.angles.begin(), p.angles.end());
        return s;
    }

    /// Runs the circuit from |0...0> and writes all Z expectations to out.
    void expectations(std::span<const double> slot_values,
                      std::span<double> out) {
        state_.reset();
        auto amps = state_.amplitudes();
        for (std::size_t i = 0; i < ops_.size(); ++i) {
            if (slot_of_op_[i] != kNoSlot) {
                ops_[i].angle = slot_values[slot_of_op_[i]];
            }
            apply_unchecked(amps, ops_[i]);
        }
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < amps.size(); ++i) {
            const double prob = std::norm(amps[i]);
            for (std::size_t q = 0; q < desc_.n_qubits; ++q) {
                out[q] += ((i >> q) & 1U) ? -prob : prob;
            }
        }
    }

    /// Sum_j upstream_j * dE_j/dslot for every slot, by parameter shift.
    [[nodiscard]] std::vector<double>
    slot_gradients(std::vector<double> slot_values,
                   std::span<const double> upstream) {
        const std::size_t n = desc_.n_qubits;
        std::vector<double> grads(slot_count(), 0.0);
        bool any = false;
        for (double u : upstream) {
            any = any || u != 0.0;
        }
        if (!any) {
            return grads;
        }
        std::vector<double> plus(n);
        std::vector<double> minus(n);
        constexpr double shift = std::numbers::pi / 2.0;
        for (std::size_t s = 0; s < slot_values.size(); ++s) {
            const double saved = slot_values[s];
            slot_values[s] = saved + shift;
            expectations(slot_values, plus);
            slot_values[s] = saved - shift;
            expectations(slot_values, minus);
            slot_values[s] = saved;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                acc += upstream[j] * (plus[j] - minus[j]) / 2.0;
            }
            grads[s] = acc;
        }
        return grads;
    }

    [[nodiscard]] const std::vector<GateOp> &ops() const { return ops_; }

  private:
    void push(GateOp op, std::size_t slot) {
        ops_.push_back(op);
        slot_of_op_.push_back(slot);
    }

    VqcDescriptor desc_;
    std::size_t enc_per_qubit_ = 1;
    std::vector<GateOp> ops_;
    std::vector<std::size_t> slot_of_op_;
    StateVector state_;
};

} // namespace detail

/// Encoding sub-circuit for input v.
[[nodiscard]] inline Circuit build_encoding(const VqcDescriptor &d,
                                            std::span<const double> v) {
    detail::require_shape(v.size() == d.n_qubits,
                          "encoding input length != n_qubits");
    detail::require_finite(v, "encoding input");
    Circuit c{d.n_qubits, {}};
    for (std::size_t q = 0; q < d.n_qubits; ++q) {
        if (d.encoding == Encoding::AngleArctan) {
            c.ops.push_back(GateOp::h(q));
            c.ops.push_back(GateOp::ry(q, std::atan(v[q])));
            c.ops.push_back(GateOp::rz(q, std::atan(v[q] * v[q])));
        } else {
            c.ops.push_back(GateOp::ry(q, v[q]));
        }
    }
    return c;
}

/// Variational layers (rotation triples then CNOT ring) for params p.
[[nodiscard]] inline Circuit build_variational(const VqcDescriptor &d,
                                               const VqcParams &p) {
    detail::require_shape(p.n_layers == d.n_layers && p.n_qubits == d.n_qubits &&
                              p.angles.size() == d.angle_count(),
                          "VQC parameter shape does not match descriptor");
    Circuit c{d.n_qubits, {}};
    const std::size_t n = d.n_qubits;
    for (std::size_t l = 0; l < d.n_layers; ++l) {
        for (std::size_t q = 0; q < n; ++q) {
            c.ops.push_back(GateOp::rx(q, p.at(l, q, 0)));
            c.ops.push_back(GateOp::ry(q, p.at(l, q, 1)));
            c.ops.push_back(GateOp::rz(q, p.at(l, q, 2)));
        }
        if (n >= 2) {
            for (std::size_t q = 0; q < n; ++q) {
                c.ops.push_back(GateOp::cnot(q, (q + 1) % n));
            }
        }
    }
    return c;
}

[[nodiscard]] inline std::vector<double>
vqc_forward(const VqcDescriptor &d, const VqcParams &p,
            std::span<const double> v) {
    detail::check_vqc_shapes(d, p, v);
    detail::SlottedCircuit circuit(d);
    std::vector<double> out(d.n_qubits);
    circuit.expectations(circuit.slots(p, v), out);
    return out;
}

[[nodiscard]] inline VqcGradients
vqc_gradients(const VqcDescriptor &d, const VqcParams &p,
              std::span<const double> v, std::span<const double> upstream) {
    detail::check_vqc_shapes(d, p, v);
    detail::require_shape(upstream.size() == d.n_qubits,
                          "upstream length != n_qubits");
    detail::SlottedCircuit circuit(d);
    const auto slot_grads = circuit.slot_gradients(circuit.slots(p, v), upstream);
    const std::size_t enc = circuit.encoding_slots();

    VqcGradients g;
    g.angle_grads.assign(slot_grads.begin() + static_cast<std::ptrdiff_t>(enc),
                         slot_grads.end());
    g.input_grads.resize(d.n_qubits);
    for (std::size_t q = 0; q < d.n_qubits; ++q) {
        if (d.encoding == Encoding::AngleArctan) {
            const double x = v[q];
            const double x2 = x * x;
            g.input_grads[q] = slot_grads[2 * q] / (1.0 + x2) +
                               slot_grads[2 * q + 1] * 2.0 * x / (1.0 + x2 * x2);
        } else {
            g.input_grads[q] = slot_grads[q];
        }
    }
    return g;
}

} // namespace qlstm

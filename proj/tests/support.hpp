#pragma once

// Shared fixtures: random noise configurations and a fully mitigated
// circuit builder used by the unbiasedness checks.

#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "uqem/circuit.hpp"
#include "uqem/decompose.hpp"
#include "uqem/device.hpp"
#include "uqem/experiments.hpp"
#include "uqem/gst.hpp"
#include "uqem/sampling.hpp"
#include "uqem/twirl.hpp"

namespace testing_support {

using namespace uqem;

inline Pauli random_axis(std::mt19937_64& gen) {
    return static_cast<Pauli>(std::uniform_int_distribution<int>(1, 3)(gen));
}

/// One randomly chosen channel of a randomly chosen kind.
inline NoiseSpec random_noise(std::mt19937_64& gen, int n_qubits, double scale) {
    std::uniform_real_distribution<double> u(0.0, scale);
    switch (std::uniform_int_distribution<int>(0, 3)(gen)) {
        case 0:
            return noise::Depolarizing{u(gen)};
        case 1:
            return noise::Dephasing{0.5 * u(gen)};
        case 2: {
            std::string axis;
            for (int q = 0; q < n_qubits; ++q) axis += pauli_char(random_axis(gen));
            if (std::bernoulli_distribution(0.3)(gen)) axis = std::string(1, pauli_char(random_axis(gen)));
            return noise::Overrotation{PauliString::from_str(axis), u(gen) - 0.5 * scale};
        }
        default:
            return noise::AmplitudeDamping{u(gen)};
    }
}

inline NoiseChain random_chain(std::mt19937_64& gen, int n_qubits, double scale) {
    NoiseChain chain;
    const int len = std::uniform_int_distribution<int>(1, 3)(gen);
    for (int k = 0; k < len; ++k) chain.push_back(random_noise(gen, n_qubits, scale));
    return chain;
}

/// Random gate, instrument and readout noise; preparations stay ideal.
inline DeviceConfig random_device_config(std::uint64_t seed, int n_qubits = 2) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> r(0.0, 0.08);
    DeviceConfig c;
    c.n_qubits = n_qubits;
    for (int q = 0; q < n_qubits; ++q) c.readout.push_back(ReadoutError{r(gen), r(gen)});
    c.single_qubit_noise = random_chain(gen, 1, 0.03);
    c.cphase_noise = random_chain(gen, 2, 0.12);
    c.instrument_noise = random_chain(gen, 1, 0.08);
    return c;
}

/// Decompose an ideal single-qubit gate over the 16 characterized ops of a
/// qubit, lifted to act on that qubit of an n-qubit register.
inline QuasiDecomposition decompose_local(const GateSpec& g, const QubitCharacterization& c, int register_qubits) {
    QuasiDecomposition d = decompose_gate(ideal_ptm(g), c.ops, gate_label(g));
    if (register_qubits == 1) return d;
    const EffectiveOp id = basis_operations_1q().front();
    for (auto& e : d.basis) {
        const auto& op = std::get<EffectiveOp>(e);
        e = c.qubit == 0 ? tensor_op(op, id) : tensor_op(id, op);
    }
    return d;
}

/// DQCp with every operation replaced by a quasiprobability slot: both
/// Y_pi/2 gates, the twirled C_phi (characterized directly) and the X
/// measurement.
inline SamplingPlan fully_mitigated_dqcp(const DeviceModel& device, double phi, const MeasurementMode& mode) {
    const auto ops = basis_operations_1q();
    const auto q0 = characterize_qubit(device, 0, ops, mode);
    const auto q1 = characterize_qubit(device, 1, ops, mode);
    const EffectiveOp twirled = make_twirled_gate(phi, default_twirl(phi));
    const auto tw = characterize_two_qubit(device, twirled, q0.B_hat, q1.B_hat, mode, 5000);
    const auto basis = basis_operations_2q(q0.ops, q1.ops, tw.op);

    const Rotation y{Pauli::Y, std::numbers::pi / 2};
    std::map<std::string, QuasiDecomposition> slots;
    slots["y0"] = decompose_local(y, q0, 2);
    slots["y1"] = decompose_local(y, q1, 2);
    slots["gate"] = decompose_gate(ideal_ptm(ControlledPhase{phi}), basis);
    slots["meas"] = decompose_observable(PtmObservable::pauli(PauliString::from_str("X")), q1.B_hat, 1, 2);

    CircuitTemplate t;
    t.n_qubits = 2;
    t.preps = {0, 0};
    t.ops = {SlotRef{"y0"}, SlotRef{"y1"}, SlotRef{"gate"}};
    t.measurement = SlotRef{"meas"};
    return build_plan(t, slots);
}

/// One-qubit circuit |0>, X_pi/2, Z with the gate and measurement mitigated.
inline SamplingPlan fully_mitigated_one_qubit(const DeviceModel& device, const MeasurementMode& mode) {
    const auto c = characterize_qubit(device, 0, basis_operations_1q(), mode);
    std::map<std::string, QuasiDecomposition> slots;
    slots["x"] = decompose_local(Rotation{Pauli::X, std::numbers::pi / 2}, c, 1);
    slots["meas"] = decompose_observable(PtmObservable::pauli(PauliString::from_str("Z")), c.B_hat);
    CircuitTemplate t;
    t.n_qubits = 1;
    t.preps = {0};
    t.ops = {SlotRef{"x"}};
    t.measurement = SlotRef{"meas"};
    return build_plan(t, slots);
}

}  // namespace testing_support

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "uqem/pauli.hpp"

namespace uqem {

namespace noise {

/// With probability epsilon the register is replaced by the maximally mixed state.
struct Depolarizing {
    double epsilon = 0.0;
};

/// Depolarizing channel whose process fidelity with the identity is the
/// given value: epsilon = d^2 (1 - F) / (d^2 - 1).
struct DepolarizingFidelity {
    double fidelity = 1.0;
};

/// Z flip with probability p on every qubit.
struct Dephasing {
    double p = 0.0;
};

struct AmplitudeDamping {
    double gamma = 0.0;
};

/// exp(-i dtheta/2 P). A single-letter axis on a multi-qubit gate acts on each qubit.
struct Overrotation {
    PauliString axis = PauliString::from_str("Z");
    double dtheta = 0.0;
};

struct None {};

}  // namespace noise

using NoiseSpec = std::variant<noise::None, noise::Depolarizing, noise::DepolarizingFidelity, noise::Dephasing,
                               noise::AmplitudeDamping, noise::Overrotation>;

/// Ordered list of channels, applied first to last.
using NoiseChain = std::vector<NoiseSpec>;

/// Classical bit-flip on the Z readout: e0 = P(read 1 | |0>), e1 = P(read 0 | |1>).
struct ReadoutError {
    double e0 = 0.0;
    double e1 = 0.0;
};

PtmMap build_channel(const NoiseSpec& spec, int n_qubits);
PtmMap build_channel(const NoiseChain& chain, int n_qubits);

/// Noisy +/-1 effect of measuring Pauli axis P on one qubit after an ideal
/// basis change: (e1 - e0) <<I| + (1 - e0 - e1) <<P|. Identity is exact.
PtmObservable noisy_pauli_effect(Pauli p, const ReadoutError& readout);

/// Noisy 0/1 effect for recording outcome 1 when measuring (I+P)/2:
/// (1 - e0) Pi_+ + e1 Pi_-.
PtmObservable noisy_projector_effect(Pauli p, const ReadoutError& readout);

/// Depolarizing strength reproducing a target process fidelity on n qubits.
double depolarizing_epsilon_for_fidelity(double fidelity, int n_qubits);

std::string describe(const NoiseSpec& spec);

void validate(const NoiseSpec& spec);
void validate(const ReadoutError& readout);

}  // namespace uqem

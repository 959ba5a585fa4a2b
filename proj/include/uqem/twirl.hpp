#pragma once

// Pauli twirling of the controlled-phase gate.

#include <array>
#include <optional>

#include "uqem/gates.hpp"

namespace uqem {

/// (recovery) C_phi (input) = eta C_phi as 4x4 unitaries.
struct PauliRecovery {
    PauliString input;     // sigma_a (x) sigma_b
    PauliString recovery;  // sigma_c (x) sigma_d
    Complex eta{1.0, 0.0};
};

/// Recovery pair for the input pair (a, b), or nullopt when
/// C_phi (a (x) b) C_phi^dagger is not proportional to a Pauli pair.
std::optional<PauliRecovery> pauli_recovery(double phi, Pauli a, Pauli b);

/// p_{a,b} indexed 4a + b.
using TwirlDistribution = std::array<double, 16>;

TwirlDistribution uniform_twirl();
/// 1/4 on each of {I,Z} (x) {I,Z}.
TwirlDistribution diagonal_twirl();
/// Uniform at phi = pi (mod 2 pi), diagonal otherwise.
TwirlDistribution default_twirl(double phi);
/// All weight on (I, I): the untwirled gate.
TwirlDistribution no_twirl();

/// sum_{a,b} p_{a,b} [c (x) d] U_hat [a (x) b] with ideal Pauli PTMs.
/// Throws ValidationError when weight sits on a pair without a recovery or
/// the probabilities do not sum to one.
PtmMap twirl_estimate(const PtmMap& U_hat, double phi, const TwirlDistribution& p);

/// Executable twirled C_phi: each shot draws (a, b) and runs
/// (c (x) d) C_phi (a (x) b) on the device. `ptm` is the supplied map
/// (typically twirl_estimate of the tomographic estimate).
EffectiveOp make_twirled_gate(double phi, const TwirlDistribution& p, const PtmMap& ptm);

/// Ideal twirled gate (equal to the ideal C_phi).
EffectiveOp make_twirled_gate(double phi, const TwirlDistribution& p);

}  // namespace uqem

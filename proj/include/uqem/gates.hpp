#pragma once

// Concrete operations: rotations, controlled-phase gates, measurement-reset
// instruments, the 16 single-qubit basis operations and the 257-element
// two-qubit decomposition basis.

#include <string>
#include <variant>
#include <vector>

#include "uqem/pauli.hpp"

namespace uqem {

/// P_theta = exp(-i theta/2 P).
struct Rotation {
    Pauli axis = Pauli::X;
    double angle = 0.0;
};

/// C_phi = (I+Z)/2 (x) I + (I-Z)/2 (x) Z_phi.
struct ControlledPhase {
    double phi = 0.0;
};

struct PauliGate {
    PauliString pauli;
};

struct Identity {
    int n_qubits = 1;
};

using GateSpec = std::variant<Identity, Rotation, ControlledPhase, PauliGate>;

int gate_qubits(const GateSpec& g);
CMatrix gate_unitary(const GateSpec& g);
PtmMap ideal_ptm(const GateSpec& g);
std::string gate_label(const GateSpec& g);

/// Outcome-labelled completely positive branches of a quantum instrument.
struct Branch {
    double outcome = 1.0;
    PtmMap map;
};

class Instrument {
  public:
    Instrument() = default;
    /// Validates that the branches sum to a trace-preserving map and that
    /// each branch is completely positive.
    explicit Instrument(std::vector<Branch> branches);

    /// Skips validation; used for already-validated products and embeddings.
    static Instrument unchecked(std::vector<Branch> branches);

    const std::vector<Branch>& branches() const { return branches_; }
    int n_qubits() const { return branches_.empty() ? 0 : branches_.front().map.n_qubits(); }

    /// sum_k outcome_k * branch_k.
    PtmMap effective_map() const;

  private:
    std::vector<Branch> branches_;
};

bool is_completely_positive(const PtmMap& m, double tol = kValidationTol);

/// Measure the eigenvalue of (I+P)/2 (outcomes 0 and 1), then reset to psi.
struct MeasureReset {
    Pauli axis = Pauli::Z;
    CVector psi;
    std::string psi_label;
};

Instrument ideal_instrument(const MeasureReset& mr);

// Executable recipe for an effective operation. Qubit indices are local to
// the operation (0 or 0..1); the device maps them to noisy counterparts.
struct GateStep {
    GateSpec gate;
    std::vector<int> qubits;
};

struct InstrumentStep {
    MeasureReset op;
    int qubit = 0;
};

/// One Pauli-sandwich variant of a twirled two-qubit gate:
/// (c (x) d) G (a (x) b), chosen with the given probability.
struct TwirlVariant {
    double probability = 0.0;
    PauliString before;  // a (x) b
    PauliString after;   // c (x) d
};

struct TwirledGateStep {
    GateSpec gate;
    std::vector<TwirlVariant> variants;
};

using RecipeStep = std::variant<GateStep, InstrumentStep, TwirledGateStep>;

struct EffectiveOp {
    std::string label;
    PtmMap ptm;  // ideal map, or its tomographic estimate
    std::vector<RecipeStep> realization;

    int n_qubits() const { return ptm.n_qubits(); }
};

EffectiveOp gate_op(const GateSpec& g);

/// Effective map rho -> Tr[(I+P)/2 rho] |psi><psi|, realized by an instrument
/// whose recorded outcome (0 or 1) multiplies the sample.
EffectiveOp measure_reset_map(Pauli axis, const CVector& psi, std::string psi_label = "psi");

/// Table of the 16 single-qubit basis operations, numbered 1..16 in the
/// returned order. Composite rows are applied left to right.
std::vector<EffectiveOp> basis_operations_1q();

/// 256 tensor pairs (index 16*i + j for qubit-0 op i and qubit-1 op j, both
/// zero based) followed by the supplied twirled gate.
std::vector<EffectiveOp> basis_operations_2q(const EffectiveOp& twirled_gate);
std::vector<EffectiveOp> basis_operations_2q(const std::vector<EffectiveOp>& qubit0_ops,
                                             const std::vector<EffectiveOp>& qubit1_ops,
                                             const EffectiveOp& twirled_gate);

/// Tensor product of two single-qubit effective operations (qubit a first).
EffectiveOp tensor_op(const EffectiveOp& a, const EffectiveOp& b);

/// The four standard preparations |0>, |1>, |0+1>, |0-i1> as state vectors.
std::vector<CVector> preparation_vectors_1q();
std::vector<std::string> preparation_labels_1q();

/// Assumed preparation matrix A-hat, columns = PTM vectors of the standard
/// preparations in the order above, rows ordered I, X, Y, Z.
Matrix preparation_states_1q();

/// Tensor power of the single-qubit preparation matrix.
Matrix preparation_matrix(int n_qubits);

}  // namespace uqem

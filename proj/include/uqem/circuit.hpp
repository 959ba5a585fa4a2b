#pragma once

// Circuit templates, sampled circuits and their execution on a DeviceModel.
//
// A circuit prepares each qubit in one of the four standard states, applies
// an ordered list of operations and measures one Pauli string. Operations in
// a template may be left open ("replaceable slots") for the sampler to bind.

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "uqem/device.hpp"
#include "uqem/gates.hpp"
#include "uqem/rng.hpp"

namespace uqem {

struct SlotRef {
    std::string id;
};

using OpSlot = std::variant<EffectiveOp, SlotRef>;
using MeasurementSlot = std::variant<PauliString, SlotRef>;

struct CircuitTemplate {
    int n_qubits = 1;
    std::vector<int> preps;  // per qubit, index into preparation_vectors_1q()
    std::vector<OpSlot> ops;
    MeasurementSlot measurement = PauliString::from_str("Z");

    std::vector<std::string> slot_ids() const;
};

struct SampledCircuit {
    int n_qubits = 1;
    std::vector<int> preps;
    std::vector<EffectiveOp> ops;
    PauliString measurement = PauliString::from_str("Z");
    double weight = 1.0;
};

/// Template with every slot fixed, as a weight-1 sampled circuit. Throws
/// ValidationError on an unbound slot.
SampledCircuit bind_fixed(const CircuitTemplate& t);

/// Ops compiled against a device: full-register noisy branch maps.
struct CompiledStep {
    std::vector<double> cdf;                    // variant selection; empty for one variant
    std::vector<double> probabilities;          // matching cdf
    std::vector<std::vector<Branch>> variants;  // each a list of outcome-labelled branches
};

struct CompiledOp {
    std::vector<CompiledStep> steps;
    Matrix exact;  // outcome-weighted, variant-averaged full-register map
};

/// Noisy full-register realization of an effective op. `placement` maps the
/// op's local qubits to register qubits (identity when empty).
CompiledOp compile_op(const EffectiveOp& op, const DeviceModel& device, int register_qubits,
                      std::span<const int> placement = {});

PtmState noisy_preparation(std::span<const int> preps, const DeviceModel& device);

/// Evolve a state through compiled ops one shot at a time; returns the
/// product of mid-circuit outcomes and leaves the (renormalized) state in
/// `state`. A zero product short-circuits.
double propagate_shot(Vector& state, std::span<const CompiledOp* const> ops, Rng& rng);

/// Sample the +/-1 outcome of a noisy effect on a normalized state.
double sample_outcome(const RowVector& effect, const Vector& state, Rng& rng);

class CompiledCircuit {
  public:
    CompiledCircuit(const SampledCircuit& circuit, const DeviceModel& device);

    /// (final +/-1 outcome) x (mid-circuit outcomes) x (circuit weight).
    double shot(Rng& rng) const;

    /// Infinite-shot value, without the circuit weight.
    double exact() const;

    double weight() const { return weight_; }

  private:
    Vector prep_;
    std::vector<CompiledOp> ops_;
    std::vector<const CompiledOp*> op_ptrs_;
    RowVector effect_;
    double weight_ = 1.0;
};

double execute_shot(const SampledCircuit& circuit, const DeviceModel& device, Rng& rng);

/// Exact expectation of a fully-fixed template (no weight).
double exact_expectation(const CircuitTemplate& circuit, const DeviceModel& device);
double exact_expectation(const SampledCircuit& circuit, const DeviceModel& device);

/// Embed a local map on register qubits (first qubit most significant).
Matrix embed(const Matrix& local, int local_qubits, int register_qubits, std::span<const int> placement);

}  // namespace uqem

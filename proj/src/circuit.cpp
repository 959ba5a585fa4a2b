#include "uqem/circuit.hpp"

#include <algorithm>

#include "uqem/errors.hpp"

namespace uqem {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

constexpr double kNegativeProbabilityTol = 1e-9;

std::vector<int> resolve_placement(std::span<const int> placement, int local_qubits) {
    std::vector<int> out;
    if (placement.empty()) {
        for (int q = 0; q < local_qubits; ++q) out.push_back(q);
    } else {
        out.assign(placement.begin(), placement.end());
    }
    return out;
}

std::vector<int> map_qubits(const std::vector<int>& local, const std::vector<int>& placement) {
    std::vector<int> out;
    out.reserve(local.size());
    for (int q : local) {
        if (q < 0 || static_cast<std::size_t>(q) >= placement.size()) {
            throw ValidationError("compile_op: recipe qubit outside the operation");
        }
        out.push_back(placement[static_cast<std::size_t>(q)]);
    }
    return out;
}

CompiledStep single_variant(std::vector<Branch> branches) {
    CompiledStep step;
    step.variants.push_back(std::move(branches));
    return step;
}

Matrix step_map(const CompiledStep& step) {
    Matrix total;
    for (std::size_t v = 0; v < step.variants.size(); ++v) {
        const double p = step.cdf.empty() ? 1.0 : step.probabilities[v];
        for (const auto& b : step.variants[v]) {
            Matrix term = (p * b.outcome) * b.map.matrix();
            total = total.size() == 0 ? term : Matrix(total + term);
        }
    }
    return total;
}

}  // namespace

std::vector<std::string> CircuitTemplate::slot_ids() const {
    std::vector<std::string> ids;
    for (const auto& op : ops) {
        if (const auto* s = std::get_if<SlotRef>(&op)) ids.push_back(s->id);
    }
    if (const auto* s = std::get_if<SlotRef>(&measurement)) ids.push_back(s->id);
    return ids;
}

SampledCircuit bind_fixed(const CircuitTemplate& t) {
    SampledCircuit c;
    c.n_qubits = t.n_qubits;
    c.preps = t.preps;
    for (const auto& op : t.ops) {
        if (const auto* s = std::get_if<SlotRef>(&op)) {
            throw ValidationError("circuit has unbound slot '" + s->id + "'");
        }
        c.ops.push_back(std::get<EffectiveOp>(op));
    }
    if (const auto* s = std::get_if<SlotRef>(&t.measurement)) {
        throw ValidationError("circuit has unbound measurement slot '" + s->id + "'");
    }
    c.measurement = std::get<PauliString>(t.measurement);
    return c;
}

Matrix embed(const Matrix& local, int local_qubits, int register_qubits, std::span<const int> placement) {
    if (local_qubits == register_qubits) {
        for (int q = 0; q < local_qubits; ++q) {
            if (!placement.empty() && placement[static_cast<std::size_t>(q)] != q) {
                throw ValidationError("embed: permuted placement of a multi-qubit map is not supported");
            }
        }
        return local;
    }
    if (local_qubits == 1 && register_qubits == 2) {
        const int q = placement.empty() ? 0 : placement[0];
        const Matrix id = Matrix::Identity(4, 4);
        if (q == 0) return kron(local, id);
        if (q == 1) return kron(id, local);
    }
    throw ValidationError("embed: cannot place a " + std::to_string(local_qubits) + "-qubit map on a " +
                          std::to_string(register_qubits) + "-qubit register");
}

CompiledOp compile_op(const EffectiveOp& op, const DeviceModel& device, int register_qubits,
                      std::span<const int> placement) {
    const std::vector<int> where = resolve_placement(placement, op.n_qubits());
    if (static_cast<int>(where.size()) != op.n_qubits()) {
        throw ValidationError("compile_op: placement size does not match operation '" + op.label + "'");
    }
    for (int q : where) {
        if (q < 0 || q >= register_qubits || q >= device.n_qubits()) {
            throw ValidationError("compile_op: operation '" + op.label + "' placed outside the register");
        }
    }

    CompiledOp out;
    for (const auto& step : op.realization) {
        out.steps.push_back(std::visit(
            overloaded{
                [&](const GateStep& g) {
                    const auto qubits = map_qubits(g.qubits, where);
                    if (static_cast<int>(qubits.size()) != gate_qubits(g.gate)) {
                        throw ValidationError("compile_op: gate arity does not match its qubit list");
                    }
                    const Matrix m = embed(device.gate(g.gate).matrix(), gate_qubits(g.gate), register_qubits, qubits);
                    return single_variant({Branch{1.0, PtmMap(register_qubits, m)}});
                },
                [&](const InstrumentStep& s) {
                    const int q = map_qubits({s.qubit}, where).front();
                    const Instrument inst = device.instrument(s.op, q);
                    const int at[] = {q};
                    std::vector<Branch> branches;
                    for (const auto& b : inst.branches()) {
                        branches.push_back(Branch{b.outcome, PtmMap(register_qubits, embed(b.map.matrix(), 1, register_qubits, at))});
                    }
                    return single_variant(std::move(branches));
                },
                [&](const TwirledGateStep& t) {
                    if (gate_qubits(t.gate) != 2) {
                        throw ValidationError("compile_op: twirling is defined for two-qubit gates only");
                    }
                    const Matrix core = device.gate(t.gate).matrix();
                    CompiledStep cs;
                    double acc = 0.0;
                    for (const auto& v : t.variants) {
                        if (v.probability <= 0.0) continue;
                        const Matrix before = device.gate(PauliGate{v.before}).matrix();
                        const Matrix after = device.gate(PauliGate{v.after}).matrix();
                        const Matrix m = embed(after * core * before, 2, register_qubits, where);
                        acc += v.probability;
                        cs.cdf.push_back(acc);
                        cs.probabilities.push_back(v.probability);
                        cs.variants.push_back({Branch{1.0, PtmMap(register_qubits, m)}});
                    }
                    if (cs.variants.empty()) {
                        throw ValidationError("compile_op: twirl distribution is empty");
                    }
                    return cs;
                },
            },
            step));
    }

    const auto dim = static_cast<Eigen::Index>(pauli_dim(register_qubits));
    out.exact = Matrix::Identity(dim, dim);
    for (const auto& s : out.steps) {
        out.exact = step_map(s) * out.exact;
    }
    return out;
}

PtmState noisy_preparation(std::span<const int> preps, const DeviceModel& device) {
    if (preps.empty() || static_cast<int>(preps.size()) > device.n_qubits()) {
        throw ValidationError("noisy_preparation: preparation list does not fit the device");
    }
    PtmState s = device.prep_state(0, preps[0]);
    for (std::size_t q = 1; q < preps.size(); ++q) {
        s = tensor(s, device.prep_state(static_cast<int>(q), preps[q]));
    }
    return s;
}

double propagate_shot(Vector& state, std::span<const CompiledOp* const> ops, Rng& rng) {
    double outcome = 1.0;
    Vector scratch(state.size());
    for (const CompiledOp* op : ops) {
        for (const auto& step : op->steps) {
            std::size_t v = 0;
            if (!step.cdf.empty()) {
                const double u = rng.uniform() * step.cdf.back();
                v = static_cast<std::size_t>(std::upper_bound(step.cdf.begin(), step.cdf.end(), u) - step.cdf.begin());
                v = std::min(v, step.cdf.size() - 1);
            }
            const auto& branches = step.variants[v];
            if (branches.size() == 1) {
                scratch.noalias() = branches.front().map.matrix() * state;
                state.swap(scratch);
                outcome *= branches.front().outcome;
                continue;
            }
            double probs[8];
            double total = 0.0;
            const std::size_t nb = std::min<std::size_t>(branches.size(), 8);
            for (std::size_t k = 0; k < nb; ++k) {
                double p = branches[k].map.matrix().row(0).dot(state);
                if (p < -kNegativeProbabilityTol) {
                    throw NumericalError("negative branch probability " + std::to_string(p));
                }
                p = std::max(p, 0.0);
                probs[k] = p;
                total += p;
            }
            if (total <= 0.0) {
                throw NumericalError("instrument branches have zero total probability");
            }
            double u = rng.uniform() * total;
            std::size_t chosen = nb - 1;
            for (std::size_t k = 0; k < nb; ++k) {
                if (probs[k] > 0.0 && u < probs[k]) {
                    chosen = k;
                    break;
                }
                u -= probs[k];
            }
            while (probs[chosen] <= 0.0) --chosen;  // never select a zero-probability branch
            scratch.noalias() = branches[chosen].map.matrix() * state;
            state = scratch / probs[chosen];
            outcome *= branches[chosen].outcome;
            if (outcome == 0.0) return 0.0;
        }
    }
    return outcome;
}

double sample_outcome(const RowVector& effect, const Vector& state, Rng& rng) {
    const double e = std::clamp(effect.dot(state), -1.0, 1.0);
    return rng.uniform() < 0.5 * (1.0 + e) ? 1.0 : -1.0;
}

CompiledCircuit::CompiledCircuit(const SampledCircuit& circuit, const DeviceModel& device) : weight_(circuit.weight) {
    if (circuit.n_qubits != device.n_qubits()) {
        throw ValidationError("circuit register size does not match the device");
    }
    if (static_cast<int>(circuit.preps.size()) != circuit.n_qubits) {
        throw ValidationError("circuit needs one preparation per qubit");
    }
    prep_ = noisy_preparation(circuit.preps, device).entries();
    ops_.reserve(circuit.ops.size());
    for (const auto& op : circuit.ops) {
        ops_.push_back(compile_op(op, device, circuit.n_qubits));
    }
    for (const auto& op : ops_) op_ptrs_.push_back(&op);
    effect_ = device.effect(circuit.measurement).entries();
}

double CompiledCircuit::shot(Rng& rng) const {
    Vector state = prep_;
    const double mid = propagate_shot(state, op_ptrs_, rng);
    if (mid == 0.0) return 0.0;
    return sample_outcome(effect_, state, rng) * mid * weight_;
}

double CompiledCircuit::exact() const {
    Vector state = prep_;
    for (const auto& op : ops_) {
        state = op.exact * state;
    }
    return effect_.dot(state);
}

double execute_shot(const SampledCircuit& circuit, const DeviceModel& device, Rng& rng) {
    return CompiledCircuit(circuit, device).shot(rng);
}

double exact_expectation(const CircuitTemplate& circuit, const DeviceModel& device) {
    return exact_expectation(bind_fixed(circuit), device);
}

double exact_expectation(const SampledCircuit& circuit, const DeviceModel& device) {
    return CompiledCircuit(circuit, device).exact();
}

}  // namespace uqem

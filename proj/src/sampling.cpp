#include "uqem/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "uqem/errors.hpp"

namespace uqem {

namespace {

struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
};

Partial run_range(const PlanExecutor& exec, std::uint64_t seed, std::uint64_t stream, std::size_t begin,
                  std::size_t end) {
    Partial p;
    for (std::size_t k = begin; k < end; ++k) {
        Rng rng = Rng::derive(seed, stream, k);
        const double v = exec.sample(rng);
        p.sum += v;
        p.sum_sq += v * v;
    }
    return p;
}

Estimate finish(double sum, double sum_sq, std::size_t n) {
    Estimate e;
    e.samples = n;
    if (n == 0) return e;
    const double m = static_cast<double>(n);
    e.mean = sum / m;
    if (n > 1) {
        const double var = std::max(0.0, (sum_sq - m * e.mean * e.mean) / (m - 1.0));
        e.standard_error = std::sqrt(var / m);
    }
    return e;
}

Estimate chunked(const PlanExecutor& exec, std::size_t samples, std::uint64_t seed, std::uint64_t stream,
                 bool parallel) {
    const std::size_t chunks = (samples + kEstimateChunk - 1) / kEstimateChunk;
    std::vector<Partial> parts(chunks);
    const auto n_chunks = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        const auto begin = static_cast<std::size_t>(c) * kEstimateChunk;
        parts[static_cast<std::size_t>(c)] = run_range(exec, seed, stream, begin, std::min(samples, begin + kEstimateChunk));
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& p : parts) {
        sum += p.sum;
        sum_sq += p.sum_sq;
    }
    return finish(sum, sum_sq, samples);
}

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

nlohmann::json SamplingPlan::to_json() const {
    nlohmann::json doc;
    doc["total_cost"] = total_cost;
    doc["slots"] = nlohmann::json::array();
    for (const auto& s : slots) {
        nlohmann::json slot;
        slot["id"] = s.id;
        slot["cost"] = s.decomposition.cost;
        slot["alternatives"] = nlohmann::json::array();
        for (std::size_t k = 0; k < s.probabilities.size(); ++k) {
            if (s.probabilities[k] == 0.0) continue;
            slot["alternatives"].push_back({{"label", basis_label(s.decomposition.basis[k])},
                                            {"probability", s.probabilities[k]},
                                            {"sign", sign_of(s.decomposition.q[static_cast<Eigen::Index>(k)])}});
        }
        doc["slots"].push_back(std::move(slot));
    }
    return doc;
}

SamplingPlan build_plan(const CircuitTemplate& circuit, const std::map<std::string, QuasiDecomposition>& slots) {
    SamplingPlan plan;
    plan.circuit = circuit;
    const auto ids = circuit.slot_ids();
    for (const auto& [id, _] : slots) {
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
            throw ValidationError("build_plan: decomposition for unknown slot '" + id + "'");
        }
    }
    const auto* meas_slot = std::get_if<SlotRef>(&circuit.measurement);
    for (const auto& id : ids) {
        const auto it = slots.find(id);
        if (it == slots.end()) throw ValidationError("build_plan: slot '" + id + "' has no decomposition");
        const auto& d = it->second;
        const bool is_measurement = meas_slot != nullptr && meas_slot->id == id;
        for (const auto& e : d.basis) {
            if (is_measurement != std::holds_alternative<PauliString>(e)) {
                throw ValidationError("build_plan: basis element '" + basis_label(e) + "' does not fit slot '" + id + "'");
            }
        }
        if (static_cast<std::size_t>(d.q.size()) != d.basis.size() || !(d.cost > 0.0)) {
            throw ValidationError("build_plan: malformed decomposition for slot '" + id + "'");
        }
        SlotPlan sp;
        sp.id = id;
        sp.decomposition = d;
        double acc = 0.0;
        for (Eigen::Index k = 0; k < d.q.size(); ++k) {
            const double p = std::abs(d.q[k]) / d.cost;
            sp.probabilities.push_back(p);
            acc += p;
            sp.cdf.push_back(acc);
        }
        plan.total_cost *= d.cost;
        plan.slots.push_back(std::move(sp));
    }
    return plan;
}

std::size_t draw_index(const SlotPlan& slot, Rng& rng) {
    const double u = rng.uniform() * slot.cdf.back();
    auto k = static_cast<std::size_t>(std::upper_bound(slot.cdf.begin(), slot.cdf.end(), u) - slot.cdf.begin());
    k = std::min(k, slot.cdf.size() - 1);
    while (slot.probabilities[k] == 0.0 && k > 0) --k;
    return k;
}

namespace {

const SlotPlan& find_slot(const SamplingPlan& plan, const std::string& id) {
    for (const auto& s : plan.slots) {
        if (s.id == id) return s;
    }
    throw ValidationError("sampling plan has no slot '" + id + "'");
}

}  // namespace

SampledCircuit draw(const SamplingPlan& plan, Rng& rng) {
    SampledCircuit c;
    c.n_qubits = plan.circuit.n_qubits;
    c.preps = plan.circuit.preps;
    double sign = 1.0;
    auto pick = [&](const std::string& id) -> const BasisElement& {
        const auto& s = find_slot(plan, id);
        const auto k = draw_index(s, rng);
        sign *= sign_of(s.decomposition.q[static_cast<Eigen::Index>(k)]);
        return s.decomposition.basis[k];
    };
    for (const auto& op : plan.circuit.ops) {
        if (const auto* ref = std::get_if<SlotRef>(&op)) {
            c.ops.push_back(std::get<EffectiveOp>(pick(ref->id)));
        } else {
            c.ops.push_back(std::get<EffectiveOp>(op));
        }
    }
    if (const auto* ref = std::get_if<SlotRef>(&plan.circuit.measurement)) {
        c.measurement = std::get<PauliString>(pick(ref->id));
    } else {
        c.measurement = std::get<PauliString>(plan.circuit.measurement);
    }
    c.weight = sign * plan.total_cost;
    return c;
}

double plan_exact_value(const SamplingPlan& plan, const DeviceModel& device) {
    const int n = plan.circuit.n_qubits;
    Vector state = noisy_preparation(plan.circuit.preps, device).entries();
    for (const auto& op : plan.circuit.ops) {
        if (const auto* ref = std::get_if<SlotRef>(&op)) {
            const auto& s = find_slot(plan, ref->id);
            Matrix mix = Matrix::Zero(state.size(), state.size());
            for (std::size_t k = 0; k < s.decomposition.basis.size(); ++k) {
                const double q = s.decomposition.q[static_cast<Eigen::Index>(k)];
                if (q == 0.0) continue;
                mix += q * compile_op(std::get<EffectiveOp>(s.decomposition.basis[k]), device, n).exact;
            }
            state = mix * state;
        } else {
            state = compile_op(std::get<EffectiveOp>(op), device, n).exact * state;
        }
    }
    if (const auto* ref = std::get_if<SlotRef>(&plan.circuit.measurement)) {
        const auto& s = find_slot(plan, ref->id);
        double value = 0.0;
        for (std::size_t k = 0; k < s.decomposition.basis.size(); ++k) {
            const double q = s.decomposition.q[static_cast<Eigen::Index>(k)];
            if (q == 0.0) continue;
            value += q * device.effect(std::get<PauliString>(s.decomposition.basis[k])).entries().dot(state);
        }
        return value;
    }
    return device.effect(std::get<PauliString>(plan.circuit.measurement)).entries().dot(state);
}

PlanExecutor::PlanExecutor(SamplingPlan plan_in, const DeviceModel& device)
    : plan_(std::move(plan_in)), weight_(plan_.total_cost) {
    const SamplingPlan& plan = plan_;
    const int n = plan.circuit.n_qubits;
    if (n != device.n_qubits()) throw ValidationError("sampling plan register does not match the device");
    prep_ = noisy_preparation(plan.circuit.preps, device).entries();

    slots_.reserve(plan.slots.size());
    for (const auto& sp : plan.slots) {
        Slot s;
        s.plan = &sp;
        for (std::size_t k = 0; k < sp.decomposition.basis.size(); ++k) {
            const auto& e = sp.decomposition.basis[k];
            s.signs.push_back(sign_of(sp.decomposition.q[static_cast<Eigen::Index>(k)]));
            if (const auto* op = std::get_if<EffectiveOp>(&e)) {
                s.ops.push_back(sp.probabilities[k] > 0.0 ? compile_op(*op, device, n) : CompiledOp{});
            } else {
                s.effects.push_back(device.effect(std::get<PauliString>(e)).entries());
            }
        }
        slots_.push_back(std::move(s));
    }
    auto slot_for = [&](const std::string& id) -> const Slot* {
        for (const auto& s : slots_) {
            if (s.plan->id == id) return &s;
        }
        throw ValidationError("sampling plan has no slot '" + id + "'");
    };

    std::size_t fixed_count = 0;
    for (const auto& op : plan.circuit.ops) {
        if (std::holds_alternative<EffectiveOp>(op)) ++fixed_count;
    }
    fixed_ops_.reserve(fixed_count);
    for (const auto& op : plan.circuit.ops) {
        if (const auto* ref = std::get_if<SlotRef>(&op)) {
            steps_.push_back(Step{nullptr, slot_for(ref->id)});
        } else {
            fixed_ops_.push_back(compile_op(std::get<EffectiveOp>(op), device, n));
            steps_.push_back(Step{&fixed_ops_.back(), nullptr});
        }
    }
    if (const auto* ref = std::get_if<SlotRef>(&plan.circuit.measurement)) {
        measurement_slot_ = slot_for(ref->id);
    } else {
        fixed_effect_ = device.effect(std::get<PauliString>(plan.circuit.measurement)).entries();
    }
}

double PlanExecutor::sample(Rng& rng) const {
    Vector state = prep_;
    double value = weight_;
    for (const auto& step : steps_) {
        const CompiledOp* op = step.fixed;
        if (op == nullptr) {
            const auto k = draw_index(*step.slot->plan, rng);
            value *= step.slot->signs[k];
            op = &step.slot->ops[k];
        }
        const CompiledOp* const one[] = {op};
        const double mid = propagate_shot(state, one, rng);
        if (mid == 0.0) return 0.0;
        value *= mid;
    }
    if (measurement_slot_ != nullptr) {
        const auto k = draw_index(*measurement_slot_->plan, rng);
        return value * measurement_slot_->signs[k] * sample_outcome(measurement_slot_->effects[k], state, rng);
    }
    return value * sample_outcome(fixed_effect_, state, rng);
}

Estimate estimate(const PlanExecutor& exec, std::size_t samples, std::uint64_t seed, std::uint64_t stream) {
    return chunked(exec, samples, seed, stream, true);
}

Estimate estimate(const SamplingPlan& plan, const DeviceModel& device, std::size_t samples, std::uint64_t seed,
                  std::uint64_t stream) {
    return estimate(PlanExecutor(plan, device), samples, seed, stream);
}

Estimate estimate_serial(const PlanExecutor& exec, std::size_t samples, std::uint64_t seed, std::uint64_t stream) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        Rng rng = Rng::derive(seed, stream, k);
        const double v = exec.sample(rng);
        sum += v;
        sum_sq += v * v;
    }
    return finish(sum, sum_sq, samples);
}

std::vector<Estimate> estimate_repetitions(const PlanExecutor& exec, std::size_t samples, std::size_t reps,
                                           std::uint64_t seed, std::uint64_t stream_base) {
    std::vector<Estimate> out(reps);
    const auto n = static_cast<std::int64_t>(reps);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t r = 0; r < n; ++r) {
        out[static_cast<std::size_t>(r)] =
            chunked(exec, samples, seed, stream_base + static_cast<std::uint64_t>(r), false);
    }
    return out;
}

}  // namespace uqem

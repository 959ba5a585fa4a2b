#pragma once

// Weighted random-circuit sampling. Every replaceable slot of a circuit
// template is bound independently to basis element i with probability
// |q_i| / C, and the shot value is multiplied by sgn(prod q) * prod C.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "uqem/circuit.hpp"
#include "uqem/decompose.hpp"
#include "uqem/rng.hpp"

namespace uqem {

struct SlotPlan {
    std::string id;
    QuasiDecomposition decomposition;
    std::vector<double> probabilities;
    std::vector<double> cdf;
};

struct SamplingPlan {
    CircuitTemplate circuit;
    std::vector<SlotPlan> slots;  // in slot order of the template
    double total_cost = 1.0;      // W = product of slot costs

    /// Plan document: {"total_cost", "slots": [{"id", "cost",
    /// "alternatives": [{"label", "probability", "sign"}]}]}.
    nlohmann::json to_json() const;
};

/// Throws ValidationError when a slot lacks a decomposition, a decomposition
/// names an unknown slot, or a basis element kind does not fit its slot.
SamplingPlan build_plan(const CircuitTemplate& circuit, const std::map<std::string, QuasiDecomposition>& slots);

/// Index of the chosen alternative for a slot.
std::size_t draw_index(const SlotPlan& slot, Rng& rng);

SampledCircuit draw(const SamplingPlan& plan, Rng& rng);

/// sum over all bindings of (prod q) * exact value: the infinite-sample
/// mean of the estimator.
double plan_exact_value(const SamplingPlan& plan, const DeviceModel& device);

/// Plan compiled against a device; sample(rng) draws one circuit and runs
/// it for one shot. Holds its own copy of the plan and internal pointers,
/// so it is neither copyable nor movable.
class PlanExecutor {
  public:
    PlanExecutor(SamplingPlan plan, const DeviceModel& device);
    PlanExecutor(const PlanExecutor&) = delete;
    PlanExecutor& operator=(const PlanExecutor&) = delete;

    double sample(Rng& rng) const;

  private:
    struct Slot {
        const SlotPlan* plan = nullptr;
        std::vector<CompiledOp> ops;
        std::vector<RowVector> effects;
        std::vector<double> signs;
    };
    struct Step {
        const CompiledOp* fixed = nullptr;
        const Slot* slot = nullptr;
    };

    SamplingPlan plan_;
    Vector prep_;
    std::vector<CompiledOp> fixed_ops_;
    std::vector<Slot> slots_;
    std::vector<Step> steps_;
    RowVector fixed_effect_;
    const Slot* measurement_slot_ = nullptr;
    double weight_ = 1.0;
};

struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
};

/// Samples are processed in fixed-size chunks whose partial sums are
/// combined in chunk order, so results are bit-identical for any number of
/// threads. Sample k of stream s draws from Rng::derive(seed, s, k).
inline constexpr std::size_t kEstimateChunk = 4096;

Estimate estimate(const PlanExecutor& exec, std::size_t samples, std::uint64_t seed, std::uint64_t stream);
Estimate estimate(const SamplingPlan& plan, const DeviceModel& device, std::size_t samples, std::uint64_t seed,
                  std::uint64_t stream = 0);

/// Plain sequential loop, kept as the reference for the parallel kernel.
Estimate estimate_serial(const PlanExecutor& exec, std::size_t samples, std::uint64_t seed, std::uint64_t stream);

/// One estimate per repetition r on stream (stream_base + r); repetitions
/// run in parallel, each with the chunked reduction above.
std::vector<Estimate> estimate_repetitions(const PlanExecutor& exec, std::size_t samples, std::size_t reps,
                                           std::uint64_t seed, std::uint64_t stream_base);

}  // namespace uqem

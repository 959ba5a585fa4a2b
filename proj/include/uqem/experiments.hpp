#pragma once

// End-to-end mitigation experiments: the one-qubit readout experiment
// (prepare |0>, X_pi/2, measure Z) and the two-qubit DQCp sweep (Y_pi/2 on
// both qubits, C_phi, measure X on qubit 1, ideal value cos^2(phi/2)).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "uqem/decompose.hpp"
#include "uqem/device.hpp"
#include "uqem/gst.hpp"
#include "uqem/sampling.hpp"
#include "uqem/twirl.hpp"

namespace uqem {

inline constexpr std::uint64_t kDefaultSeed = 20190117;
inline constexpr std::int64_t kOneQubitShots = 3000;
inline constexpr std::int64_t kTwoQubitShots = 10000;
inline constexpr int kDefaultReps = 100;

struct ExperimentConfig {
    std::string experiment;               // "one-qubit" | "two-qubit-sweep"
    std::string device_ref = kPaperDevicePreset;
    DeviceConfig device = preset_config(kPaperDevicePreset);
    std::int64_t shots = 0;               // 0: experiment default
    int reps = kDefaultReps;
    std::vector<double> phis;             // empty: pi/4, pi/2, 3pi/4, pi
    std::uint64_t seed = kDefaultSeed;
    bool quick = false;                   // 1/100 of the shot budget
    bool twirl = true;
    std::int64_t gst_shots = 0;           // 0: exact tomography

    std::int64_t effective_shots() const;
    std::vector<double> effective_phis() const;
    nlohmann::json to_json() const;
};

std::vector<double> default_phis();

struct SeriesSummary {
    std::vector<double> values;  // one grand value per repetition
    double mean = 0.0;
    double sd = 0.0;  // across repetitions
    double se = 0.0;  // sd / sqrt(reps)
};

SeriesSummary summarize(std::vector<double> values);

struct ExperimentResult {
    std::string experiment;
    std::optional<double> phi;
    double ideal = 0.0;
    SeriesSummary raw;
    SeriesSummary mitigated;
    double cost = 1.0;            // total sampling cost W
    std::int64_t n_samples = 0;   // per repetition
    double exact_raw = 0.0;       // infinite-sample unmitigated value
    double exact_mitigated = 0.0; // infinite-sample mitigated value
    nlohmann::json decompositions;
};

/// Ideal values, always recomputed from the PTM algebra.
double one_qubit_ideal();
double dqcp_ideal(double phi);

CircuitTemplate one_qubit_circuit(bool mitigated);
CircuitTemplate dqcp_circuit(double phi, bool mitigated);

/// Mitigation ingredients of one DQCp phase point on a two-qubit device.
struct TwoQubitPlanParts {
    QuasiDecomposition gate;
    QuasiDecomposition measurement;
    SamplingPlan plan;
};

/// Build the 257-op basis from single-qubit characterizations and the
/// twirled-gate estimate, and decompose C_phi and the X measurement.
TwoQubitPlanParts build_dqcp_plan(const DeviceModel& device, double phi, const QubitCharacterization& q0,
                                  const QubitCharacterization& q1, const TwirlDistribution& twirl,
                                  const MeasurementMode& mode);

ExperimentResult run_one_qubit(const ExperimentConfig& config);
std::vector<ExperimentResult> run_two_qubit_sweep(const ExperimentConfig& config);

struct DepolarizingAnalysis {
    double f2 = 1.0;
    double fm = 1.0;
    double phi = 0.0;
    double eps2 = 0.0;
    double epsm = 0.0;
    double ideal = 0.0;
    double delta = 0.0;
};

/// eps2 = 16 (1 - F2) / 15, epsM = 2 (1 - FM), delta = ideal (eps2 + epsM).
/// Fidelities must lie in (0.5, 1].
DepolarizingAnalysis depolarizing_analysis(double f2, double fm, double phi);

/// Common fidelity F = F2 = FM giving the target delta at phi.
double required_fidelity(double delta, double phi);

std::uint64_t config_hash(const nlohmann::json& config);

/// Result document: {"tool", "version", "experiment", "seed", "config_hash",
/// "config", "results": [{"phi"?, "ideal", "cost", "n_samples", "reps",
/// "exact_raw", "exact_mitigated", "raw": SERIES, "mitigated": SERIES,
/// "decompositions"}]} with SERIES = {"mean", "sd", "se", "values"}.
nlohmann::json experiment_report(const ExperimentConfig& config, const std::vector<ExperimentResult>& results);

/// Delimited table with the header
/// phi,ideal,raw_mean,raw_sd,qem_mean,qem_sd,cost,n_samples
std::string delimited_table(const std::vector<ExperimentResult>& results);

/// Copy of a device config reduced to its first `n` qubits.
DeviceConfig restrict_qubits(DeviceConfig config, int n);

}  // namespace uqem

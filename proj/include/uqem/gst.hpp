#pragma once

// Gate set tomography by linear inversion.
//
// The preparations are assumed ideal (A-hat), the Gram matrix g = B A gives
// the readout estimate B-hat = g A-hat^-1, and each transfer matrix
// U~ = B U A gives U-hat = B-hat^-1 U~ A-hat^-1. Two-qubit readout and
// preparation matrices are tensor products of single-qubit ones; only
// two-qubit gates get a full 16 x 16 transfer measurement.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "uqem/device.hpp"
#include "uqem/gates.hpp"

namespace uqem {

/// shots == 0 means exact (infinite-shot) expectation values.
struct MeasurementMode {
    std::int64_t shots = 0;
    std::uint64_t seed = 0;

    bool exact() const { return shots <= 0; }
};

inline constexpr double kMaxConditionNumber = 1e8;

/// Outcome tallies of one tomography entry in shot mode. Samples are
/// products of +/-1 readouts and 0/1 instrument outcomes, so only -1, 0
/// and +1 occur.
struct EntryCounts {
    std::int64_t minus = 0;
    std::int64_t zero = 0;
    std::int64_t plus = 0;

    std::int64_t total() const { return minus + zero + plus; }
    double mean() const;
};

/// A measured 4^n x 4^n tomography matrix: entry (i, j) prepares
/// configuration j and measures Pauli effect i.
struct TomographyData {
    int n_qubits = 1;
    Matrix values;
    std::vector<EntryCounts> counts;  // row-major, shot mode only

    bool sampled() const { return !counts.empty(); }
};

struct GramMatrix {
    int n_qubits = 1;
    Matrix matrix;
};

struct GateSetEstimate {
    int n_qubits = 1;
    Matrix A_hat;
    Matrix B_hat;
    std::map<std::string, PtmMap> U_hat;
};

/// Measure ops (nullptr = none) between the standard preparations and the
/// Pauli effects on `qubits` of the device register. Unlisted qubits are
/// prepared in |0> and left unmeasured. `stream` separates the random
/// streams of different tomography runs.
TomographyData measure_tomography(const DeviceModel& device, const EffectiveOp* op, std::span<const int> qubits,
                                  const MeasurementMode& mode, std::uint64_t stream);

GramMatrix measure_gram(const DeviceModel& device, std::span<const int> qubits, const MeasurementMode& mode,
                        std::uint64_t stream = 0);

/// Transfer matrix U~ of an effective op; instrument outcomes weight the
/// recorded values.
Matrix measure_transfer(const DeviceModel& device, const EffectiveOp& op, std::span<const int> qubits,
                        const MeasurementMode& mode, std::uint64_t stream = 1);

/// Throws InversionError when cond(g) >= kMaxConditionNumber.
Matrix estimate_readout(const Matrix& gram);
PtmMap estimate_gate(const Matrix& B_hat, const Matrix& transfer);

GateSetEstimate linear_inversion(const GramMatrix& g, const std::map<std::string, Matrix>& transfers);

double condition_number(const Matrix& m);

/// Single-qubit characterization of one register qubit: Gram matrix,
/// readout estimate and estimates of the given one-qubit ops.
struct QubitCharacterization {
    int qubit = 0;
    TomographyData gram;
    Matrix B_hat;
    std::vector<EffectiveOp> ops;  // ptm replaced by the estimate
    std::vector<TomographyData> transfers;
};

QubitCharacterization characterize_qubit(const DeviceModel& device, int qubit, const std::vector<EffectiveOp>& ops,
                                         const MeasurementMode& mode);

/// Estimate of a two-qubit op with the factorized readout B0 (x) B1.
struct TwoQubitCharacterization {
    TomographyData transfer;
    Matrix B_hat;
    EffectiveOp op;  // ptm replaced by the estimate
};

TwoQubitCharacterization characterize_two_qubit(const DeviceModel& device, const EffectiveOp& op,
                                                const Matrix& B_hat_0, const Matrix& B_hat_1,
                                                const MeasurementMode& mode, std::uint64_t stream);

/// Bootstrap standard error of the process fidelity of an estimate,
/// resampling the shot tallies of the Gram and transfer data. Returns
/// nullopt in exact mode.
std::optional<double> bootstrap_fidelity_se(const std::vector<const TomographyData*>& grams,
                                            const TomographyData& transfer, const PtmMap& ideal, int resamples,
                                            std::uint64_t seed);

/// Gate-set report document:
///   {"n_qubits", "mode": {"shots", "seed"}, "bootstrap_resamples",
///    "qubits": [{"qubit", "gram", "B_hat",
///                "ops": [{"label", "ptm", "fidelity", "fidelity_se"?}]}],
///    "two_qubit": [{"label", "ptm", "fidelity", "fidelity_se"?}]}
/// Matrices are arrays of rows.
nlohmann::json gate_set_report(const DeviceModel& device, const std::vector<double>& phis,
                               const MeasurementMode& mode, int bootstrap_resamples);

nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace uqem

#pragma once

// Simulated noisy device. Every ideal operation maps to a noisy PTM: the
// ideal map followed by the configured channel chain. Readout errors act on
// measurement effects only.
//
// Config document (JSON), all keys optional:
//
//   {
//     "n_qubits": 1 | 2,
//     "preset": "ideal" | "paper-device",
//     "readout": {"e0": 0.035, "e1": 0.057}      // or one such object per qubit
//     "prep_noise": NOISE,
//     "gate_noise": {
//       "single_qubit": NOISE,                   // rotations and Pauli gates
//       "cphase": NOISE,                         // every C_phi without an override
//       "cphase@<phi>": NOISE                    // override for one phase (radians)
//     },
//     "instrument_noise": NOISE,                 // channel on the reset state
//     "seed": 7
//   }
//
//   NOISE := {"kind": K, "param": x [, "axis": "ZZ"]} | [NOISE, ...]
//   K     := none | depolarizing | fidelity | dephasing | amplitude_damping | overrotation
//
// For instrument_noise, kind "fidelity" means the depolarizing strength on
// the reset state is calibrated so the six measurement-reset operations reach
// the given mean process fidelity (readout errors included); in a chain only
// a trailing "fidelity" entry has that meaning. Unknown keys are
// rejected with the offending field path.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "uqem/gates.hpp"
#include "uqem/noise.hpp"

namespace uqem {

struct DeviceConfig {
    int n_qubits = 1;
    std::string preset;
    std::vector<ReadoutError> readout;  // one per qubit; empty means ideal
    NoiseChain prep_noise;
    NoiseChain single_qubit_noise;
    NoiseChain cphase_noise;
    std::vector<std::pair<double, NoiseChain>> cphase_overrides;
    NoiseChain instrument_noise;
    std::optional<double> instrument_fidelity;
    std::optional<std::uint64_t> seed;

    nlohmann::json to_json() const;
};

inline constexpr const char* kPaperDevicePreset = "paper-device";
inline constexpr const char* kIdealPreset = "ideal";

/// Process fidelities of C_phi on the reference device, keyed by phi.
std::vector<std::pair<double, double>> paper_cphase_fidelities();

DeviceConfig preset_config(const std::string& name, int n_qubits = 2);
DeviceConfig parse_device_config(const nlohmann::json& doc);

/// Accepts a preset name or a path to a JSON config file.
DeviceConfig load_device_config(const std::string& path_or_preset);

class DeviceModel {
  public:
    int n_qubits() const { return n_qubits_; }
    const DeviceConfig& config() const { return config_; }

    const ReadoutError& readout(int qubit) const;

    /// Noisy single-qubit preparation k (0..3, standard order) on a qubit.
    const PtmState& prep_state(int qubit, int k) const;

    /// Noisy +/-1 effect for a Pauli string on the full register; identity
    /// letters are unmeasured and exact.
    PtmObservable effect(const PauliString& p) const;

    /// Noisy local map of a gate (1 or 2 qubits; single-qubit gates are
    /// identical on every qubit).
    PtmMap gate(const GateSpec& g) const;

    /// Noisy measurement-reset instrument on a qubit.
    Instrument instrument(const MeasureReset& mr, int qubit) const;

    /// Channel applied to the reset state after calibration.
    const PtmMap& reset_channel() const { return reset_channel_; }

  private:
    friend DeviceModel build_device(const DeviceConfig& config);

    int n_qubits_ = 1;
    DeviceConfig config_;
    std::vector<ReadoutError> readout_;
    std::vector<std::vector<PtmState>> preps_;
    PtmMap reset_channel_;
};

DeviceModel build_device(const DeviceConfig& config);

/// Mean process fidelity of the six measurement-reset operations on a qubit.
double mean_measure_reset_fidelity(const DeviceModel& device, int qubit);

}  // namespace uqem

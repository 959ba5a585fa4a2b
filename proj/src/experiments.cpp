#include "uqem/experiments.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "uqem/errors.hpp"

namespace uqem {

using nlohmann::json;

namespace {

constexpr std::uint64_t kRawStream = 1;
constexpr std::uint64_t kMitigatedStream = 2;

std::uint64_t stream_base(std::uint64_t kind, std::size_t point) {
    return (kind << 40) | (static_cast<std::uint64_t>(point) << 20);
}

SeriesSummary run_series(const PlanExecutor& exec, std::int64_t shots, int reps, std::uint64_t seed,
                         std::uint64_t base) {
    const auto est = estimate_repetitions(exec, static_cast<std::size_t>(shots), static_cast<std::size_t>(reps), seed, base);
    std::vector<double> values;
    values.reserve(est.size());
    for (const auto& e : est) values.push_back(e.mean);
    return summarize(std::move(values));
}

json series_json(const SeriesSummary& s) {
    return {{"mean", s.mean}, {"sd", s.sd}, {"se", s.se}, {"values", s.values}};
}

MeasurementMode gst_mode(const ExperimentConfig& c) { return MeasurementMode{c.gst_shots, c.seed}; }

EffectiveOp y_half_pair() {
    const EffectiveOp y = gate_op(Rotation{Pauli::Y, std::numbers::pi / 2});
    return tensor_op(y, y);
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::vector<double> default_phis() {
    using std::numbers::pi;
    return {pi / 4, pi / 2, 3 * pi / 4, pi};
}

std::int64_t ExperimentConfig::effective_shots() const {
    std::int64_t s = shots > 0 ? shots : (experiment == "one-qubit" ? kOneQubitShots : kTwoQubitShots);
    if (quick) s = std::max<std::int64_t>(10, s / 100);
    return s;
}

std::vector<double> ExperimentConfig::effective_phis() const { return phis.empty() ? default_phis() : phis; }

json ExperimentConfig::to_json() const {
    json doc;
    doc["experiment"] = experiment;
    doc["device_ref"] = device_ref;
    doc["device"] = device.to_json();
    doc["shots"] = effective_shots();
    doc["reps"] = reps;
    if (experiment != "one-qubit") doc["phis"] = effective_phis();
    doc["seed"] = seed;
    doc["quick"] = quick;
    doc["twirl"] = twirl;
    doc["gst_shots"] = gst_shots;
    return doc;
}

SeriesSummary summarize(std::vector<double> values) {
    SeriesSummary s;
    s.values = std::move(values);
    const double n = static_cast<double>(s.values.size());
    if (s.values.empty()) return s;
    double sum = 0.0;
    for (double v : s.values) sum += v;
    s.mean = sum / n;
    if (s.values.size() > 1) {
        double sq = 0.0;
        for (double v : s.values) sq += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(sq / (n - 1.0));
        s.se = s.sd / std::sqrt(n);
    }
    return s;
}

double one_qubit_ideal() {
    const PtmMap ops[] = {ideal_ptm(Rotation{Pauli::X, std::numbers::pi / 2})};
    return expectation(PtmObservable::pauli(PauliString::from_str("Z")), ops,
                       PtmState(1, preparation_states_1q().col(0)));
}

double dqcp_ideal(double phi) {
    const PtmMap ops[] = {y_half_pair().ptm, ideal_ptm(ControlledPhase{phi})};
    return expectation(PtmObservable::pauli(PauliString::from_str("IX")), ops,
                       PtmState(2, preparation_matrix(2).col(0)));
}

CircuitTemplate one_qubit_circuit(bool mitigated) {
    CircuitTemplate t;
    t.n_qubits = 1;
    t.preps = {0};
    t.ops.emplace_back(gate_op(Rotation{Pauli::X, std::numbers::pi / 2}));
    if (mitigated) {
        t.measurement = SlotRef{"meas"};
    } else {
        t.measurement = PauliString::from_str("Z");
    }
    return t;
}

CircuitTemplate dqcp_circuit(double phi, bool mitigated) {
    CircuitTemplate t;
    t.n_qubits = 2;
    t.preps = {0, 0};
    t.ops.emplace_back(y_half_pair());
    if (mitigated) {
        t.ops.emplace_back(SlotRef{"gate"});
        t.measurement = SlotRef{"meas"};
    } else {
        t.ops.emplace_back(gate_op(ControlledPhase{phi}));
        t.measurement = PauliString::from_str("IX");
    }
    return t;
}

TwoQubitPlanParts build_dqcp_plan(const DeviceModel& device, double phi, const QubitCharacterization& q0,
                                  const QubitCharacterization& q1, const TwirlDistribution& twirl,
                                  const MeasurementMode& mode) {
    const std::uint64_t stream = 1000 + (Rng::mix(std::bit_cast<std::uint64_t>(phi)) >> 16);
    const auto gate = characterize_two_qubit(device, gate_op(ControlledPhase{phi}), q0.B_hat, q1.B_hat, mode, stream);
    const EffectiveOp twirled = make_twirled_gate(phi, twirl, twirl_estimate(gate.op.ptm, phi, twirl));
    const auto basis = basis_operations_2q(q0.ops, q1.ops, twirled);

    TwoQubitPlanParts parts;
    parts.gate = decompose_gate(ideal_ptm(ControlledPhase{phi}), basis, gate_label(ControlledPhase{phi}));
    parts.measurement = decompose_observable(PtmObservable::pauli(PauliString::from_str("X")), q1.B_hat, 1, 2);
    parts.plan = build_plan(dqcp_circuit(phi, true), {{"gate", parts.gate}, {"meas", parts.measurement}});
    return parts;
}

ExperimentResult run_one_qubit(const ExperimentConfig& config) {
    const DeviceModel device = build_device(restrict_qubits(config.device, 1));
    const MeasurementMode mode = gst_mode(config);
    const int where[] = {0};
    const Matrix B_hat = estimate_readout(measure_gram(device, where, mode).matrix);
    const auto meas = decompose_observable(PtmObservable::pauli(PauliString::from_str("Z")), B_hat);

    const SamplingPlan raw_plan = build_plan(one_qubit_circuit(false), {});
    const SamplingPlan qem_plan = build_plan(one_qubit_circuit(true), {{"meas", meas}});
    const std::int64_t shots = config.effective_shots();

    ExperimentResult r;
    r.experiment = "one-qubit";
    r.ideal = one_qubit_ideal();
    r.raw = run_series(PlanExecutor(raw_plan, device), shots, config.reps, config.seed, stream_base(kRawStream, 0));
    r.mitigated = run_series(PlanExecutor(qem_plan, device), shots, config.reps, config.seed,
                             stream_base(kMitigatedStream, 0));
    r.cost = qem_plan.total_cost;
    r.n_samples = shots;
    r.exact_raw = plan_exact_value(raw_plan, device);
    r.exact_mitigated = plan_exact_value(qem_plan, device);
    r.decompositions = {{"measurement", meas.to_json()}, {"plan", qem_plan.to_json()}};
    return r;
}

std::vector<ExperimentResult> run_two_qubit_sweep(const ExperimentConfig& config) {
    if (config.device.n_qubits != 2) {
        throw ConfigError("n_qubits", "the two-qubit sweep needs a two-qubit device");
    }
    const DeviceModel device = build_device(config.device);
    const MeasurementMode mode = gst_mode(config);
    const auto basis_1q = basis_operations_1q();
    const auto q0 = characterize_qubit(device, 0, basis_1q, mode);
    const auto q1 = characterize_qubit(device, 1, basis_1q, mode);
    const std::int64_t shots = config.effective_shots();

    std::vector<ExperimentResult> out;
    const auto phis = config.effective_phis();
    for (std::size_t p = 0; p < phis.size(); ++p) {
        const double phi = phis[p];
        const TwirlDistribution twirl = config.twirl ? default_twirl(phi) : no_twirl();
        const auto parts = build_dqcp_plan(device, phi, q0, q1, twirl, mode);
        const SamplingPlan raw_plan = build_plan(dqcp_circuit(phi, false), {});

        ExperimentResult r;
        r.experiment = "two-qubit-sweep";
        r.phi = phi;
        r.ideal = dqcp_ideal(phi);
        r.raw = run_series(PlanExecutor(raw_plan, device), shots, config.reps, config.seed,
                           stream_base(kRawStream, p));
        r.mitigated = run_series(PlanExecutor(parts.plan, device), shots, config.reps, config.seed,
                                 stream_base(kMitigatedStream, p));
        r.cost = parts.plan.total_cost;
        r.n_samples = shots;
        r.exact_raw = plan_exact_value(raw_plan, device);
        r.exact_mitigated = plan_exact_value(parts.plan, device);
        r.decompositions = {{"gate", parts.gate.to_json()},
                            {"measurement", parts.measurement.to_json()},
                            {"plan", parts.plan.to_json()}};
        out.push_back(std::move(r));
    }
    return out;
}

DepolarizingAnalysis depolarizing_analysis(double f2, double fm, double phi) {
    for (double f : {f2, fm}) {
        if (!(f > 0.5 && f <= 1.0)) {
            throw ValidationError("fidelity " + format_number(f) + " outside (0.5, 1]");
        }
    }
    DepolarizingAnalysis a;
    a.f2 = f2;
    a.fm = fm;
    a.phi = phi;
    a.eps2 = depolarizing_epsilon_for_fidelity(f2, 2);
    a.epsm = 2.0 * (1.0 - fm);
    a.ideal = dqcp_ideal(phi);
    a.delta = a.ideal * (a.eps2 + a.epsm);
    return a;
}

double required_fidelity(double delta, double phi) {
    const double ideal = dqcp_ideal(phi);
    if (!(delta >= 0.0)) throw ValidationError("target delta must be non-negative");
    if (std::abs(ideal) < 1e-12) throw NumericalError("ideal value vanishes at this phase; any fidelity works");
    // delta = ideal (1 - F) (16/15 + 2), linear in F.
    const double f = 1.0 - delta / (ideal * (16.0 / 15.0 + 2.0));
    if (!(f > 0.5 && f <= 1.0)) {
        throw NumericalError("no fidelity in (0.5, 1] reaches delta " + format_number(delta));
    }
    return f;
}

std::uint64_t config_hash(const json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

json experiment_report(const ExperimentConfig& config, const std::vector<ExperimentResult>& results) {
    const json cfg = config.to_json();
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
    json doc;
    doc["tool"] = "uqem";
    doc["version"] = UQEM_VERSION;
    doc["experiment"] = config.experiment;
    doc["seed"] = config.seed;
    doc["config_hash"] = hash;
    doc["config"] = cfg;
    doc["results"] = json::array();
    for (const auto& r : results) {
        json e;
        if (r.phi) e["phi"] = *r.phi;
        e["ideal"] = r.ideal;
        e["cost"] = r.cost;
        e["n_samples"] = r.n_samples;
        e["reps"] = r.raw.values.size();
        e["exact_raw"] = r.exact_raw;
        e["exact_mitigated"] = r.exact_mitigated;
        e["raw"] = series_json(r.raw);
        e["mitigated"] = series_json(r.mitigated);
        e["decompositions"] = r.decompositions;
        doc["results"].push_back(std::move(e));
    }
    return doc;
}

std::string delimited_table(const std::vector<ExperimentResult>& results) {
    std::ostringstream out;
    out << "phi,ideal,raw_mean,raw_sd,qem_mean,qem_sd,cost,n_samples\n";
    for (const auto& r : results) {
        out << (r.phi ? format_number(*r.phi) : "") << ',' << format_number(r.ideal) << ','
            << format_number(r.raw.mean) << ',' << format_number(r.raw.sd) << ',' << format_number(r.mitigated.mean)
            << ',' << format_number(r.mitigated.sd) << ',' << format_number(r.cost) << ',' << r.n_samples << '\n';
    }
    return out.str();
}

DeviceConfig restrict_qubits(DeviceConfig config, int n) {
    if (n < 1 || n > config.n_qubits) throw ConfigError("n_qubits", "cannot restrict the device to " + std::to_string(n) + " qubits");
    config.n_qubits = n;
    if (config.readout.size() > static_cast<std::size_t>(n)) config.readout.resize(static_cast<std::size_t>(n));
    return config;
}

}  // namespace uqem

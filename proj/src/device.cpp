#include "uqem/device.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "uqem/errors.hpp"
#include "uqem/fidelity.hpp"

namespace uqem {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

constexpr double kPhaseMatchTol = 1e-6;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    for (const auto& [key, _] : obj.items()) {
        if (allowed.count(key) == 0 && !(path == "gate_noise" && key.rfind("cphase@", 0) == 0)) {
            throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
        }
    }
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError(path + "." + key, "missing required number");
    }
    if (!it->is_number()) {
        throw ConfigError(path + "." + key, "expected a number");
    }
    return it->get<double>();
}

NoiseSpec parse_noise_entry(const json& obj, const std::string& path) {
    if (!obj.is_object()) {
        throw ConfigError(path, "expected a noise object {kind, param}");
    }
    reject_unknown_keys(obj, {"kind", "param", "axis"}, path);
    if (!obj.contains("kind") || !obj["kind"].is_string()) {
        throw ConfigError(path + ".kind", "missing noise kind");
    }
    const auto kind = obj["kind"].get<std::string>();
    NoiseSpec spec;
    if (kind == "none") {
        spec = noise::None{};
    } else if (kind == "depolarizing") {
        spec = noise::Depolarizing{number_at(obj, "param", path)};
    } else if (kind == "fidelity") {
        spec = noise::DepolarizingFidelity{number_at(obj, "param", path)};
    } else if (kind == "dephasing") {
        spec = noise::Dephasing{number_at(obj, "param", path)};
    } else if (kind == "amplitude_damping") {
        spec = noise::AmplitudeDamping{number_at(obj, "param", path)};
    } else if (kind == "overrotation") {
        noise::Overrotation o;
        o.dtheta = number_at(obj, "param", path);
        if (obj.contains("axis")) {
            if (!obj["axis"].is_string()) throw ConfigError(path + ".axis", "expected a Pauli string");
            try {
                o.axis = PauliString::from_str(obj["axis"].get<std::string>());
            } catch (const ValidationError& e) {
                throw ConfigError(path + ".axis", e.what());
            }
        }
        spec = o;
    } else {
        throw ConfigError(path + ".kind", "unknown noise kind '" + kind + "'");
    }
    if (kind != "overrotation" && obj.contains("axis")) {
        throw ConfigError(path + ".axis", "axis is only valid for overrotation");
    }
    try {
        validate(spec);
    } catch (const ValidationError& e) {
        throw ConfigError(path + ".param", e.what());
    }
    return spec;
}

NoiseChain parse_noise(const json& doc, const std::string& path) {
    NoiseChain chain;
    if (doc.is_array()) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            chain.push_back(parse_noise_entry(doc[i], path + "[" + std::to_string(i) + "]"));
        }
    } else {
        chain.push_back(parse_noise_entry(doc, path));
    }
    return chain;
}

ReadoutError parse_readout_entry(const json& obj, const std::string& path) {
    if (!obj.is_object()) {
        throw ConfigError(path, "expected {e0, e1}");
    }
    reject_unknown_keys(obj, {"e0", "e1"}, path);
    ReadoutError r{number_at(obj, "e0", path), number_at(obj, "e1", path)};
    try {
        validate(r);
    } catch (const ValidationError& e) {
        throw ConfigError(path, e.what());
    }
    return r;
}

json noise_to_json(const NoiseSpec& spec) {
    return std::visit(overloaded{
                          [](const noise::None&) { return json{{"kind", "none"}}; },
                          [](const noise::Depolarizing& d) { return json{{"kind", "depolarizing"}, {"param", d.epsilon}}; },
                          [](const noise::DepolarizingFidelity& d) { return json{{"kind", "fidelity"}, {"param", d.fidelity}}; },
                          [](const noise::Dephasing& d) { return json{{"kind", "dephasing"}, {"param", d.p}}; },
                          [](const noise::AmplitudeDamping& a) {
                              return json{{"kind", "amplitude_damping"}, {"param", a.gamma}};
                          },
                          [](const noise::Overrotation& o) {
                              return json{{"kind", "overrotation"}, {"param", o.dtheta}, {"axis", o.axis.str()}};
                          },
                      },
                      spec);
}

json chain_to_json(const NoiseChain& chain) {
    json out = json::array();
    for (const auto& s : chain) out.push_back(noise_to_json(s));
    return out;
}

std::string phase_key(double phi) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "cphase@%.17g", phi);
    return buf;
}

}  // namespace

json DeviceConfig::to_json() const {
    json doc;
    doc["n_qubits"] = n_qubits;
    if (!preset.empty()) doc["preset"] = preset;
    json r = json::array();
    for (const auto& e : readout) r.push_back({{"e0", e.e0}, {"e1", e.e1}});
    doc["readout"] = r;
    doc["prep_noise"] = chain_to_json(prep_noise);
    json gates;
    gates["single_qubit"] = chain_to_json(single_qubit_noise);
    gates["cphase"] = chain_to_json(cphase_noise);
    for (const auto& [phi, chain] : cphase_overrides) gates[phase_key(phi)] = chain_to_json(chain);
    doc["gate_noise"] = gates;
    if (instrument_fidelity) {
        const json target = {{"kind", "fidelity"}, {"param", *instrument_fidelity}};
        if (instrument_noise.empty()) {
            doc["instrument_noise"] = target;
        } else {
            json chain = json::array();
            for (const auto& spec : instrument_noise) chain.push_back(noise_to_json(spec));
            chain.push_back(target);
            doc["instrument_noise"] = chain;
        }
    } else {
        doc["instrument_noise"] = chain_to_json(instrument_noise);
    }
    if (seed) doc["seed"] = *seed;
    return doc;
}

std::vector<std::pair<double, double>> paper_cphase_fidelities() {
    using std::numbers::pi;
    return {{pi / 4, 0.958}, {pi / 2, 0.935}, {3 * pi / 4, 0.920}, {pi, 0.915}};
}

DeviceConfig preset_config(const std::string& name, int n_qubits) {
    DeviceConfig cfg;
    cfg.n_qubits = n_qubits;
    cfg.preset = name;
    if (name == kIdealPreset) {
        return cfg;
    }
    if (name == kPaperDevicePreset) {
        cfg.readout = {ReadoutError{0.035, 0.057}};
        // Phases outside the table fall back to the worst reported fidelity.
        cfg.cphase_noise = {noise::DepolarizingFidelity{0.915}};
        for (const auto& [phi, f] : paper_cphase_fidelities()) {
            cfg.cphase_overrides.emplace_back(phi, NoiseChain{noise::DepolarizingFidelity{f}});
        }
        cfg.instrument_fidelity = 0.916;
        return cfg;
    }
    throw ConfigError("preset", "unknown preset '" + name + "'");
}

DeviceConfig parse_device_config(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("", "device config must be a JSON object");
    }
    reject_unknown_keys(doc, {"n_qubits", "preset", "readout", "prep_noise", "gate_noise", "instrument_noise", "seed"}, "");

    int n_qubits = 0;
    if (doc.contains("n_qubits")) {
        if (!doc["n_qubits"].is_number_integer()) throw ConfigError("n_qubits", "expected an integer");
        n_qubits = doc["n_qubits"].get<int>();
        if (n_qubits < 1 || n_qubits > 2) throw ConfigError("n_qubits", "only 1 or 2 qubits are supported");
    }

    DeviceConfig cfg;
    if (doc.contains("preset")) {
        if (!doc["preset"].is_string()) throw ConfigError("preset", "expected a string");
        const auto name = doc["preset"].get<std::string>();
        cfg = preset_config(name, n_qubits > 0 ? n_qubits : (name == kPaperDevicePreset ? 2 : 1));
    }
    if (n_qubits > 0) cfg.n_qubits = n_qubits;

    if (doc.contains("readout")) {
        const auto& r = doc["readout"];
        cfg.readout.clear();
        if (r.is_array()) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                cfg.readout.push_back(parse_readout_entry(r[i], "readout[" + std::to_string(i) + "]"));
            }
        } else {
            cfg.readout.push_back(parse_readout_entry(r, "readout"));
        }
    }
    if (doc.contains("prep_noise")) cfg.prep_noise = parse_noise(doc["prep_noise"], "prep_noise");
    if (doc.contains("gate_noise")) {
        const auto& g = doc["gate_noise"];
        if (!g.is_object()) throw ConfigError("gate_noise", "expected an object");
        reject_unknown_keys(g, {"single_qubit", "cphase"}, "gate_noise");
        if (g.contains("single_qubit")) cfg.single_qubit_noise = parse_noise(g["single_qubit"], "gate_noise.single_qubit");
        if (g.contains("cphase")) cfg.cphase_noise = parse_noise(g["cphase"], "gate_noise.cphase");
        for (const auto& [key, value] : g.items()) {
            if (key.rfind("cphase@", 0) != 0) continue;
            const std::string path = "gate_noise." + key;
            double phi = 0.0;
            try {
                std::size_t used = 0;
                phi = std::stod(key.substr(7), &used);
                if (used != key.size() - 7) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw ConfigError(path, "cannot parse phase after 'cphase@'");
            }
            auto chain = parse_noise(value, path);
            bool replaced = false;
            for (auto& [p, c] : cfg.cphase_overrides) {
                if (std::abs(p - phi) < kPhaseMatchTol) {
                    c = chain;
                    replaced = true;
                }
            }
            if (!replaced) cfg.cphase_overrides.emplace_back(phi, std::move(chain));
        }
    }
    if (doc.contains("instrument_noise")) {
        const auto& in = doc["instrument_noise"];
        cfg.instrument_noise.clear();
        cfg.instrument_fidelity.reset();
        // A trailing "fidelity" entry is the calibration target for the
        // depolarizing strength applied after the rest of the chain.
        auto is_target = [](const json& e) { return e.is_object() && e.value("kind", "") == "fidelity"; };
        auto read_target = [&](const json& e, const std::string& path) {
            reject_unknown_keys(e, {"kind", "param"}, path);
            const double f = number_at(e, "param", path);
            if (!(f > 0.0 && f <= 1.0)) throw ConfigError(path + ".param", "fidelity must lie in (0, 1]");
            cfg.instrument_fidelity = f;
        };
        if (is_target(in)) {
            read_target(in, "instrument_noise");
        } else if (in.is_array() && !in.empty() && is_target(in.back())) {
            const std::string path = "instrument_noise[" + std::to_string(in.size() - 1) + "]";
            read_target(in.back(), path);
            cfg.instrument_noise = parse_noise(json(std::vector<json>(in.begin(), in.end() - 1)), "instrument_noise");
        } else {
            cfg.instrument_noise = parse_noise(in, "instrument_noise");
        }
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    return cfg;
}

DeviceConfig load_device_config(const std::string& path_or_preset) {
    if (path_or_preset == kPaperDevicePreset || path_or_preset == kIdealPreset) {
        return preset_config(path_or_preset, path_or_preset == kPaperDevicePreset ? 2 : 1);
    }
    std::ifstream in(path_or_preset);
    if (!in) {
        throw ConfigError("config", "cannot open config file '" + path_or_preset + "'");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("config", "'" + path_or_preset + "' is not valid JSON: " + e.what());
    }
    return parse_device_config(doc);
}

const ReadoutError& DeviceModel::readout(int qubit) const {
    if (qubit < 0 || qubit >= n_qubits_) throw ValidationError("readout: qubit out of range");
    return readout_[static_cast<std::size_t>(qubit)];
}

const PtmState& DeviceModel::prep_state(int qubit, int k) const {
    if (qubit < 0 || qubit >= n_qubits_ || k < 0 || k >= 4) throw ValidationError("prep_state: index out of range");
    return preps_[static_cast<std::size_t>(qubit)][static_cast<std::size_t>(k)];
}

PtmObservable DeviceModel::effect(const PauliString& p) const {
    if (p.n_qubits() != n_qubits_) {
        throw ValidationError("effect: Pauli string '" + p.str() + "' does not match the register size");
    }
    PtmObservable out = noisy_pauli_effect(p[0], readout_[0]);
    for (int q = 1; q < n_qubits_; ++q) {
        out = tensor(out, noisy_pauli_effect(p[static_cast<std::size_t>(q)], readout_[static_cast<std::size_t>(q)]));
    }
    return out;
}

PtmMap DeviceModel::gate(const GateSpec& g) const {
    return std::visit(overloaded{
                          [&](const Identity& id) { return PtmMap::identity(id.n_qubits); },
                          [&](const Rotation& r) {
                              return compose(build_channel(config_.single_qubit_noise, 1), ideal_ptm(r));
                          },
                          [&](const PauliGate& p) {
                              PtmMap out = PtmMap::identity(1);
                              for (int q = 0; q < p.pauli.n_qubits(); ++q) {
                                  const PauliGate letter{PauliString({p.pauli[static_cast<std::size_t>(q)]})};
                                  PtmMap one = compose(build_channel(config_.single_qubit_noise, 1), ideal_ptm(letter));
                                  out = q == 0 ? one : tensor(out, one);
                              }
                              return out;
                          },
                          [&](const ControlledPhase& c) {
                              const NoiseChain* chain = &config_.cphase_noise;
                              for (const auto& [phi, ov] : config_.cphase_overrides) {
                                  if (std::abs(phi - c.phi) < kPhaseMatchTol) chain = &ov;
                              }
                              return compose(build_channel(*chain, 2), ideal_ptm(c));
                          },
                      },
                      g);
}

Instrument DeviceModel::instrument(const MeasureReset& mr, int qubit) const {
    const PtmObservable e1 = noisy_projector_effect(mr.axis, readout(qubit));
    RowVector e0 = -e1.entries();
    e0[0] += 1.0;
    const Vector target = reset_channel_.matrix() * pure_state(mr.psi).entries();
    return Instrument::unchecked({Branch{0.0, PtmMap(1, target * e0)}, Branch{1.0, PtmMap(1, target * e1.entries())}});
}

double mean_measure_reset_fidelity(const DeviceModel& device, int qubit) {
    double total = 0.0;
    int count = 0;
    for (const auto& op : basis_operations_1q()) {
        for (const auto& step : op.realization) {
            if (const auto* s = std::get_if<InstrumentStep>(&step)) {
                total += process_fidelity(device.instrument(s->op, qubit).effective_map(), op.ptm);
                ++count;
            }
        }
    }
    return total / count;
}

DeviceModel build_device(const DeviceConfig& config) {
    if (config.n_qubits < 1 || config.n_qubits > 2) {
        throw ConfigError("n_qubits", "only 1 or 2 qubits are supported");
    }
    DeviceModel d;
    d.n_qubits_ = config.n_qubits;
    d.config_ = config;

    if (config.readout.empty()) {
        d.readout_.assign(static_cast<std::size_t>(config.n_qubits), ReadoutError{});
    } else if (config.readout.size() == 1) {
        d.readout_.assign(static_cast<std::size_t>(config.n_qubits), config.readout.front());
    } else if (config.readout.size() >= static_cast<std::size_t>(config.n_qubits)) {
        d.readout_.assign(config.readout.begin(), config.readout.begin() + config.n_qubits);
    } else {
        throw ConfigError("readout", "expected one entry or one per qubit");
    }

    const PtmMap prep_channel = build_channel(config.prep_noise, 1);
    for (int q = 0; q < config.n_qubits; ++q) {
        std::vector<PtmState> preps;
        const Matrix exact = preparation_states_1q();
        for (Eigen::Index k = 0; k < exact.cols(); ++k) {
            preps.push_back(apply(prep_channel, PtmState(1, exact.col(k))));
        }
        d.preps_.push_back(std::move(preps));
    }

    const PtmMap base_reset = build_channel(config.instrument_noise, 1);
    d.reset_channel_ = base_reset;
    if (config.instrument_fidelity) {
        const double target = *config.instrument_fidelity;
        auto fidelity_at = [&](double eps) {
            d.reset_channel_ = compose(build_channel(noise::Depolarizing{eps}, 1), base_reset);
            return mean_measure_reset_fidelity(d, 0);
        };
        const double best = fidelity_at(0.0);
        if (target > best + 1e-12) {
            throw ConfigError("instrument_noise.param", "target fidelity " + std::to_string(target) +
                                                            " exceeds the readout-limited value " + std::to_string(best));
        }
        double lo = 0.0;
        double hi = 1.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            (fidelity_at(mid) > target ? lo : hi) = mid;
        }
        fidelity_at(0.5 * (lo + hi));
    }
    return d;
}

}  // namespace uqem

#include "uqem/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "uqem/errors.hpp"
#include "uqem/experiments.hpp"

namespace uqem {

using nlohmann::json;

namespace {

enum class Format { TableDoc, Delimited };

struct Options {
    std::string config = kPaperDevicePreset;
    std::optional<std::uint64_t> seed;
    std::string output;
    Format format = Format::TableDoc;
    std::optional<std::int64_t> shots;
    int reps = kDefaultReps;
    std::vector<std::string> phis;
    bool quick = false;
    bool no_twirl = false;
    std::int64_t gst_shots = 0;
    int bootstrap = 100;
    double f2 = 0.993;
    double fm = 0.993;
    std::optional<double> target_delta;
};

// Accepts plain numbers and multiples of pi such as "pi", "pi/2", "3pi/4".
double parse_phase(const std::string& text) {
    const auto pos = text.find("pi");
    try {
        if (pos == std::string::npos) {
            std::size_t used = 0;
            const double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        }
        const std::string head = text.substr(0, pos);
        const std::string tail = text.substr(pos + 2);
        double coeff = 1.0;
        if (head == "-") {
            coeff = -1.0;
        } else if (!head.empty()) {
            coeff = std::stod(head);
        }
        double denom = 1.0;
        if (!tail.empty()) {
            if (tail[0] != '/') throw std::invalid_argument(text);
            denom = std::stod(tail.substr(1));
        }
        return coeff * std::numbers::pi / denom;
    } catch (const std::exception&) {
        throw ConfigError("--phi", "cannot parse phase '" + text + "'");
    }
}

std::vector<double> parse_phases(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (const auto& s : items) out.push_back(parse_phase(s));
    return out;
}

std::uint64_t resolve_seed(const Options& o, const DeviceConfig& device) {
    if (o.seed) return *o.seed;
    if (device.seed) return *device.seed;
    if (const char* env = std::getenv(kSeedEnvVar)) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError(kSeedEnvVar, std::string("not an unsigned integer: '") + env + "'");
        }
    }
    return kDefaultSeed;
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
    if (o.output.empty()) {
        out << text;
        return;
    }
    std::ofstream file(o.output, std::ios::binary);
    if (!file) throw ConfigError("--output", "cannot write '" + o.output + "'");
    file << text;
}

std::string document(const json& doc) { return doc.dump(2) + "\n"; }

ExperimentConfig experiment_config(const Options& o, const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    c.device_ref = o.config;
    c.device = load_device_config(o.config);
    c.seed = resolve_seed(o, c.device);
    if (o.shots) {
        if (*o.shots < 1) throw ConfigError("--shots", "must be positive");
        c.shots = *o.shots;
    }
    if (o.reps < 1) throw ConfigError("--reps", "must be positive");
    c.reps = o.reps;
    c.phis = parse_phases(o.phis);
    c.quick = o.quick;
    c.twirl = !o.no_twirl;
    c.gst_shots = o.gst_shots;
    return c;
}

void run_experiment(const Options& o, const std::string& experiment, std::ostream& out) {
    const ExperimentConfig c = experiment_config(o, experiment);
    std::vector<ExperimentResult> results;
    if (experiment == "one-qubit") {
        results.push_back(run_one_qubit(c));
    } else {
        results = run_two_qubit_sweep(c);
    }
    emit(o, o.format == Format::Delimited ? delimited_table(results) : document(experiment_report(c, results)), out);
}

void run_gst(const Options& o, std::ostream& out) {
    const DeviceConfig cfg = load_device_config(o.config);
    const DeviceModel device = build_device(cfg);
    const MeasurementMode mode{o.shots.value_or(0), resolve_seed(o, cfg)};
    if (mode.shots < 0) throw ConfigError("--shots", "must be non-negative");
    const auto phis = o.phis.empty() ? default_phis() : parse_phases(o.phis);
    json doc = gate_set_report(device, phis, mode, o.bootstrap);
    doc["device"] = cfg.to_json();
    if (o.format == Format::TableDoc) {
        emit(o, document(doc), out);
        return;
    }
    std::ostringstream table;
    table << "qubit,label,fidelity,fidelity_se\n";
    auto row = [&](const std::string& qubit, const json& e) {
        table << qubit << ',' << e["label"].get<std::string>() << ',' << e["fidelity"].get<double>() << ',';
        if (e.contains("fidelity_se")) table << e["fidelity_se"].get<double>();
        table << '\n';
    };
    table.precision(10);
    for (const auto& q : doc["qubits"]) {
        for (const auto& e : q["ops"]) row(std::to_string(q["qubit"].get<int>()), e);
    }
    for (const auto& e : doc["two_qubit"]) row("0+1", e);
    emit(o, table.str(), out);
}

void run_decompose(const Options& o, std::ostream& out) {
    ExperimentConfig c = experiment_config(o, "decompose");
    const DeviceModel device = build_device(c.device);
    const MeasurementMode mode{c.gst_shots, c.seed};
    json doc;
    doc["tool"] = "uqem";
    doc["version"] = UQEM_VERSION;
    doc["seed"] = c.seed;
    doc["device"] = c.device.to_json();
    doc["points"] = json::array();
    std::ostringstream table;
    table.precision(12);
    table << "phi,slot,index,label,q\n";

    auto add_rows = [&](const std::string& phi, const std::string& slot, const QuasiDecomposition& d) {
        for (std::size_t k = 0; k < d.basis.size(); ++k) {
            const double q = d.q[static_cast<Eigen::Index>(k)];
            if (q == 0.0) continue;
            table << phi << ',' << slot << ',' << k + 1 << ',' << basis_label(d.basis[k]) << ',' << q << '\n';
        }
    };

    if (device.n_qubits() == 1) {
        const int where[] = {0};
        const Matrix B_hat = estimate_readout(measure_gram(device, where, mode).matrix);
        const auto d = decompose_observable(PtmObservable::pauli(PauliString::from_str("Z")), B_hat);
        doc["points"].push_back({{"measurement", d.to_json()}});
        add_rows("", "meas", d);
    } else {
        const auto basis_1q = basis_operations_1q();
        const auto q0 = characterize_qubit(device, 0, basis_1q, mode);
        const auto q1 = characterize_qubit(device, 1, basis_1q, mode);
        for (double phi : c.effective_phis()) {
            const auto parts = build_dqcp_plan(device, phi, q0, q1, c.twirl ? default_twirl(phi) : no_twirl(), mode);
            doc["points"].push_back({{"phi", phi},
                                     {"gate", parts.gate.to_json()},
                                     {"measurement", parts.measurement.to_json()},
                                     {"plan", parts.plan.to_json()}});
            std::ostringstream p;
            p.precision(10);
            p << phi;
            add_rows(p.str(), "gate", parts.gate);
            add_rows(p.str(), "meas", parts.measurement);
        }
    }
    emit(o, o.format == Format::Delimited ? table.str() : document(doc), out);
}

void run_analysis(const Options& o, std::ostream& out) {
    const double phi = o.phis.empty() ? std::numbers::pi / 2 : parse_phase(o.phis.front());
    if (o.phis.size() > 1) throw ConfigError("--phi", "analysis takes a single phase");
    const auto a = depolarizing_analysis(o.f2, o.fm, phi);
    std::optional<double> required;
    if (o.target_delta) required = required_fidelity(*o.target_delta, phi);
    if (o.format == Format::Delimited) {
        std::ostringstream t;
        t.precision(10);
        t << "f2,fm,phi,eps2,epsm,ideal,delta,target_delta,required_fidelity\n";
        t << a.f2 << ',' << a.fm << ',' << a.phi << ',' << a.eps2 << ',' << a.epsm << ',' << a.ideal << ',' << a.delta
          << ',';
        if (required) t << *o.target_delta << ',' << *required;
        else t << ',';
        t << '\n';
        emit(o, t.str(), out);
        return;
    }
    json doc = {{"f2", a.f2}, {"fm", a.fm}, {"phi", a.phi}, {"eps2", a.eps2},
                {"epsm", a.epsm}, {"ideal", a.ideal}, {"delta", a.delta}};
    if (required) {
        doc["target_delta"] = *o.target_delta;
        doc["required_fidelity"] = *required;
    }
    emit(o, document(doc), out);
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "Device config file or preset name (ideal, paper-device)");
    cmd->add_option("--seed", o.seed, "Master seed (default: config seed, then $UQEM_SEED)");
    cmd->add_option("--output", o.output, "Write the result here instead of stdout");
    cmd->add_option("--format", o.format, "Output format")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, Format>{{"table-doc", Format::TableDoc}, {"delimited", Format::Delimited}}));
}

void add_phi(CLI::App* cmd, Options& o) {
    cmd->add_option("--phi", o.phis, "Phases, comma separated (numbers or forms like pi/2)")->delimiter(',');
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quasiprobability error mitigation on a simulated noisy device", "uqem"};
    app.set_version_flag("--version", UQEM_VERSION);
    app.require_subcommand(1);
    Options o;

    auto* gst = app.add_subcommand("gst", "Gate set tomography report");
    add_common(gst, o);
    add_phi(gst, o);
    gst->add_option("--shots", o.shots, "Shots per tomography entry (0: exact)");
    gst->add_option("--bootstrap", o.bootstrap, "Bootstrap resamples for fidelity errors")->check(CLI::PositiveNumber);

    auto* dec = app.add_subcommand("decompose", "Quasiprobability decompositions");
    add_common(dec, o);
    add_phi(dec, o);
    dec->add_flag("--no-twirl", o.no_twirl, "Use the untwirled gate as the 257th basis op");
    dec->add_option("--gst-shots", o.gst_shots, "Tomography shots per entry (0: exact)")->check(CLI::NonNegativeNumber);

    auto* run = app.add_subcommand("run", "Run a mitigation experiment");
    run->require_subcommand(1);
    for (const char* name : {"one-qubit", "two-qubit"}) {
        auto* cmd = run->add_subcommand(name, std::string("The ") + name + " experiment");
        add_common(cmd, o);
        cmd->add_option("--shots", o.shots, "Samples per repetition");
        cmd->add_option("--reps", o.reps, "Repetitions");
        cmd->add_flag("--quick", o.quick, "Use 1/100 of the shot budget");
        cmd->add_option("--gst-shots", o.gst_shots, "Tomography shots per entry (0: exact)")
            ->check(CLI::NonNegativeNumber);
        if (std::string(name) == "two-qubit") {
            add_phi(cmd, o);
            cmd->add_flag("--no-twirl", o.no_twirl, "Disable Pauli twirling");
        }
    }

    auto* analyze = app.add_subcommand("analyze", "Closed-form analyses");
    analyze->require_subcommand(1);
    auto* depol = analyze->add_subcommand("depolarizing", "Accuracy under depolarizing errors");
    add_common(depol, o);
    add_phi(depol, o);
    depol->add_option("--f2", o.f2, "Two-qubit gate fidelity");
    depol->add_option("--fm", o.fm, "Measurement-reset fidelity");
    depol->add_option("--target-delta", o.target_delta, "Solve for the common fidelity reaching this error");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << UQEM_VERSION << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (gst->parsed()) {
            run_gst(o, out);
        } else if (dec->parsed()) {
            run_decompose(o, out);
        } else if (run->parsed()) {
            run_experiment(o, run->get_subcommands().front()->get_name() == "one-qubit" ? "one-qubit" : "two-qubit-sweep",
                           out);
        } else {
            run_analysis(o, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace uqem

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/lp_oracle.hpp"
#include "support.hpp"
#include "uqem/cli.hpp"
#include "uqem/fidelity.hpp"
#include "uqem/lp.hpp"
#include "uqem/noise.hpp"

using namespace uqem;
using std::numbers::pi;

namespace {

constexpr double kUnbiasTol = 1e-9;
constexpr double kGstTol = 1e-10;
constexpr double kOracleTol = 1e-8;
constexpr double kDiagonalTol = 1e-10;
constexpr double kCostSlack = 1e-9;
constexpr double kFidelityTol = 1e-9;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

Outcome unbiasedness() {
    double worst = 0;
    int configs = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const DeviceModel d1 = build_device(testing_support::random_device_config(1000 + seed, 1));
        const auto plan = testing_support::fully_mitigated_one_qubit(d1, MeasurementMode{});
        worst = std::max(worst, std::abs(plan_exact_value(plan, d1) - one_qubit_ideal()));
        ++configs;

        const DeviceModel d2 = build_device(testing_support::random_device_config(2000 + seed, 2));
        const double phi = pi * static_cast<double>(1 + seed % 4) / 4.0;
        const auto dqcp = testing_support::fully_mitigated_dqcp(d2, phi, MeasurementMode{});
        worst = std::max(worst, std::abs(plan_exact_value(dqcp, d2) - dqcp_ideal(phi)));
        ++configs;
    }
    return {worst < kUnbiasTol, fmt("%d configurations, max |mitigated - ideal| = %.3e", configs, worst)};
}

Outcome one_qubit_experiment() {
    ExperimentConfig c;
    c.experiment = "one-qubit";
    c.device = DeviceConfig{1};
    c.device.readout = {ReadoutError{0.035, 0.057}};
    c.device_ref = "readout-only";
    const auto r = run_one_qubit(c);
    const double bias = 0.057 - 0.035;
    const bool raw_ok = std::abs(r.raw.mean - bias) <= 3 * r.raw.se;
    const bool mit_ok = std::abs(r.mitigated.mean) <= 3 * r.mitigated.se;
    return {raw_ok && mit_ok && r.n_samples == kOneQubitShots && r.raw.values.size() == 100,
            fmt("raw %.4f +/- %.4f (target %.3f), mitigated %.4f +/- %.4f (target 0)", r.raw.mean, r.raw.se, bias,
                r.mitigated.mean, r.mitigated.se)};
}

Outcome two_qubit_sweep() {
    ExperimentConfig c;
    c.experiment = "two-qubit-sweep";
    c.phis = {pi / 2};
    const auto r = run_two_qubit_sweep(c).at(0);
    const double raw_err = std::abs(r.raw.mean - 0.5);
    const double mit_err = std::abs(r.mitigated.mean - 0.5);
    const double ratio = raw_err / mit_err;
    const bool ok = ratio >= 5 && mit_err <= 3 * r.mitigated.se && r.n_samples == kTwoQubitShots;
    return {ok, fmt("raw %.4f, mitigated %.4f +/- %.4f, error ratio %.1f", r.raw.mean, r.mitigated.mean, r.mitigated.se,
                    ratio)};
}

Outcome depolarizing() {
    const double delta = depolarizing_analysis(0.993, 0.993, pi / 2).delta;
    const double f = required_fidelity(0.0102, pi / 2);
    return {std::abs(delta - 0.01073) <= 5e-4 && std::abs(f - 0.993) <= 1e-3,
            fmt("delta(0.993, 0.993) = %.5f, F(0.0102) = %.5f", delta, f)};
}

Outcome gst_round_trip() {
    const int q0[] = {0};
    const DeviceModel ideal = build_device(DeviceConfig{1});
    const bool gram_exact = measure_gram(ideal, q0, MeasurementMode{}).matrix == preparation_states_1q();

    double worst_op = 0;
    double worst_b = 0;
    const auto ops = basis_operations_1q();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const DeviceModel d = build_device(testing_support::random_device_config(3000 + seed, 2));
        for (int qubit = 0; qubit < 2; ++qubit) {
            const int q[] = {qubit};
            const auto g = measure_gram(d, q, MeasurementMode{});
            const auto c = characterize_qubit(d, qubit, ops, MeasurementMode{});
            worst_b = std::max(worst_b, max_abs(c.B_hat * preparation_states_1q() - g.matrix));
            for (std::size_t k = 0; k < ops.size(); ++k) {
                // Local map of the op placed on this qubit: the I-block of I (x) M or M (x) I.
                const Matrix full = compile_op(ops[k], d, 2, q).exact;
                const Matrix truth = qubit == 1 ? Matrix(full.topLeftCorner(4, 4))
                                                : Matrix(full(Eigen::seqN(0, 4, 4), Eigen::seqN(0, 4, 4)));
                worst_op = std::max(worst_op, max_abs(c.ops[k].ptm.matrix() - truth));
            }
        }
        const auto c0 = characterize_qubit(d, 0, ops, MeasurementMode{});
        const auto c1 = characterize_qubit(d, 1, ops, MeasurementMode{});
        const auto cz = characterize_two_qubit(d, gate_op(ControlledPhase{pi / 2}), c0.B_hat, c1.B_hat,
                                               MeasurementMode{}, seed);
        worst_op = std::max(worst_op, max_abs(cz.op.ptm.matrix() - d.gate(ControlledPhase{pi / 2}).matrix()));
    }
    return {gram_exact && worst_op < kGstTol && worst_b < kGstTol,
            fmt("ideal Gram == A-hat: %s, max |U-hat - U| = %.3e, max |B-hat A-hat - g| = %.3e",
                gram_exact ? "yes" : "no", worst_op, worst_b)};
}

Outcome decomposition_soundness() {
    std::mt19937_64 gen(77);
    double worst_cost = 0;
    double worst_residual = 0;
    int bases = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const DeviceModel d = build_device(testing_support::random_device_config(4000 + seed, 1));
        const DeviceModel other = build_device(testing_support::random_device_config(5000 + seed, 1));
        const auto ops = basis_operations_1q();
        std::vector<EffectiveOp> basis = characterize_qubit(d, 0, ops, MeasurementMode{}).ops;
        // Extra elements from a second device give nullity 0, 1 or more.
        const auto extra = characterize_qubit(other, 0, ops, MeasurementMode{}).ops;
        const std::size_t n_extra = seed % 4 == 0 ? 0 : seed % 4 == 1 ? 1 : 2 + seed % 5;
        for (std::size_t k = 0; k < n_extra; ++k) basis.push_back(extra[k + 1]);

        const auto target = ideal_ptm(Rotation{static_cast<Pauli>(1 + seed % 3), std::uniform_real_distribution<double>(-pi, pi)(gen)});
        const auto dec = decompose_gate(target, basis);
        const auto ref = oracle::min_l1_reference(basis_system(basis), vectorize_map(target));
        worst_cost = std::max(worst_cost, std::abs(dec.cost - ref.cost));
        worst_residual = std::max(worst_residual, dec.residual);
        ++bases;
    }
    return {worst_cost < kOracleTol && worst_residual < kResidualTol,
            fmt("%d bases, max |cost - oracle| = %.3e, max residual = %.3e", bases, worst_cost, worst_residual)};
}

Outcome twirling() {
    DeviceConfig c;
    c.n_qubits = 2;
    c.readout = {ReadoutError{0.03, 0.05}};
    c.cphase_noise = {noise::Overrotation{PauliString::from_str("XY"), 0.2}, noise::Depolarizing{0.02}};
    const DeviceModel coherent = build_device(c);
    const Matrix ideal = ideal_ptm(ControlledPhase{pi}).matrix();
    const Matrix err = twirl_estimate(coherent.gate(ControlledPhase{pi}), pi, uniform_twirl()).matrix() * ideal.inverse();
    const double off = max_abs(err - Matrix(err.diagonal().asDiagonal()));

    const DeviceModel d = build_device(preset_config(kPaperDevicePreset, 2));
    const auto ops = basis_operations_1q();
    const auto q0 = characterize_qubit(d, 0, ops, MeasurementMode{});
    const auto q1 = characterize_qubit(d, 1, ops, MeasurementMode{});
    const double twirled = build_dqcp_plan(d, pi, q0, q1, uniform_twirl(), MeasurementMode{}).gate.cost;
    const double plain = build_dqcp_plan(d, pi, q0, q1, no_twirl(), MeasurementMode{}).gate.cost;
    return {off < kDiagonalTol && twirled <= plain + kCostSlack,
            fmt("max off-diagonal = %.3e, cost twirled %.6f vs untwirled %.6f", off, twirled, plain)};
}

Outcome fidelity() {
    const auto ideal = ideal_ptm(ControlledPhase{pi});
    const double eps2 = 16.0 * (1.0 - 0.993) / 15.0;
    const double f = process_fidelity(compose(build_channel(noise::Depolarizing{eps2}, 2), ideal), ideal);
    double worst_self = 0;
    const std::vector<GateSpec> gates = {ControlledPhase{pi}, ControlledPhase{0.7}, Rotation{Pauli::X, pi / 2},
                                         Rotation{Pauli::Y, -1.3}, Rotation{Pauli::Z, 2.1}};
    for (const auto& g : gates) worst_self = std::max(worst_self, std::abs(process_fidelity(ideal_ptm(g), ideal_ptm(g)) - 1.0));
    return {std::abs(f - 0.993) <= kFidelityTol && worst_self <= kFidelityTol,
            fmt("F(depolarized C_pi) = %.12f, max |F(U, U) - 1| = %.3e", f, worst_self)};
}

Outcome determinism() {
    const std::vector<std::vector<std::string>> invocations = {
        {"run", "one-qubit", "--quick", "--reps", "5", "--seed", "11"},
        {"run", "two-qubit", "--quick", "--reps", "4", "--seed", "12"},
        {"run", "two-qubit", "--quick", "--reps", "3", "--format", "delimited"},
        {"gst", "--shots", "2000", "--bootstrap", "20", "--seed", "13"},
        {"decompose", "--phi", "pi/2"},
    };
    const int saved = omp_get_max_threads();
    int mismatches = 0;
    int failures = 0;
    for (const auto& args : invocations) {
        std::string first;
        for (int threads : {1, 2, 3, 8, 1}) {
            omp_set_num_threads(threads);
            std::ostringstream out;
            std::ostringstream err;
            if (cli_main(args, out, err) != 0) ++failures;
            if (first.empty()) first = out.str();
            else if (out.str() != first) ++mismatches;
        }
    }
    omp_set_num_threads(saved);
    return {mismatches == 0 && failures == 0,
            fmt("%zu invocations x 5 thread settings, %d mismatches, %d errors", invocations.size(), mismatches,
                failures)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"unbiasedness", unbiasedness},
        {"one-qubit experiment", one_qubit_experiment},
        {"two-qubit sweep", two_qubit_sweep},
        {"depolarizing analysis", depolarizing},
        {"gst round trip", gst_round_trip},
        {"decomposition soundness", decomposition_soundness},
        {"twirling", twirling},
        {"fidelity", fidelity},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}

#include <gtest/gtest.h>

#include <numbers>

#include "uqem/circuit.hpp"
#include "uqem/errors.hpp"
#include "uqem/fidelity.hpp"
#include "uqem/gst.hpp"
#include "uqem/noise.hpp"

using namespace uqem;
using std::numbers::pi;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

DeviceModel readout_device(double e0, double e1, int n = 1) {
    DeviceConfig c;
    c.n_qubits = n;
    c.readout = {ReadoutError{e0, e1}};
    return build_device(c);
}

// True noisy preparation and effect matrices read directly off the device.
Matrix true_A(const DeviceModel& d, int qubit) {
    Matrix a(4, 4);
    for (int k = 0; k < 4; ++k) a.col(k) = d.prep_state(qubit, k).entries();
    return a;
}

Matrix true_B(const DeviceModel& d) {
    Matrix b(4, 4);
    for (std::size_t i = 0; i < 4; ++i) b.row(static_cast<Eigen::Index>(i)) = d.effect(PauliString::from_index(1, i)).entries();
    return b;
}

}  // namespace

TEST(Gram, IdealDeviceIsPreparationMatrix) {
    const DeviceModel d = build_device(DeviceConfig{1});
    const int q[] = {0};
    EXPECT_EQ(measure_gram(d, q, MeasurementMode{}).matrix, preparation_states_1q());
    EXPECT_NEAR(max_abs(estimate_readout(preparation_states_1q()) - Matrix::Identity(4, 4)), 0.0, 1e-12);
}

TEST(Gram, ReadoutErrorRow) {
    const DeviceModel d = readout_device(0.0343, 0.0526);
    const int q[] = {0};
    const Matrix g = measure_gram(d, q, MeasurementMode{}).matrix;
    RowVector z(4);
    z << 0.9314, -0.8948, 0.0183, 0.0183;
    EXPECT_NEAR((g.row(3) - z).norm(), 0.0, 1e-12);
    EXPECT_EQ(g.row(0), RowVector::Ones(4));
    // With ideal preparations the readout estimate is the true effect matrix.
    EXPECT_NEAR(max_abs(estimate_readout(g) - true_B(d)), 0.0, 1e-12);
}

TEST(Transfer, IdealRotationAndReset) {
    const DeviceModel d = build_device(DeviceConfig{1});
    const int q[] = {0};
    const Matrix a = preparation_states_1q();
    const auto xh = gate_op(Rotation{Pauli::X, pi / 2});
    EXPECT_NEAR(max_abs(measure_transfer(d, xh, q, MeasurementMode{}) - xh.ptm.matrix() * a), 0.0, 1e-12);

    const auto reset = measure_reset_map(Pauli::Z, preparation_vectors_1q()[0], "|0>");
    const Matrix t = measure_transfer(d, reset, q, MeasurementMode{});
    RowVector z(4);
    z << 1.0, 0.0, 0.5, 0.5;
    EXPECT_NEAR((t.row(3) - z).norm(), 0.0, 1e-12);
    EXPECT_NEAR((t.row(0) - z).norm(), 0.0, 1e-12);
}

TEST(Inversion, RecoversNoisyGateUnderReadoutError) {
    DeviceConfig c;
    c.n_qubits = 1;
    c.readout = {ReadoutError{0.04, 0.06}};
    c.single_qubit_noise = {noise::Overrotation{PauliString::from_str("X"), 0.05}, noise::AmplitudeDamping{0.02}};
    const DeviceModel d = build_device(c);
    const int q[] = {0};
    const auto g = measure_gram(d, q, MeasurementMode{});
    const auto yh = gate_op(Rotation{Pauli::Y, pi / 2});
    const auto est = linear_inversion(g, {{"Y", measure_transfer(d, yh, q, MeasurementMode{})}});
    EXPECT_EQ(est.A_hat, preparation_states_1q());
    EXPECT_NEAR(max_abs(est.U_hat.at("Y").matrix() - d.gate(Rotation{Pauli::Y, pi / 2}).matrix()), 0.0, 1e-12);
}

TEST(Inversion, SingularGramIsRejected) {
    Matrix g = preparation_states_1q();
    g.row(2).setZero();
    try {
        estimate_readout(g);
        FAIL() << "expected InversionError";
    } catch (const InversionError& e) {
        EXPECT_GE(e.condition_number(), kMaxConditionNumber);
    }
    EXPECT_THROW(estimate_gate(Matrix::Zero(4, 4), Matrix::Identity(4, 4)), InversionError);
    EXPECT_THROW(estimate_readout(Matrix::Identity(3, 3)), ValidationError);
}

TEST(Inversion, TwoQubitDepolarizedControlledPhase) {
    DeviceConfig c;
    c.n_qubits = 2;
    c.readout = {ReadoutError{0.03, 0.05}, ReadoutError{0.02, 0.07}};
    c.cphase_noise = {noise::Depolarizing{0.08}};
    const DeviceModel d = build_device(c);
    const auto ops = basis_operations_1q();
    const auto q0 = characterize_qubit(d, 0, ops, MeasurementMode{});
    const auto q1 = characterize_qubit(d, 1, ops, MeasurementMode{});
    const auto cz = characterize_two_qubit(d, gate_op(ControlledPhase{pi}), q0.B_hat, q1.B_hat, MeasurementMode{}, 9);
    EXPECT_EQ(cz.B_hat, kron(q0.B_hat, q1.B_hat));
    const Matrix want = compose(build_channel(noise::Depolarizing{0.08}, 2), ideal_ptm(ControlledPhase{pi})).matrix();
    EXPECT_NEAR(max_abs(cz.op.ptm.matrix() - want), 0.0, 1e-10);
    EXPECT_NEAR(process_fidelity(cz.op.ptm, ideal_ptm(ControlledPhase{pi})), 1.0 - 0.08 * 15.0 / 16.0, 1e-10);
}

TEST(Inversion, InstrumentOpsMatchCompiledNoisyMaps) {
    const DeviceModel d = build_device(preset_config(kPaperDevicePreset, 1));
    const auto ops = basis_operations_1q();
    const auto c = characterize_qubit(d, 0, ops, MeasurementMode{});
    for (std::size_t k = 0; k < ops.size(); ++k) {
        const Matrix truth = compile_op(ops[k], d, 1).exact;
        EXPECT_NEAR(max_abs(c.ops[k].ptm.matrix() - truth), 0.0, 1e-10) << ops[k].label;
    }
}

TEST(Inversion, PreparationErrorGivesGaugeEquivalentEstimate) {
    // With noisy preparations the estimate is a similarity transform of the
    // true map, and predicted measurement statistics are unchanged.
    DeviceConfig c;
    c.n_qubits = 1;
    c.readout = {ReadoutError{0.03, 0.05}};
    c.prep_noise = {noise::AmplitudeDamping{0.05}, noise::Dephasing{0.02}};
    c.single_qubit_noise = {noise::Depolarizing{0.03}};
    const DeviceModel d = build_device(c);
    const int q[] = {0};
    const auto op = gate_op(Rotation{Pauli::X, pi / 2});
    const auto est = linear_inversion(measure_gram(d, q, MeasurementMode{}),
                                      {{"X", measure_transfer(d, op, q, MeasurementMode{})}});
    const Matrix a = true_A(d, 0);
    const Matrix b = true_B(d);
    const Matrix u = d.gate(Rotation{Pauli::X, pi / 2}).matrix();
    const Matrix s = preparation_states_1q() * a.inverse();
    const Matrix u_hat = est.U_hat.at("X").matrix();
    EXPECT_NEAR(max_abs(u_hat - s * u * s.inverse()), 0.0, 1e-10);
    EXPECT_GT(max_abs(u_hat - u), 1e-3);
    const Matrix a_hat = preparation_states_1q();
    for (int power = 1; power <= 4; ++power) {
        Matrix uk = Matrix::Identity(4, 4);
        Matrix uk_hat = Matrix::Identity(4, 4);
        for (int p = 0; p < power; ++p) {
            uk = u * uk;
            uk_hat = u_hat * uk_hat;
        }
        EXPECT_NEAR(max_abs(est.B_hat * uk_hat * a_hat - b * uk * a), 0.0, 1e-10);
    }
}

TEST(ShotMode, ConcentratesAroundExactValues) {
    const DeviceModel d = build_device(preset_config(kPaperDevicePreset, 1));
    const int q[] = {0};
    const auto op = basis_operations_1q()[12];
    const Matrix exact = measure_transfer(d, op, q, MeasurementMode{});
    const MeasurementMode mode{20000, 77};
    const auto data = measure_tomography(d, &op, q, mode, 3);
    ASSERT_TRUE(data.sampled());
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            const auto& c = data.counts[static_cast<std::size_t>(i * 4 + j)];
            EXPECT_EQ(c.total(), 20000);
            const double m = c.mean();
            const double var = (static_cast<double>(c.plus + c.minus) / 20000.0 - m * m);
            const double se = std::sqrt(std::max(var, 1e-8) / 20000.0);
            EXPECT_NEAR(data.values(i, j), exact(i, j), 5.0 * se + 1e-12) << i << "," << j;
        }
    }
}

TEST(ShotMode, SeedsAndStreamsAreReproducible) {
    const DeviceModel d = build_device(preset_config(kPaperDevicePreset, 2));
    const int q[] = {1};
    const MeasurementMode mode{500, 5};
    const auto a = measure_tomography(d, nullptr, q, mode, 1).values;
    EXPECT_EQ(a, measure_tomography(d, nullptr, q, mode, 1).values);
    EXPECT_NE(a, measure_tomography(d, nullptr, q, mode, 2).values);
    EXPECT_NE(a, measure_tomography(d, nullptr, q, MeasurementMode{500, 6}, 1).values);
}

TEST(Bootstrap, StandardErrorShrinksWithShots) {
    const DeviceModel d = build_device(preset_config(kPaperDevicePreset, 1));
    const auto ops = std::vector<EffectiveOp>{gate_op(Rotation{Pauli::X, pi / 2})};
    const auto ideal = ideal_ptm(Rotation{Pauli::X, pi / 2});
    auto se_at = [&](std::int64_t shots) {
        const auto c = characterize_qubit(d, 0, ops, MeasurementMode{shots, 11});
        const auto se = bootstrap_fidelity_se({&c.gram}, c.transfers[0], ideal, 200, 4);
        EXPECT_TRUE(se.has_value());
        EXPECT_EQ(*se, *bootstrap_fidelity_se({&c.gram}, c.transfers[0], ideal, 200, 4));
        return *se;
    };
    const double coarse = se_at(1000);
    const double fine = se_at(16000);
    EXPECT_GT(coarse, 0.0);
    EXPECT_GT(coarse / fine, 2.0);
    EXPECT_LT(coarse / fine, 8.0);

    const auto exact = characterize_qubit(d, 0, ops, MeasurementMode{});
    EXPECT_FALSE(bootstrap_fidelity_se({&exact.gram}, exact.transfers[0], ideal, 200, 4).has_value());
}

TEST(Report, ContainsEveryOpAndPhase) {
    const DeviceModel d = build_device(preset_config(kPaperDevicePreset, 2));
    const auto doc = gate_set_report(d, {pi / 2, pi}, MeasurementMode{}, 0);
    ASSERT_EQ(doc["qubits"].size(), 2u);
    EXPECT_EQ(doc["qubits"][0]["ops"].size(), 16u);
    ASSERT_EQ(doc["two_qubit"].size(), 2u);
    EXPECT_NEAR(doc["two_qubit"][1]["fidelity"].get<double>(), 0.915, 1e-9);
    EXPECT_FALSE(doc["two_qubit"][0].contains("fidelity_se"));
    EXPECT_EQ(doc["qubits"][0]["gram"].size(), 4u);
}

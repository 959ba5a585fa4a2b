#include <gtest/gtest.h>

#include <numbers>

#include "oracles/density_oracle.hpp"
#include "uqem/circuit.hpp"
#include "uqem/errors.hpp"
#include "uqem/experiments.hpp"
#include "uqem/noise.hpp"
#include "uqem/twirl.hpp"

using namespace uqem;
using std::numbers::pi;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

CMatrix cphase_oracle(double phi) {
    CMatrix c = CMatrix::Identity(4, 4);
    c(3, 3) = std::polar(1.0, phi);
    return c;
}

DeviceModel overrotated_device(const std::string& axis, double dtheta) {
    DeviceConfig c;
    c.n_qubits = 2;
    c.readout = {ReadoutError{0.03, 0.05}};
    c.cphase_noise = {noise::Overrotation{PauliString::from_str(axis), dtheta}, noise::Depolarizing{0.02}};
    return build_device(c);
}

}  // namespace

TEST(PauliRecovery, ControlledZExamples) {
    const auto xi = pauli_recovery(pi, Pauli::X, Pauli::I);
    ASSERT_TRUE(xi.has_value());
    EXPECT_EQ(xi->recovery.str(), "XZ");
    EXPECT_NEAR(std::abs(xi->eta - Complex(1.0, 0.0)), 0.0, 1e-12);
    const auto yy = pauli_recovery(pi, Pauli::Y, Pauli::Y);
    ASSERT_TRUE(yy.has_value());
    EXPECT_EQ(yy->recovery.str(), "XX");
    const auto zz = pauli_recovery(pi, Pauli::Z, Pauli::Z);
    ASSERT_TRUE(zz.has_value());
    EXPECT_EQ(zz->recovery.str(), "ZZ");
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) EXPECT_TRUE(pauli_recovery(pi, static_cast<Pauli>(a), static_cast<Pauli>(b)));
    }
}

TEST(PauliRecovery, GenericPhaseOnlyRecoversDiagonalInputs) {
    for (double phi : {pi / 4, pi / 2, 3 * pi / 4, 0.37}) {
        int found = 0;
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                const auto r = pauli_recovery(phi, static_cast<Pauli>(a), static_cast<Pauli>(b));
                const bool diagonal = (a == 0 || a == 3) && (b == 0 || b == 3);
                EXPECT_EQ(r.has_value(), diagonal) << phi << " " << a << b;
                if (r) {
                    ++found;
                    EXPECT_EQ(r->recovery, r->input);
                }
            }
        }
        EXPECT_EQ(found, 4);
    }
}

TEST(PauliRecovery, EtaSatisfiesDefiningIdentity) {
    // (c (x) d) C (a (x) b) = eta C, checked with independently built matrices.
    for (double phi : {pi, pi / 2, 0.9, -pi / 3, 3 * pi}) {
        const CMatrix c = cphase_oracle(phi);
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                const auto r = pauli_recovery(phi, static_cast<Pauli>(a), static_cast<Pauli>(b));
                if (!r) continue;
                EXPECT_NEAR(std::abs(r->eta), 1.0, 1e-12);
                const CMatrix lhs = oracle::pauli(r->recovery.str()) * c * oracle::pauli(r->input.str());
                EXPECT_NEAR((lhs - r->eta * c).cwiseAbs().maxCoeff(), 0.0, 1e-12) << phi;
            }
        }
    }
}

TEST(TwirlDistributions, Shapes) {
    double total = 0;
    for (double w : uniform_twirl()) total += w;
    EXPECT_NEAR(total, 1.0, 1e-15);
    EXPECT_EQ(diagonal_twirl()[15], 0.25);
    EXPECT_EQ(diagonal_twirl()[1], 0.0);
    EXPECT_EQ(default_twirl(pi), uniform_twirl());
    EXPECT_EQ(default_twirl(-pi), uniform_twirl());
    EXPECT_EQ(default_twirl(pi / 2), diagonal_twirl());
    EXPECT_EQ(no_twirl()[0], 1.0);
}

TEST(TwirlEstimate, IdealAndValidation) {
    for (double phi : {pi / 4, pi}) {
        const auto c = ideal_ptm(ControlledPhase{phi});
        EXPECT_NEAR(max_abs(twirl_estimate(c, phi, default_twirl(phi)).matrix() - c.matrix()), 0.0, 1e-12);
        EXPECT_NEAR(max_abs(make_twirled_gate(phi, default_twirl(phi)).ptm.matrix() - c.matrix()), 0.0, 1e-12);
    }
    EXPECT_THROW(twirl_estimate(ideal_ptm(ControlledPhase{pi / 2}), pi / 2, uniform_twirl()), ValidationError);
    TwirlDistribution bad = diagonal_twirl();
    bad[0] = 0.5;
    EXPECT_THROW(twirl_estimate(ideal_ptm(ControlledPhase{pi / 2}), pi / 2, bad), ValidationError);
    EXPECT_THROW(twirl_estimate(PtmMap::identity(1), pi, uniform_twirl()), ValidationError);
}

TEST(TwirlEstimate, DepolarizingNoiseIsInvariant) {
    const auto noisy = compose(build_channel(noise::Depolarizing{0.08}, 2), ideal_ptm(ControlledPhase{pi}));
    EXPECT_NEAR(max_abs(twirl_estimate(noisy, pi, uniform_twirl()).matrix() - noisy.matrix()), 0.0, 1e-12);
}

TEST(TwirlEstimate, UniformTwirlLeavesPauliChannel) {
    const DeviceModel d = overrotated_device("XY", 0.2);
    const PtmMap noisy = d.gate(ControlledPhase{pi});
    const Matrix ideal = ideal_ptm(ControlledPhase{pi}).matrix();
    const Matrix before = ideal.transpose() * noisy.matrix();
    const Matrix after = ideal.transpose() * twirl_estimate(noisy, pi, uniform_twirl()).matrix();
    const Matrix off = after - Matrix(after.diagonal().asDiagonal());
    EXPECT_GT(max_abs(before - Matrix(before.diagonal().asDiagonal())), 1e-2);
    EXPECT_NEAR(max_abs(off), 0.0, 1e-12);
    EXPECT_NEAR(max_abs(after.diagonal() - before.diagonal()), 0.0, 1e-12);
}

TEST(TwirlEstimate, DiagonalTwirlCommutesWithZFrame) {
    const DeviceModel d = overrotated_device("X", 0.15);
    const double phi = pi / 2;
    const Matrix ideal = ideal_ptm(ControlledPhase{phi}).matrix();
    const Matrix err = ideal.transpose() * twirl_estimate(d.gate(ControlledPhase{phi}), phi, diagonal_twirl()).matrix();
    for (const char* z : {"IZ", "ZI", "ZZ"}) {
        const Matrix p = ideal_ptm(PauliGate{PauliString::from_str(z)}).matrix();
        EXPECT_NEAR(max_abs(p * err - err * p), 0.0, 1e-12) << z;
    }
}

TEST(TwirledGate, RealizationMatchesTwirlEstimate) {
    const DeviceModel d = overrotated_device("ZX", 0.1);
    for (double phi : {pi / 2, pi}) {
        const auto op = make_twirled_gate(phi, default_twirl(phi));
        const Matrix compiled = compile_op(op, d, 2).exact;
        const Matrix want = twirl_estimate(d.gate(ControlledPhase{phi}), phi, default_twirl(phi)).matrix();
        EXPECT_NEAR(max_abs(compiled - want), 0.0, 1e-12);
    }
}

TEST(TwirledGate, ReducesCostUnderCoherentError) {
    const DeviceModel d = overrotated_device("XY", 0.2);
    const auto ops = basis_operations_1q();
    const auto q0 = characterize_qubit(d, 0, ops, MeasurementMode{});
    const auto q1 = characterize_qubit(d, 1, ops, MeasurementMode{});
    const auto twirled = build_dqcp_plan(d, pi, q0, q1, uniform_twirl(), MeasurementMode{});
    const auto plain = build_dqcp_plan(d, pi, q0, q1, no_twirl(), MeasurementMode{});
    EXPECT_LT(twirled.gate.cost, plain.gate.cost - 1e-3);
}

TEST(TwirledGate, DepolarizingNoiseGivesEqualCost) {
    const DeviceModel d = build_device(preset_config(kPaperDevicePreset, 2));
    const auto ops = basis_operations_1q();
    const auto q0 = characterize_qubit(d, 0, ops, MeasurementMode{});
    const auto q1 = characterize_qubit(d, 1, ops, MeasurementMode{});
    const auto twirled = build_dqcp_plan(d, pi, q0, q1, uniform_twirl(), MeasurementMode{});
    const auto plain = build_dqcp_plan(d, pi, q0, q1, no_twirl(), MeasurementMode{});
    EXPECT_NEAR(twirled.gate.cost, plain.gate.cost, 1e-9);
}

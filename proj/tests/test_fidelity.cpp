#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles/density_oracle.hpp"
#include "uqem/errors.hpp"
#include "uqem/fidelity.hpp"
#include "uqem/gates.hpp"
#include "uqem/noise.hpp"

using namespace uqem;
using std::numbers::pi;

TEST(ProcessFidelity, DepolarizedControlledPhase) {
    const auto ideal = ideal_ptm(ControlledPhase{pi});
    const auto noisy = compose(build_channel(noise::Depolarizing{0.007467}, 2), ideal);
    EXPECT_NEAR(process_fidelity(noisy, ideal), 0.993, 1e-5);
    EXPECT_NEAR(process_fidelity(ideal, ideal), 1.0, 1e-12);
    const auto exact = compose(build_channel(noise::DepolarizingFidelity{0.993}, 2), ideal);
    EXPECT_NEAR(process_fidelity(exact, ideal), 0.993, 1e-12);
}

TEST(ProcessFidelity, UnitaryOverlap) {
    // For unitaries the fidelity is |Tr(U^dagger V)|^2 / d^2.
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = trial % 2 == 0 ? 2 : 4;
        const CMatrix u = oracle::random_unitary(dim, gen);
        const CMatrix v = oracle::random_unitary(dim, gen);
        const double want = std::norm((u.adjoint() * v).trace()) / (dim * dim);
        EXPECT_NEAR(process_fidelity(ptm_of_unitary(u), ptm_of_unitary(v)), want, 1e-10);
    }
}

TEST(ProcessFidelity, ChiMatchesKrausOracle) {
    std::mt19937_64 gen(32);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 1 + trial % 2;
        const auto ks = oracle::random_channel(1 << n, 3, gen);
        const CMatrix chi = ptm_to_chi(ptm_of_kraus(ks));
        EXPECT_NEAR((chi - oracle::chi_from_kraus(ks, n)).cwiseAbs().maxCoeff(), 0.0, 1e-10);

        const auto ls = oracle::random_channel(1 << n, 2, gen);
        EXPECT_NEAR(process_fidelity(ptm_of_kraus(ks), ptm_of_kraus(ls)),
                    oracle::chi_fidelity(oracle::chi_from_kraus(ks, n), oracle::chi_from_kraus(ls, n)), 1e-10);
    }
}

TEST(ProcessFidelity, TraceDecreasingMap) {
    // Projector branch of a Z measurement: chi has trace 1/2.
    const std::vector<CMatrix> proj = {(oracle::pauli1('I') + oracle::pauli1('Z')) / 2.0};
    const auto m = ptm_of_kraus(proj);
    EXPECT_NEAR(ptm_to_chi(m).trace().real(), 0.5, 1e-12);
    EXPECT_NEAR(process_fidelity(m, PtmMap::identity(1)), 0.5, 1e-12);
    EXPECT_THROW(process_fidelity(PtmMap(1, Matrix::Zero(4, 4)), PtmMap::identity(1)), NumericalError);
}

#include "uqem/twirl.hpp"

#include <cmath>
#include <numbers>

#include "uqem/errors.hpp"

namespace uqem {

namespace {

constexpr double kRecoveryTol = 1e-9;

PauliString pair(Pauli a, Pauli b) { return PauliString({a, b}); }

void check_distribution(const TwirlDistribution& p) {
    double total = 0.0;
    for (double w : p) {
        if (!(w >= 0.0)) throw ValidationError("twirl distribution has a negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > kValidationTol) {
        throw ValidationError("twirl distribution does not sum to one");
    }
}

std::vector<TwirlVariant> variants_for(double phi, const TwirlDistribution& p) {
    check_distribution(p);
    std::vector<TwirlVariant> out;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const double w = p[static_cast<std::size_t>(4 * a + b)];
            if (w == 0.0) continue;
            const auto rec = pauli_recovery(phi, static_cast<Pauli>(a), static_cast<Pauli>(b));
            if (!rec) {
                throw ValidationError("twirl distribution puts weight on " + pair(static_cast<Pauli>(a), static_cast<Pauli>(b)).str() +
                                      ", which has no Pauli recovery at this phase");
            }
            out.push_back(TwirlVariant{w, rec->input, rec->recovery});
        }
    }
    return out;
}

std::string twirl_label(double phi) { return gate_label(ControlledPhase{phi}) + ",twirled"; }

}  // namespace

std::optional<PauliRecovery> pauli_recovery(double phi, Pauli a, Pauli b) {
    const CMatrix c = gate_unitary(ControlledPhase{phi});
    const PauliString in = pair(a, b);
    const CMatrix v = c * pauli_matrix(in) * c.adjoint();
    for (std::size_t idx = 0; idx < 16; ++idx) {
        const PauliString cand = PauliString::from_index(2, idx);
        const CMatrix s = pauli_matrix(cand);
        const Complex lambda = (s * v).trace() / 4.0;
        if (std::abs(std::abs(lambda) - 1.0) < kRecoveryTol) {
            // v = lambda s, so s C (a (x) b) = lambda s s C = lambda C.
            return PauliRecovery{in, cand, lambda};
        }
    }
    return std::nullopt;
}

TwirlDistribution uniform_twirl() {
    TwirlDistribution p;
    p.fill(1.0 / 16.0);
    return p;
}

TwirlDistribution diagonal_twirl() {
    TwirlDistribution p{};
    for (int a : {0, 3}) {
        for (int b : {0, 3}) p[static_cast<std::size_t>(4 * a + b)] = 0.25;
    }
    return p;
}

TwirlDistribution no_twirl() {
    TwirlDistribution p{};
    p[0] = 1.0;
    return p;
}

TwirlDistribution default_twirl(double phi) {
    const double r = std::remainder(phi - std::numbers::pi, 2.0 * std::numbers::pi);
    return std::abs(r) < 1e-9 ? uniform_twirl() : diagonal_twirl();
}

PtmMap twirl_estimate(const PtmMap& U_hat, double phi, const TwirlDistribution& p) {
    if (U_hat.n_qubits() != 2) throw ValidationError("twirl_estimate: expects a two-qubit map");
    Matrix acc = Matrix::Zero(16, 16);
    for (const auto& v : variants_for(phi, p)) {
        const Matrix before = ideal_ptm(PauliGate{v.before}).matrix();
        const Matrix after = ideal_ptm(PauliGate{v.after}).matrix();
        acc += v.probability * (after * U_hat.matrix() * before);
    }
    return PtmMap(2, acc);
}

EffectiveOp make_twirled_gate(double phi, const TwirlDistribution& p, const PtmMap& ptm) {
    EffectiveOp op;
    op.label = twirl_label(phi);
    op.ptm = ptm;
    op.realization.emplace_back(TwirledGateStep{ControlledPhase{phi}, variants_for(phi, p)});
    return op;
}

EffectiveOp make_twirled_gate(double phi, const TwirlDistribution& p) {
    return make_twirled_gate(phi, p, twirl_estimate(ideal_ptm(ControlledPhase{phi}), phi, p));
}

}  // namespace uqem

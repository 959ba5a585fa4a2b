#include "uqem/noise.hpp"

#include <cmath>
#include <sstream>

#include "uqem/errors.hpp"

namespace uqem {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_unit_interval(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << what << " must lie in [0, 1], got " << v;
        throw ValidationError(os.str());
    }
}

PtmMap depolarizing(double epsilon, int n) {
    const auto dim = static_cast<Eigen::Index>(pauli_dim(n));
    Matrix m = Matrix::Identity(dim, dim) * (1.0 - epsilon);
    m(0, 0) = 1.0;
    return PtmMap(n, std::move(m));
}

PtmMap on_each_qubit(const PtmMap& single, int n) {
    PtmMap out = single;
    for (int q = 1; q < n; ++q) {
        out = tensor(out, single);
    }
    return out;
}

PtmMap dephasing_1q(double p) {
    Matrix m = Matrix::Identity(4, 4);
    m(1, 1) = 1.0 - 2.0 * p;
    m(2, 2) = 1.0 - 2.0 * p;
    return PtmMap(1, std::move(m));
}

PtmMap amplitude_damping_1q(double gamma) {
    CMatrix k0 = CMatrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - gamma);
    CMatrix k1 = CMatrix::Zero(2, 2);
    k1(0, 1) = std::sqrt(gamma);
    const CMatrix ops[] = {k0, k1};
    return ptm_of_kraus(ops);
}

PtmMap overrotation(const noise::Overrotation& o, int n) {
    const Complex i{0.0, 1.0};
    auto rot = [&](const PauliString& axis) {
        const auto d = static_cast<Eigen::Index>(hilbert_dim(axis.n_qubits()));
        const CMatrix u = std::cos(o.dtheta / 2) * CMatrix::Identity(d, d) - i * std::sin(o.dtheta / 2) * pauli_matrix(axis);
        return ptm_of_unitary(u);
    };
    if (o.axis.n_qubits() == n) {
        return rot(o.axis);
    }
    if (o.axis.n_qubits() == 1) {
        return on_each_qubit(rot(o.axis), n);
    }
    throw ValidationError("overrotation axis '" + o.axis.str() + "' does not match a " + std::to_string(n) +
                          "-qubit operation");
}

}  // namespace

double depolarizing_epsilon_for_fidelity(double fidelity, int n_qubits) {
    const double d2 = static_cast<double>(pauli_dim(n_qubits));
    return d2 * (1.0 - fidelity) / (d2 - 1.0);
}

void validate(const NoiseSpec& spec) {
    std::visit(overloaded{
                   [](const noise::None&) {},
                   [](const noise::Depolarizing& d) { require_unit_interval(d.epsilon, "depolarizing epsilon"); },
                   [](const noise::DepolarizingFidelity& d) { require_unit_interval(d.fidelity, "fidelity"); },
                   [](const noise::Dephasing& d) { require_unit_interval(d.p, "dephasing probability"); },
                   [](const noise::AmplitudeDamping& a) { require_unit_interval(a.gamma, "damping gamma"); },
                   [](const noise::Overrotation& o) {
                       if (!std::isfinite(o.dtheta)) throw ValidationError("overrotation angle is not finite");
                       if (o.axis.is_identity()) throw ValidationError("overrotation axis must not be the identity");
                   },
               },
               spec);
}

void validate(const ReadoutError& readout) {
    require_unit_interval(readout.e0, "readout e0");
    require_unit_interval(readout.e1, "readout e1");
}

PtmMap build_channel(const NoiseSpec& spec, int n_qubits) {
    validate(spec);
    return std::visit(
        overloaded{
            [&](const noise::None&) { return PtmMap::identity(n_qubits); },
            [&](const noise::Depolarizing& d) { return depolarizing(d.epsilon, n_qubits); },
            [&](const noise::DepolarizingFidelity& d) {
                const double eps = depolarizing_epsilon_for_fidelity(d.fidelity, n_qubits);
                require_unit_interval(eps, "depolarizing epsilon derived from fidelity");
                return depolarizing(eps, n_qubits);
            },
            [&](const noise::Dephasing& d) { return on_each_qubit(dephasing_1q(d.p), n_qubits); },
            [&](const noise::AmplitudeDamping& a) { return on_each_qubit(amplitude_damping_1q(a.gamma), n_qubits); },
            [&](const noise::Overrotation& o) { return overrotation(o, n_qubits); },
        },
        spec);
}

PtmMap build_channel(const NoiseChain& chain, int n_qubits) {
    PtmMap out = PtmMap::identity(n_qubits);
    for (const auto& spec : chain) {
        out = compose(build_channel(spec, n_qubits), out);
    }
    return out;
}

PtmObservable noisy_pauli_effect(Pauli p, const ReadoutError& readout) {
    validate(readout);
    RowVector e = RowVector::Zero(4);
    if (p == Pauli::I) {
        e[0] = 1.0;
    } else {
        e[0] = readout.e1 - readout.e0;
        e[static_cast<int>(p)] = 1.0 - readout.e0 - readout.e1;
    }
    return PtmObservable(1, std::move(e));
}

PtmObservable noisy_projector_effect(Pauli p, const ReadoutError& readout) {
    validate(readout);
    if (p == Pauli::I) {
        throw ValidationError("noisy_projector_effect: axis must be X, Y or Z");
    }
    // Outcome 1 is recorded with probability 1-e0 on the +1 eigenspace and e1
    // on the -1 eigenspace (Z readout after an ideal basis change).
    RowVector e = RowVector::Zero(4);
    e[0] = 0.5 * ((1.0 - readout.e0) + readout.e1);
    e[static_cast<int>(p)] = 0.5 * ((1.0 - readout.e0) - readout.e1);
    return PtmObservable(1, std::move(e));
}

std::string describe(const NoiseSpec& spec) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const noise::None&) { os << "none"; },
                   [&](const noise::Depolarizing& d) { os << "depolarizing(" << d.epsilon << ")"; },
                   [&](const noise::DepolarizingFidelity& d) { os << "fidelity(" << d.fidelity << ")"; },
                   [&](const noise::Dephasing& d) { os << "dephasing(" << d.p << ")"; },
                   [&](const noise::AmplitudeDamping& a) { os << "amplitude_damping(" << a.gamma << ")"; },
                   [&](const noise::Overrotation& o) { os << "overrotation(" << o.axis.str() << "," << o.dtheta << ")"; },
               },
               spec);
    return os.str();
}

}  // namespace uqem

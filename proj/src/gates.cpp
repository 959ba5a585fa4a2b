#include "uqem/gates.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "uqem/errors.hpp"

namespace uqem {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string fmt_angle(double theta) {
    const double unit = theta / std::numbers::pi;
    if (std::abs(unit - std::round(unit)) < 1e-12) {
        const long k = std::lround(unit);
        if (k == 1) return "pi";
        if (k == -1) return "-pi";
        return std::to_string(k) + "pi";
    }
    const double twice = 2 * unit;
    if (std::abs(twice - std::round(twice)) < 1e-12) {
        const long k = std::lround(twice);
        return (k == 1 ? std::string("pi") : k == -1 ? std::string("-pi") : std::to_string(k) + "pi") + "/2";
    }
    const double quad = 4 * unit;
    if (std::abs(quad - std::round(quad)) < 1e-12) {
        const long k = std::lround(quad);
        return (k == 1 ? std::string("pi") : k == -1 ? std::string("-pi") : std::to_string(k) + "pi") + "/4";
    }
    return std::to_string(theta);
}

EffectiveOp rotation_chain(std::string label, std::vector<Rotation> chain) {
    PtmMap m = PtmMap::identity(1);
    std::vector<RecipeStep> steps;
    for (const auto& r : chain) {
        m = compose(ideal_ptm(r), m);
        steps.emplace_back(GateStep{r, {0}});
    }
    return EffectiveOp{std::move(label), std::move(m), std::move(steps)};
}

RowVector projector_row(Pauli axis, double sign) {
    RowVector row = RowVector::Zero(4);
    row[0] = 0.5;
    row[static_cast<int>(axis)] += 0.5 * sign;
    return row;
}

CVector ket(Complex a, Complex b) {
    CVector v(2);
    v << a, b;
    return v;
}

std::vector<RecipeStep> shifted(const std::vector<RecipeStep>& steps, int offset) {
    std::vector<RecipeStep> out;
    out.reserve(steps.size());
    for (const auto& step : steps) {
        out.push_back(std::visit(
            overloaded{
                [&](const GateStep& g) -> RecipeStep {
                    GateStep copy = g;
                    for (auto& q : copy.qubits) q += offset;
                    return copy;
                },
                [&](const InstrumentStep& s) -> RecipeStep {
                    InstrumentStep copy = s;
                    copy.qubit += offset;
                    return copy;
                },
                [&](const TwirledGateStep&) -> RecipeStep {
                    throw ValidationError("tensor_op: two-qubit twirled gates cannot be tensored");
                },
            },
            step));
    }
    return out;
}

}  // namespace

int gate_qubits(const GateSpec& g) {
    return std::visit(overloaded{
                          [](const Identity& i) { return i.n_qubits; },
                          [](const Rotation&) { return 1; },
                          [](const ControlledPhase&) { return 2; },
                          [](const PauliGate& p) { return p.pauli.n_qubits(); },
                      },
                      g);
}

CMatrix gate_unitary(const GateSpec& g) {
    const Complex i{0.0, 1.0};
    return std::visit(overloaded{
                          [](const Identity& id) -> CMatrix {
                              const auto d = static_cast<Eigen::Index>(hilbert_dim(id.n_qubits));
                              return CMatrix::Identity(d, d);
                          },
                          [&](const Rotation& r) -> CMatrix {
                              return std::cos(r.angle / 2) * CMatrix::Identity(2, 2) -
                                     i * std::sin(r.angle / 2) * pauli_matrix(r.axis);
                          },
                          [&](const ControlledPhase& c) -> CMatrix {
                              CMatrix u = CMatrix::Identity(4, 4);
                              u(3, 3) = std::exp(i * c.phi);
                              return u;
                          },
                          [](const PauliGate& p) -> CMatrix { return pauli_matrix(p.pauli); },
                      },
                      g);
}

PtmMap ideal_ptm(const GateSpec& g) { return ptm_of_unitary(gate_unitary(g)); }

std::string gate_label(const GateSpec& g) {
    return std::visit(overloaded{
                          [](const Identity&) { return std::string("I"); },
                          [](const Rotation& r) { return std::string(1, pauli_char(r.axis)) + "_" + fmt_angle(r.angle); },
                          [](const ControlledPhase& c) { return "C_" + fmt_angle(c.phi); },
                          [](const PauliGate& p) { return p.pauli.str(); },
                      },
                      g);
}

bool is_completely_positive(const PtmMap& m, double tol) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(choi_of_ptm(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

Instrument::Instrument(std::vector<Branch> branches) : branches_(std::move(branches)) {
    if (branches_.empty()) {
        throw ValidationError("Instrument: no branches");
    }
    const int n = branches_.front().map.n_qubits();
    Matrix total = Matrix::Zero(branches_.front().map.matrix().rows(), branches_.front().map.matrix().cols());
    for (const auto& b : branches_) {
        if (b.map.n_qubits() != n) {
            throw ValidationError("Instrument: branch qubit counts differ");
        }
        if (!is_completely_positive(b.map)) {
            throw ValidationError("Instrument: branch map is not completely positive");
        }
        total += b.map.matrix();
    }
    if (!PtmMap(n, total).is_trace_preserving()) {
        throw ValidationError("Instrument: branches do not sum to a trace-preserving map");
    }
}

Instrument Instrument::unchecked(std::vector<Branch> branches) {
    Instrument out;
    out.branches_ = std::move(branches);
    return out;
}

PtmMap Instrument::effective_map() const {
    Matrix total = Matrix::Zero(branches_.front().map.matrix().rows(), branches_.front().map.matrix().cols());
    for (const auto& b : branches_) {
        total += b.outcome * b.map.matrix();
    }
    return PtmMap(n_qubits(), std::move(total));
}

Instrument ideal_instrument(const MeasureReset& mr) {
    if (mr.axis == Pauli::I) {
        throw ValidationError("MeasureReset: axis must be X, Y or Z");
    }
    const Vector target = pure_state(mr.psi).entries();
    const Matrix plus = target * projector_row(mr.axis, +1.0);
    const Matrix minus = target * projector_row(mr.axis, -1.0);
    return Instrument({Branch{0.0, PtmMap(1, minus)}, Branch{1.0, PtmMap(1, plus)}});
}

EffectiveOp gate_op(const GateSpec& g) {
    std::vector<int> qubits(static_cast<std::size_t>(gate_qubits(g)));
    for (std::size_t q = 0; q < qubits.size(); ++q) qubits[q] = static_cast<int>(q);
    return EffectiveOp{gate_label(g), ideal_ptm(g), {GateStep{g, std::move(qubits)}}};
}

EffectiveOp measure_reset_map(Pauli axis, const CVector& psi, std::string psi_label) {
    if (psi.size() != 2) {
        throw ValidationError("measure_reset_map: reset target must be a single-qubit state");
    }
    MeasureReset mr{axis, psi, std::move(psi_label)};
    const Instrument inst = ideal_instrument(mr);
    std::string label = std::string("M_") + pauli_char(axis) + ",R_" + mr.psi_label;
    return EffectiveOp{std::move(label), inst.effective_map(), {InstrumentStep{std::move(mr), 0}}};
}

std::vector<EffectiveOp> basis_operations_1q() {
    using std::numbers::pi;
    const double s = 1.0 / std::numbers::sqrt2;
    const Complex i{0.0, 1.0};
    std::vector<EffectiveOp> ops;
    ops.reserve(16);
    ops.push_back(EffectiveOp{"I", PtmMap::identity(1), {}});
    ops.push_back(rotation_chain("X_pi", {{Pauli::X, pi}}));
    ops.push_back(rotation_chain("Y_pi", {{Pauli::Y, pi}}));
    ops.push_back(rotation_chain("Z_pi", {{Pauli::Z, pi}}));
    ops.push_back(rotation_chain("X_pi/2", {{Pauli::X, pi / 2}}));
    ops.push_back(rotation_chain("Y_pi/2", {{Pauli::Y, pi / 2}}));
    ops.push_back(rotation_chain("Z_pi/2", {{Pauli::Z, pi / 2}}));
    ops.push_back(rotation_chain("X_pi,Z_pi/2", {{Pauli::X, pi}, {Pauli::Z, pi / 2}}));
    ops.push_back(rotation_chain("X_pi,Y_-pi/2", {{Pauli::X, pi}, {Pauli::Y, -pi / 2}}));
    ops.push_back(rotation_chain("Y_pi,X_pi/2", {{Pauli::Y, pi}, {Pauli::X, pi / 2}}));
    ops.push_back(measure_reset_map(Pauli::X, ket(s, s), "|0+1>"));
    ops.push_back(measure_reset_map(Pauli::X, ket(s, -s), "|0-1>"));
    ops.push_back(measure_reset_map(Pauli::Y, ket(s, i * s), "|0+i1>"));
    ops.push_back(measure_reset_map(Pauli::Y, ket(s, -i * s), "|0-i1>"));
    ops.push_back(measure_reset_map(Pauli::Z, ket(1, 0), "|0>"));
    ops.push_back(measure_reset_map(Pauli::Z, ket(0, 1), "|1>"));
    return ops;
}

EffectiveOp tensor_op(const EffectiveOp& a, const EffectiveOp& b) {
    if (a.n_qubits() != 1 || b.n_qubits() != 1) {
        throw ValidationError("tensor_op: both operands must be single-qubit operations");
    }
    std::vector<RecipeStep> steps = shifted(a.realization, 0);
    for (auto& s : shifted(b.realization, 1)) {
        steps.push_back(std::move(s));
    }
    return EffectiveOp{a.label + "|" + b.label, tensor(a.ptm, b.ptm), std::move(steps)};
}

std::vector<EffectiveOp> basis_operations_2q(const EffectiveOp& twirled_gate) {
    const auto ops = basis_operations_1q();
    return basis_operations_2q(ops, ops, twirled_gate);
}

std::vector<EffectiveOp> basis_operations_2q(const std::vector<EffectiveOp>& qubit0_ops,
                                             const std::vector<EffectiveOp>& qubit1_ops,
                                             const EffectiveOp& twirled_gate) {
    if (qubit0_ops.size() != 16 || qubit1_ops.size() != 16) {
        throw ValidationError("basis_operations_2q: expected 16 single-qubit operations per qubit");
    }
    if (twirled_gate.n_qubits() != 2) {
        throw ValidationError("basis_operations_2q: twirled gate must act on two qubits");
    }
    std::vector<EffectiveOp> out;
    out.reserve(257);
    for (const auto& a : qubit0_ops) {
        for (const auto& b : qubit1_ops) {
            out.push_back(tensor_op(a, b));
        }
    }
    out.push_back(twirled_gate);
    return out;
}

std::vector<CVector> preparation_vectors_1q() {
    const double s = 1.0 / std::numbers::sqrt2;
    const Complex i{0.0, 1.0};
    return {ket(1, 0), ket(0, 1), ket(s, s), ket(s, -i * s)};
}

std::vector<std::string> preparation_labels_1q() { return {"|0>", "|1>", "|0+1>", "|0-i1>"}; }

Matrix preparation_states_1q() {
    Matrix a(4, 4);
    // clang-format off
    a << 1,  1, 1,  1,
         0,  0, 1,  0,
         0,  0, 0, -1,
         1, -1, 0,  0;
    // clang-format on
    return a;
}

Matrix preparation_matrix(int n_qubits) {
    Matrix a = preparation_states_1q();
    Matrix out = a;
    for (int q = 1; q < n_qubits; ++q) {
        out = kron(out, a);
    }
    return out;
}

}  // namespace uqem

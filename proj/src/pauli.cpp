#include "uqem/pauli.hpp"

#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "uqem/errors.hpp"

namespace uqem {

namespace {

int qubits_for_dim(Eigen::Index dim, const char* what) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) {
        ++n;
    }
    if ((Eigen::Index{1} << n) != dim || n == 0) {
        throw ValidationError(std::string(what) + ": dimension " + std::to_string(dim) + " is not 2^n with n >= 1");
    }
    return n;
}

void require_hermitian(const CMatrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw ValidationError(std::string(what) + ": matrix is not square");
    }
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kValidationTol) {
        throw ValidationError(std::string(what) + ": matrix is not Hermitian");
    }
}

// Cached full Pauli basis for 1 and 2 qubits; larger n are built on demand.
const std::vector<CMatrix>& pauli_basis(int n) {
    static const std::array<std::vector<CMatrix>, 3> cache = [] {
        std::array<std::vector<CMatrix>, 3> out;
        for (int k = 1; k <= 2; ++k) {
            for (std::size_t i = 0; i < pauli_dim(k); ++i) {
                out[static_cast<std::size_t>(k)].push_back(pauli_matrix(PauliString::from_index(k, i)));
            }
        }
        return out;
    }();
    if (n >= 1 && n <= 2) {
        return cache[static_cast<std::size_t>(n)];
    }
    thread_local std::vector<CMatrix> scratch;
    scratch.clear();
    for (std::size_t i = 0; i < pauli_dim(n); ++i) {
        scratch.push_back(pauli_matrix(PauliString::from_index(n, i)));
    }
    return scratch;
}

}  // namespace

char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I':
        case '_':
            return Pauli::I;
        case 'X':
            return Pauli::X;
        case 'Y':
            return Pauli::Y;
        case 'Z':
            return Pauli::Z;
        default:
            throw ValidationError(std::string("unknown Pauli letter '") + c + "'");
    }
}

PauliString::PauliString(std::vector<Pauli> letters) : letters_(std::move(letters)) {
    if (letters_.empty()) {
        throw ValidationError("PauliString needs at least one qubit");
    }
}

PauliString PauliString::from_str(std::string_view text) {
    std::vector<Pauli> letters;
    letters.reserve(text.size());
    for (char c : text) {
        letters.push_back(pauli_from_char(c));
    }
    return PauliString(std::move(letters));
}

PauliString PauliString::from_index(int n_qubits, std::size_t index) {
    if (n_qubits <= 0 || index >= pauli_dim(n_qubits)) {
        throw ValidationError("Pauli index out of range");
    }
    std::vector<Pauli> letters(static_cast<std::size_t>(n_qubits));
    for (int q = n_qubits - 1; q >= 0; --q) {
        letters[static_cast<std::size_t>(q)] = static_cast<Pauli>(index & 3);
        index >>= 2;
    }
    return PauliString(std::move(letters));
}

PauliString PauliString::identity(int n_qubits) { return from_index(n_qubits, 0); }

std::size_t PauliString::index() const {
    std::size_t idx = 0;
    for (Pauli p : letters_) {
        idx = idx * 4 + static_cast<std::size_t>(p);
    }
    return idx;
}

std::string PauliString::str() const {
    std::string s;
    for (Pauli p : letters_) {
        s.push_back(pauli_char(p));
    }
    return s;
}

bool PauliString::is_identity() const {
    for (Pauli p : letters_) {
        if (p != Pauli::I) {
            return false;
        }
    }
    return true;
}

CMatrix pauli_matrix(Pauli p) {
    const Complex i{0.0, 1.0};
    CMatrix m(2, 2);
    switch (p) {
        case Pauli::I:
            m << 1, 0, 0, 1;
            break;
        case Pauli::X:
            m << 0, 1, 1, 0;
            break;
        case Pauli::Y:
            m << 0, -i, i, 0;
            break;
        case Pauli::Z:
            m << 1, 0, 0, -1;
            break;
    }
    return m;
}

CMatrix pauli_matrix(const PauliString& p) {
    CMatrix m = pauli_matrix(p[0]);
    for (int q = 1; q < p.n_qubits(); ++q) {
        m = kron(m, pauli_matrix(p[static_cast<std::size_t>(q)]));
    }
    return m;
}

PtmState::PtmState(int n_qubits, Vector entries) : n_qubits_(n_qubits), entries_(std::move(entries)) {
    if (n_qubits <= 0 || static_cast<std::size_t>(entries_.size()) != pauli_dim(n_qubits)) {
        throw ValidationError("PtmState: entry count does not match 4^n");
    }
}

PtmObservable::PtmObservable(int n_qubits, RowVector entries) : n_qubits_(n_qubits), entries_(std::move(entries)) {
    if (n_qubits <= 0 || static_cast<std::size_t>(entries_.size()) != pauli_dim(n_qubits)) {
        throw ValidationError("PtmObservable: entry count does not match 4^n");
    }
}

PtmObservable PtmObservable::pauli(const PauliString& p) {
    RowVector e = RowVector::Zero(static_cast<Eigen::Index>(pauli_dim(p.n_qubits())));
    e[static_cast<Eigen::Index>(p.index())] = 1.0;
    return PtmObservable(p.n_qubits(), std::move(e));
}

PtmMap::PtmMap(int n_qubits, Matrix matrix) : n_qubits_(n_qubits), matrix_(std::move(matrix)) {
    const auto dim = static_cast<Eigen::Index>(pauli_dim(n_qubits > 0 ? n_qubits : 1));
    if (n_qubits <= 0 || matrix_.rows() != dim || matrix_.cols() != dim) {
        throw ValidationError("PtmMap: matrix shape does not match 4^n x 4^n");
    }
}

PtmMap PtmMap::identity(int n_qubits) {
    const auto dim = static_cast<Eigen::Index>(pauli_dim(n_qubits));
    return PtmMap(n_qubits, Matrix::Identity(dim, dim));
}

bool PtmMap::is_trace_preserving(double tol) const {
    RowVector expected = RowVector::Zero(matrix_.cols());
    expected[0] = 1.0;
    return (matrix_.row(0) - expected).cwiseAbs().maxCoeff() <= tol;
}

PtmState vectorize_state(const CMatrix& rho) {
    require_hermitian(rho, "vectorize_state");
    const int n = qubits_for_dim(rho.rows(), "vectorize_state");
    if (std::abs(rho.trace() - Complex{1.0, 0.0}) > kValidationTol) {
        throw ValidationError("vectorize_state: trace is not 1");
    }
    const auto& basis = pauli_basis(n);
    Vector v(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = (basis[i] * rho).trace().real();
    }
    return PtmState(n, std::move(v));
}

CMatrix density_matrix(const PtmState& s) {
    const auto& basis = pauli_basis(s.n_qubits());
    const auto d = static_cast<Eigen::Index>(hilbert_dim(s.n_qubits()));
    CMatrix rho = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        rho += s[i] * basis[i];
    }
    return rho / static_cast<double>(d);
}

PtmState pure_state(const CVector& psi) {
    if (std::abs(psi.norm() - 1.0) > kValidationTol) {
        throw ValidationError("pure_state: state vector is not normalized");
    }
    return vectorize_state(psi * psi.adjoint());
}

PtmObservable covectorize_observable(const CMatrix& q) {
    require_hermitian(q, "covectorize_observable");
    const int n = qubits_for_dim(q.rows(), "covectorize_observable");
    const auto& basis = pauli_basis(n);
    const double d = static_cast<double>(hilbert_dim(n));
    RowVector v(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = (basis[i] * q).trace().real() / d;
    }
    return PtmObservable(n, std::move(v));
}

PtmMap ptm_of_unitary(const CMatrix& u) {
    if (u.rows() != u.cols()) {
        throw ValidationError("ptm_of_unitary: matrix is not square");
    }
    qubits_for_dim(u.rows(), "ptm_of_unitary");
    if ((u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > kValidationTol) {
        throw ValidationError("ptm_of_unitary: matrix is not unitary");
    }
    const CMatrix ops[] = {u};
    return ptm_of_kraus(ops);
}

PtmMap ptm_of_kraus(std::span<const CMatrix> ops) {
    if (ops.empty()) {
        throw ValidationError("ptm_of_kraus: empty Kraus set");
    }
    const Eigen::Index d = ops.front().rows();
    const int n = qubits_for_dim(d, "ptm_of_kraus");
    CMatrix completeness = CMatrix::Zero(d, d);
    for (const auto& k : ops) {
        if (k.rows() != d || k.cols() != d) {
            throw ValidationError("ptm_of_kraus: Kraus operators have inconsistent shapes");
        }
        completeness += k.adjoint() * k;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(completeness, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().maxCoeff() > 1.0 + kValidationTol) {
        throw ValidationError("ptm_of_kraus: sum of K^dagger K exceeds the identity");
    }

    const auto& basis = pauli_basis(n);
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Matrix m(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        CMatrix image = CMatrix::Zero(d, d);
        for (const auto& k : ops) {
            image += k * basis[static_cast<std::size_t>(j)] * k.adjoint();
        }
        for (Eigen::Index i = 0; i < dim; ++i) {
            m(i, j) = (basis[static_cast<std::size_t>(i)] * image).trace().real() / static_cast<double>(d);
        }
    }
    return PtmMap(n, std::move(m));
}

CMatrix choi_of_ptm(const PtmMap& m) {
    const int n = m.n_qubits();
    const auto& basis = pauli_basis(n);
    const auto d = static_cast<Eigen::Index>(hilbert_dim(n));
    CMatrix choi = CMatrix::Zero(d * d, d * d);
    const auto dim = static_cast<Eigen::Index>(basis.size());
    for (Eigen::Index j = 0; j < dim; ++j) {
        const CMatrix input = basis[static_cast<std::size_t>(j)].transpose();
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double r = m.matrix()(i, j);
            if (r != 0.0) {
                choi += (r / static_cast<double>(d)) * kron(input, basis[static_cast<std::size_t>(i)]);
            }
        }
    }
    return choi;
}

PtmMap compose(const PtmMap& a, const PtmMap& b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw ValidationError("compose: qubit counts differ");
    }
    return PtmMap(a.n_qubits(), a.matrix() * b.matrix());
}

PtmMap tensor(const PtmMap& a, const PtmMap& b) {
    return PtmMap(a.n_qubits() + b.n_qubits(), kron(a.matrix(), b.matrix()));
}

PtmState tensor(const PtmState& a, const PtmState& b) {
    return PtmState(a.n_qubits() + b.n_qubits(), kron(Matrix(a.entries()), Matrix(b.entries())).col(0));
}

PtmObservable tensor(const PtmObservable& a, const PtmObservable& b) {
    return PtmObservable(a.n_qubits() + b.n_qubits(), kron(Matrix(a.entries()), Matrix(b.entries())).row(0));
}

PtmState apply(const PtmMap& m, const PtmState& s) {
    if (m.n_qubits() != s.n_qubits()) {
        throw ValidationError("apply: qubit counts differ");
    }
    return PtmState(s.n_qubits(), m.matrix() * s.entries());
}

double expectation(const PtmObservable& obs, std::span<const PtmMap> maps, const PtmState& state) {
    if (obs.n_qubits() != state.n_qubits()) {
        throw ValidationError("expectation: observable and state qubit counts differ");
    }
    Vector v = state.entries();
    for (const auto& m : maps) {
        if (m.n_qubits() != state.n_qubits()) {
            throw ValidationError("expectation: map qubit count differs from state");
        }
        v = m.matrix() * v;
    }
    return obs.entries().dot(v);
}

double expectation(const PtmObservable& obs, const PtmState& state) {
    return expectation(obs, std::span<const PtmMap>{}, state);
}

Vector vectorize_map(const PtmMap& m) { return m.matrix().reshaped(); }

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace uqem

#include "uqem/fidelity.hpp"

#include <cmath>

#include "uqem/errors.hpp"

namespace uqem {

CMatrix ptm_to_chi(const PtmMap& m) {
    const int n = m.n_qubits();
    const auto d = static_cast<Eigen::Index>(hilbert_dim(n));
    const auto dim = static_cast<Eigen::Index>(pauli_dim(n));
    // Columns are the Pauli operators vectorized in the same (input-major)
    // order as the Choi matrix, so chi = V^dagger Choi V / d^2.
    CMatrix v(d * d, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        v.col(i) = pauli_matrix(PauliString::from_index(n, static_cast<std::size_t>(i))).reshaped();
    }
    return v.adjoint() * choi_of_ptm(m) * v / static_cast<double>(d * d);
}

double process_fidelity(const PtmMap& experimental, const PtmMap& ideal) {
    if (experimental.n_qubits() != ideal.n_qubits()) {
        throw ValidationError("process_fidelity: qubit counts differ");
    }
    const CMatrix chi_exp = ptm_to_chi(experimental);
    const CMatrix chi_ideal = ptm_to_chi(ideal);
    const double tr_exp = chi_exp.trace().real();
    const double tr_ideal = chi_ideal.trace().real();
    if (std::abs(tr_exp) < 1e-14 || std::abs(tr_ideal) < 1e-14) {
        throw NumericalError("process_fidelity: chi matrix has zero trace");
    }
    return (chi_exp * chi_ideal).trace().real() / (tr_exp * tr_ideal);
}

}  // namespace uqem

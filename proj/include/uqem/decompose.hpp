#pragma once

// Quasiprobability decompositions of ideal observables and gates over
// (estimates of) noisy executable operations.

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "uqem/gates.hpp"

namespace uqem {

/// A basis element is either an executable operation or a Pauli
/// measurement (identity letters are left unmeasured).
using BasisElement = std::variant<EffectiveOp, PauliString>;

std::string basis_label(const BasisElement& e);

struct QuasiDecomposition {
    std::string target;
    std::vector<BasisElement> basis;
    Vector q;
    double cost = 0.0;      // sum |q_i|
    double residual = 0.0;  // max-norm reconstruction error

    /// Decomposition report: {"target", "cost", "residual",
    /// "terms": [{"index", "label", "q"}]} with 1-based indices; terms with
    /// |q| below 1e-15 are omitted.
    nlohmann::json to_json() const;
};

inline constexpr double kResidualTol = 1e-9;

/// q = Q B_hat^-1 for a single-qubit observable measured on `measured_qubit`
/// of an n-qubit register. B_hat rows are the estimated noisy effects of
/// I, X, Y, Z on that qubit.
QuasiDecomposition decompose_observable(const PtmObservable& Q, const Matrix& B_hat, int measured_qubit = 0,
                                        int register_qubits = 1);

/// Minimum-L1 solution of sum_k q_k basis_k.ptm = target. With a
/// one-dimensional null space the optimum is found by enumerating the
/// breakpoints of the piecewise-linear cost (ties go to the
/// lexicographically smallest q); larger null spaces use the simplex
/// solver. Throws InfeasibleError when the basis does not span the
/// target space or the residual exceeds kResidualTol.
QuasiDecomposition decompose_gate(const PtmMap& target, const std::vector<EffectiveOp>& basis,
                                  std::string target_label = "target");

/// Columns vec(basis_k.ptm).
Matrix basis_system(const std::vector<EffectiveOp>& basis);

/// min sum |q| over the affine line q0 + s n (exact breakpoint search).
Vector min_l1_on_line(const Vector& q0, const Vector& n);

}  // namespace uqem

#include "uqem/decompose.hpp"

#include <algorithm>
#include <cmath>

#include "uqem/errors.hpp"
#include "uqem/gst.hpp"
#include "uqem/lp.hpp"

namespace uqem {

namespace {

struct LineOptimum {
    Vector q;
    Eigen::Index zeroed = -1;  // coordinate forced to zero at the optimum
};

LineOptimum line_optimum(const Vector& q0, const Vector& n) {
    const double scale = n.cwiseAbs().maxCoeff();
    LineOptimum best{q0, -1};
    if (!(scale > 0.0)) return best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n.size(); ++k) {
        if (std::abs(n[k]) <= 1e-12 * scale) continue;
        const double s = -q0[k] / n[k];
        Vector q = q0 + s * n;
        q[k] = 0.0;
        const double cost = q.lpNorm<1>();
        const double tie = 1e-12 * std::max(1.0, best_cost);
        bool take = cost < best_cost - tie;
        if (!take && std::abs(cost - best_cost) <= tie) {
            take = std::lexicographical_compare(q.begin(), q.end(), best.q.begin(), best.q.end());
        }
        if (take) {
            best_cost = std::min(best_cost, cost);
            best = {std::move(q), k};
        }
    }
    return best;
}

std::string observable_label(const PtmObservable& Q) {
    const auto& e = Q.entries();
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        Vector unit = Vector::Zero(e.size());
        unit[i] = 1.0;
        if ((e.transpose() - unit).cwiseAbs().maxCoeff() == 0.0) {
            return PauliString::from_index(Q.n_qubits(), static_cast<std::size_t>(i)).str();
        }
    }
    return "observable";
}

}  // namespace

std::string basis_label(const BasisElement& e) {
    if (const auto* op = std::get_if<EffectiveOp>(&e)) return op->label;
    return "meas " + std::get<PauliString>(e).str();
}

nlohmann::json QuasiDecomposition::to_json() const {
    nlohmann::json doc;
    doc["target"] = target;
    doc["cost"] = cost;
    doc["residual"] = residual;
    doc["n_basis"] = basis.size();
    doc["terms"] = nlohmann::json::array();
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const double v = q[static_cast<Eigen::Index>(k)];
        if (std::abs(v) < 1e-15) continue;
        doc["terms"].push_back({{"index", k + 1}, {"label", basis_label(basis[k])}, {"q", v}});
    }
    return doc;
}

QuasiDecomposition decompose_observable(const PtmObservable& Q, const Matrix& B_hat, int measured_qubit,
                                        int register_qubits) {
    const auto d = static_cast<Eigen::Index>(pauli_dim(Q.n_qubits()));
    if (B_hat.rows() != d || B_hat.cols() != d) {
        throw ValidationError("decompose_observable: readout estimate does not match the observable");
    }
    if (Q.n_qubits() != register_qubits && Q.n_qubits() != 1) {
        throw ValidationError("decompose_observable: only single-qubit observables can be embedded");
    }
    if (measured_qubit < 0 || measured_qubit + Q.n_qubits() > register_qubits) {
        throw ValidationError("decompose_observable: measured qubit outside the register");
    }
    const double cond = condition_number(B_hat);
    if (!(cond < kMaxConditionNumber)) {
        throw InversionError("decompose_observable: readout estimate is singular", cond);
    }

    QuasiDecomposition out;
    out.target = "<<" + observable_label(Q) + "|";
    out.q = B_hat.transpose().fullPivLu().solve(Q.entries().transpose());
    for (Eigen::Index i = 0; i < d; ++i) {
        const PauliString local = PauliString::from_index(Q.n_qubits(), static_cast<std::size_t>(i));
        std::vector<Pauli> letters(static_cast<std::size_t>(register_qubits), Pauli::I);
        for (int k = 0; k < Q.n_qubits(); ++k) {
            letters[static_cast<std::size_t>(measured_qubit + k)] = local[static_cast<std::size_t>(k)];
        }
        out.basis.emplace_back(PauliString(std::move(letters)));
    }
    out.cost = out.q.lpNorm<1>();
    out.residual = (out.q.transpose() * B_hat - Q.entries()).cwiseAbs().maxCoeff();
    if (out.residual > kResidualTol) {
        throw InfeasibleError("decompose_observable: residual " + std::to_string(out.residual) + " exceeds tolerance");
    }
    return out;
}

Matrix basis_system(const std::vector<EffectiveOp>& basis) {
    if (basis.empty()) throw ValidationError("basis_system: empty basis");
    const int n = basis.front().n_qubits();
    const auto rows = static_cast<Eigen::Index>(pauli_dim(n) * pauli_dim(n));
    Matrix M(rows, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (basis[k].n_qubits() != n) {
            throw ValidationError("basis_system: basis ops act on different numbers of qubits");
        }
        M.col(static_cast<Eigen::Index>(k)) = vectorize_map(basis[k].ptm);
    }
    return M;
}

Vector min_l1_on_line(const Vector& q0, const Vector& n) {
    return line_optimum(q0, n).q;
}

QuasiDecomposition decompose_gate(const PtmMap& target, const std::vector<EffectiveOp>& basis,
                                  std::string target_label) {
    const Matrix M = basis_system(basis);
    if (basis.front().n_qubits() != target.n_qubits()) {
        throw ValidationError("decompose_gate: target and basis sizes differ");
    }
    const Vector t = vectorize_map(target);

    Eigen::FullPivLU<Matrix> lu(M);
    const auto rank = lu.rank();
    if (rank < M.rows()) {
        throw InfeasibleError("decompose_gate: basis has rank " + std::to_string(rank) + ", needs " +
                              std::to_string(M.rows()));
    }
    const auto nullity = M.cols() - rank;

    Vector q;
    if (nullity == 0) {
        q = lu.solve(t);
    } else if (nullity == 1) {
        const Vector q0 = lu.solve(t);
        const Matrix kernel = lu.kernel();
        auto opt = line_optimum(q0, kernel.col(0));
        q = std::move(opt.q);
        if (opt.zeroed >= 0) {
            // Re-solve on the square system without the zeroed column to
            // remove the rounding of the line parametrization.
            Matrix square(M.rows(), M.cols() - 1);
            square << M.leftCols(opt.zeroed), M.rightCols(M.cols() - opt.zeroed - 1);
            Eigen::FullPivLU<Matrix> sq(square);
            if (sq.isInvertible()) {
                const Vector r = sq.solve(t);
                Vector refined(M.cols());
                refined << r.head(opt.zeroed), 0.0, r.tail(r.size() - opt.zeroed);
                if ((M * refined - t).cwiseAbs().maxCoeff() <= (M * q - t).cwiseAbs().maxCoeff()) {
                    q = std::move(refined);
                }
            }
        }
    } else {
        q = min_l1_solution(M, t);
    }

    QuasiDecomposition out;
    out.target = std::move(target_label);
    out.basis.assign(basis.begin(), basis.end());
    out.q = std::move(q);
    out.cost = out.q.lpNorm<1>();
    out.residual = (M * out.q - t).cwiseAbs().maxCoeff();
    if (out.residual > kResidualTol) {
        throw InfeasibleError("decompose_gate: residual " + std::to_string(out.residual) + " exceeds tolerance");
    }
    return out;
}

}  // namespace uqem

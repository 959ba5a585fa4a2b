#include "uqem/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "uqem/errors.hpp"

namespace uqem {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr int kDegenerateRunBeforeBland = 50;
constexpr int kMaxPivots = 200000;

class Tableau {
  public:
    Tableau(const Matrix& A, const Vector& b) : m_(A.rows()), n_(A.cols()), t_(m_, n_ + m_ + 1), basis_(m_) {
        t_.setZero();
        for (Eigen::Index i = 0; i < m_; ++i) {
            const double sign = b[i] < 0.0 ? -1.0 : 1.0;
            t_.row(i).head(n_) = sign * A.row(i);
            t_(i, n_ + i) = 1.0;
            t_(i, n_ + m_) = sign * b[i];
            basis_[static_cast<std::size_t>(i)] = n_ + i;
        }
    }

    // Minimize cost over the columns for which allowed[j] is true.
    void optimize(const Vector& cost, const std::vector<bool>& allowed) {
        z_ = RowVector::Zero(n_ + m_ + 1);
        z_.head(n_ + m_) = cost.transpose();
        for (Eigen::Index i = 0; i < m_; ++i) {
            const double cb = cost[basis_[static_cast<std::size_t>(i)]];
            if (cb != 0.0) z_ -= cb * t_.row(i);
        }
        bool bland = false;
        int degenerate_run = 0;
        for (int it = 0; it < kMaxPivots; ++it) {
            Eigen::Index enter = -1;
            double best = -kPivotTol;
            for (Eigen::Index j = 0; j < n_ + m_; ++j) {
                if (!allowed[static_cast<std::size_t>(j)] || z_[j] >= best) continue;
                enter = j;
                if (bland) break;
                best = z_[j];
            }
            if (enter < 0) return;

            Eigen::Index leave = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m_; ++i) {
                const double a = t_(i, enter);
                if (a <= kPivotTol) continue;
                const double r = t_(i, n_ + m_) / a;
                if (r < ratio - 1e-12 ||
                    (r <= ratio + 1e-12 && leave >= 0 &&
                     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
                    ratio = std::min(ratio, r);
                    leave = i;
                }
            }
            if (leave < 0) {
                throw NumericalError("linear program is unbounded");
            }
            if (ratio <= 1e-12) {
                if (++degenerate_run > kDegenerateRunBeforeBland) bland = true;
            } else {
                degenerate_run = 0;
            }
            pivot(leave, enter);
        }
        throw NumericalError("simplex did not converge");
    }

    void pivot(Eigen::Index r, Eigen::Index s) {
        t_.row(r) /= t_(r, s);
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = t_(i, s);
            if (f != 0.0) t_.row(i) -= f * t_.row(r);
        }
        if (z_.size() > 0 && z_[s] != 0.0) z_ -= z_[s] * t_.row(r);
        basis_[static_cast<std::size_t>(r)] = s;
    }

    // Replace artificial basics by original columns where possible.
    void drive_out_artificials() {
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < n_) continue;
            for (Eigen::Index j = 0; j < n_; ++j) {
                if (std::abs(t_(i, j)) > kPivotTol) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    double objective() const { return -z_[n_ + m_]; }
    const std::vector<Eigen::Index>& basis() const { return basis_; }

  private:
    Eigen::Index m_;
    Eigen::Index n_;
    Matrix t_;
    RowVector z_;
    std::vector<Eigen::Index> basis_;
};

}  // namespace

LpSolution solve_standard_lp(const Matrix& A, const Vector& b, const Vector& c) {
    if (A.rows() != b.size() || A.cols() != c.size()) {
        throw ValidationError("solve_standard_lp: dimension mismatch");
    }
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    Tableau tab(A, b);

    Vector phase1 = Vector::Zero(n + m);
    phase1.tail(m).setOnes();
    std::vector<bool> allowed(static_cast<std::size_t>(n + m), true);
    tab.optimize(phase1, allowed);
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if (tab.objective() > 1e-9 * scale) {
        throw InfeasibleError("linear program is infeasible (phase-one residual " + std::to_string(tab.objective()) +
                              ")");
    }
    tab.drive_out_artificials();

    Vector phase2 = Vector::Zero(n + m);
    phase2.head(n) = c;
    for (Eigen::Index j = n; j < n + m; ++j) allowed[static_cast<std::size_t>(j)] = false;
    tab.optimize(phase2, allowed);

    std::vector<Eigen::Index> cols;
    for (auto j : tab.basis()) {
        if (j < n) cols.push_back(j);
    }
    Matrix AB(m, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) AB.col(static_cast<Eigen::Index>(k)) = A.col(cols[k]);
    const Vector xb = AB.colPivHouseholderQr().solve(b);

    LpSolution out;
    out.x = Vector::Zero(n);
    for (std::size_t k = 0; k < cols.size(); ++k) out.x[cols[k]] = xb[static_cast<Eigen::Index>(k)];
    out.objective = c.dot(out.x);
    return out;
}

Vector min_l1_solution(const Matrix& M, const Vector& t) {
    const Eigen::Index k = M.cols();
    Matrix A(M.rows(), 2 * k);
    A << M, -M;
    const auto sol = solve_standard_lp(A, t, Vector::Ones(2 * k));
    return sol.x.head(k) - sol.x.tail(k);
}

}  // namespace uqem

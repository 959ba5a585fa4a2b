#pragma once

// Dense two-phase simplex for the small linear programs of the
// decomposition step (at most a few hundred rows).

#include "uqem/pauli.hpp"

namespace uqem {

struct LpSolution {
    Vector x;
    double objective = 0.0;
};

/// min c.x subject to A x = b, x >= 0. Dantzig pricing with Bland's rule
/// once a run of degenerate pivots is detected. The final basic solution is
/// recomputed from the original columns. Throws InfeasibleError.
LpSolution solve_standard_lp(const Matrix& A, const Vector& b, const Vector& c);

/// Minimum L1-norm solution of M q = t via the split q = u - v.
Vector min_l1_solution(const Matrix& M, const Vector& t);

}  // namespace uqem

#pragma once

#include "uqem/pauli.hpp"

namespace uqem {

/// Process matrix in the Pauli basis: E(rho) = sum_mn chi_mn sigma_m rho sigma_n.
CMatrix ptm_to_chi(const PtmMap& m);

/// Tr(chi_exp chi_ideal) / [Tr(chi_exp) Tr(chi_ideal)]. Works for trace
/// decreasing maps; throws NumericalError when either chi has zero trace.
double process_fidelity(const PtmMap& experimental, const PtmMap& ideal);

}  // namespace uqem

#pragma once

#include "cylbench/types.hpp"

namespace cylbench::fem {

/// Reference-element coefficient matrices built numerically from moment
/// functionals: column l holds the raw-modal coefficients of shape function l.
///
/// BDM_k: raw basis = Dubiner(k) x {e0, e1} (2*nd columns of coeff rows);
/// dofs = edge normal moments (Legendre01 against reference arc length,
/// outward normal, 3*(k+1)) followed by interior completion dofs.
const MatX& bdm_coefficients(int order);

/// Trace-free tensor stress element of degree k: raw basis = Dubiner(k) x
/// {T1/sqrt(2), T2, T3} with T1 = diag(1,-1), T2 = e01, T3 = e10; the
/// normal-tangential trace is constrained to degree k-1 per edge; dofs =
/// edge nt moments (3*k) followed by interior completion dofs.
const MatX& mcs_stress_coefficients(int order);

/// Tensor generators used by the stress element, entry order xx, xy, yx, yy.
extern const Real kStressTensors[3][4];

} // namespace cylbench::fem

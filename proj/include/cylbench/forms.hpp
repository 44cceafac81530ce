#pragma once

#include "cylbench/assembly.hpp"
#include "cylbench/fe_space.hpp"
#include "cylbench/geometry_map.hpp"
#include "cylbench/types.hpp"

#include <functional>
#include <set>

namespace cylbench::forms {

using fem::FESpace;
using fem::GeometryCache;
using fem::SparseMat;

struct FluidParams {
    Real nu = 1.0 / 60.0;  // Re = 2/nu
    Real gamma_gd = 1e3;   // grad-div parameter
    Real epsilon_mcs = 0.0; // 0 selects the default 1e-12/nu

    Real eps() const { return epsilon_mcs > 0.0 ? epsilon_mcs : 1e-12 / nu; }
    static FluidParams from_reynolds(Real re) {
        FluidParams p;
        p.nu = 2.0 / re;
        return p;
    }
};

/// A coefficient field over a space.
struct Field {
    const FESpace* space = nullptr;
    const VecX* coeffs = nullptr;
};

/// Form value together with the tolerance scale (sum of absolute elementwise
/// contributions), which makes identity tests mesh-size independent.
struct FormValue {
    Real value = 0.0;
    Real scale = 0.0;
};

using VecFn = std::function<Vec2(const Vec2&)>;

// --- direct evaluators -----------------------------------------------------

/// (nu/2) (D(v), D(w)) with D = grad + grad^T (elementwise for DG fields)
FormValue form_a(const Field& v, const Field& w, Real nu, GeometryCache& geom);

/// -(q, div v)
FormValue form_b(const Field& v, const Field& q, GeometryCache& geom);

/// (u . grad v, w), elementwise
FormValue form_c_conv(const Field& u, const Field& v, const Field& w, GeometryCache& geom);

/// c_conv + 1/2 ((div u) v, w)
FormValue form_c_div(const Field& u, const Field& v, const Field& w, GeometryCache& geom);

/// Upwind DG convection: sum_T -(u . grad w, v)_T + <(u.n) vhat, w>_dT with
/// vhat the upwind trace of v; boundary facets use the interior trace.
FormValue form_c_upw(const Field& u, const Field& v, const Field& w, GeometryCache& geom);

/// Central-flux DG convection: sum_T (u . grad v, w)_T + <(u.n)({v} - v), w>_dT.
FormValue form_c_cf(const Field& u, const Field& v, const Field& w, GeometryCache& geom);

/// gamma (div v, div w)
FormValue form_j_gd(const Field& v, const Field& w, Real gamma_gd, GeometryCache& geom);

/// (1/nu) (sigma, tau)
FormValue form_a_prime(const Field& sigma, const Field& tau, Real nu, GeometryCache& geom);

/// sum_T (div tau, u)_T + sum_F <[[tau_nn]], u.n>_F (boundary edges enter
/// with the one-sided trace). flip_orientation negates every facet normal;
/// the value is unchanged.
FormValue form_b_prime(const Field& tau, const Field& u, GeometryCache& geom,
                       bool flip_orientation = false);

/// 1/2 ||u||^2 and ||div u|| over the mesh
Real kinetic_energy(const Field& u, GeometryCache& geom);
Real divergence_l2(const Field& u, GeometryCache& geom);

/// L2 distance to an analytic field through a dense quadrature rule
/// (independent error oracle for convergence studies).
Real l2_error(const Field& u, const VecFn& exact, GeometryCache& geom, int extra_degree = 6);
Real l2_norm(const Field& u, GeometryCache& geom);

// --- operator builders -----------------------------------------------------

int default_threads();

/// (u, w) for a vector-valued space
SparseMat assemble_mass(const FESpace& v, GeometryCache& geom);
/// (nu/2)(D(u), D(w))
SparseMat assemble_viscous_sym(const FESpace& v, Real nu, GeometryCache& geom);
/// coef (div u, div w)
SparseMat assemble_divdiv(const FESpace& v, Real coef, GeometryCache& geom);
/// rows q, cols u: -(q, div u)
SparseMat assemble_b(const FESpace& p, const FESpace& v, GeometryCache& geom);
/// (p, q)
SparseMat assemble_scalar_mass(const FESpace& p, GeometryCache& geom);
/// Linearization of c_div(u,u,w) (or c_conv if with_div_term = false) at u0.
SparseMat assemble_conv_jacobian(const FESpace& v, const VecX& u0, GeometryCache& geom,
                                 bool with_div_term = true);
/// c_div(u,u,w) residual
VecX residual_conv_cdiv(const FESpace& v, const VecX& u, GeometryCache& geom);
/// (f, w)
VecX load_vector(const FESpace& v, const VecFn& f, GeometryCache& geom, int extra_degree = 4);

/// Interior-penalty viscous operator for the H(div)-conforming velocity:
/// cell term nu (grad u, grad v), symmetric facet terms on tangential jumps,
/// Nitsche boundary terms on the listed markers. penalty = nu * eta * (k+1)^2 / h_F.
SparseMat assemble_dg_viscous(const FESpace& bdm, Real nu, Real eta, GeometryCache& geom);
/// Nitsche right-hand side for boundary data g on the marked edges.
VecX dg_viscous_boundary_rhs(const FESpace& bdm, Real nu, Real eta, const VecFn& g,
                             const std::set<geo::Marker>& markers, GeometryCache& geom);

/// DG convection residual c(u; u, w) with upwind or central flux; Dirichlet
/// facets use g as the exterior trace (all boundary markers).
VecX residual_conv_dg(const FESpace& bdm, const VecX& u, const VecFn& g, bool upwind,
                      GeometryCache& geom);
/// Linearization of the DG convection at u0 (upwind direction frozen).
SparseMat assemble_conv_jacobian_dg(const FESpace& bdm, const VecX& u0, const VecFn& g,
                                    bool upwind, GeometryCache& geom);

/// (1/nu)(sigma, tau)
SparseMat assemble_a_prime(const FESpace& sigma, Real nu, GeometryCache& geom);
/// b'(tau, u): rows = stress test space, cols = velocity
SparseMat assemble_b_prime(const FESpace& sigma, const FESpace& bdm, GeometryCache& geom);
/// <g_t, tau_nt> on the marked boundary (tangential data enters the stress
/// equation naturally)
VecX stress_boundary_rhs(const FESpace& sigma, const VecFn& g,
                         const std::set<geo::Marker>& markers, GeometryCache& geom);

} // namespace cylbench::forms

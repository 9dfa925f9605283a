/*
 * The ODE side: the elliptic Calogero-Moser Lax pair, its Hamiltonian,
 * integration of 2 pi i Q' = P, 2 pi i P' = m^2 p'(2Q|tau), the
 * zero-curvature check, monodromy data and the scalar gauge factors.
 *
 * Lax entries use x(xi, z) = theta1(z + xi) theta1'(0)/(theta1(z) theta1(xi))
 * and y(xi, z) = d/dxi x(xi, z):
 *
 *   L1 = P sigma_3 + m [[0, x(2Q, z)], [x(-2Q, z), 0]]
 *   L2 = m [[0, y(2Q, z)], [y(-2Q, z), 0]]
 *
 * with 2 pi i dL1/dtau - dL2/dz - [L1, L2] = 0 on solutions.
 */
#pragma once

#include <vector>

#include "torustau/specfun.hpp"

namespace torustau {

struct dynamic_state {
    cplx Q, P, tau;
};

cplx lax_x(cplx xi, cplx z, cplx tau);
cplx lax_y(cplx xi, cplx z, cplx tau);

mat2c lax_L1(cplx z, const dynamic_state& s, cplx m);
mat2c lax_L2(cplx z, const dynamic_state& s, cplx m);

/* H = P^2 - m^2 p(2Q|tau) + 4 pi i m^2 d/dtau log eta */
cplx hamiltonian(const dynamic_state& s, cplx m);

/* along the flow dH/dtau minus the explicit partial dH/dtau at fixed (Q, P), central differences */
cplx hamiltonian_flow_residual(const dynamic_state& s, cplx m, double dtau = 1e-4);

/* (1/2) SUM tr L1^2 over the a-cycle Im z = height, trapezoid with n points */
cplx hamiltonian_quadrature(const dynamic_state& s, cplx m, double height, int points = 256);

struct path_spec {
    cplx tau_start, tau_end;
    int steps = 8;
};

/* states at tau_start + j (tau_end - tau_start)/steps, j = 0..steps */
std::vector<dynamic_state> integrate_cm(const dynamic_state& initial, cplx m, const path_spec& path,
                                        double tol = 1e-12);

/* single leg, adaptive Dormand-Prince 5(4) */
dynamic_state propagate(const dynamic_state& s, cplx m, cplx tau_end, double tol = 1e-12);

/* P at tau0 such that the flow from (Q0, P) reaches Q1 at tau1 */
cplx shoot_momentum(cplx Q0, cplx Q1, cplx tau0, cplx tau1, cplx m, cplx P_guess, double tol = 1e-12);

/* log T(tau_end) - log T(tau_start) = INT H dtau / 2 pi i, composite Simpson */
cplx tau_from_hamiltonian(const std::vector<dynamic_state>& states, cplx m);

double zero_curvature_residual(const dynamic_state& s, cplx m, const std::vector<cplx>& z_grid,
                               double dtau, double dz = 1e-5);

struct monodromy_set {
    mat2c MA, MB, M0;
};

monodromy_set monodromy_matrices(cplx a, cplx m, cplx nu);

struct gauge_factor_set {
    cplx gA, gB, g1, rho_shift;
};

gauge_factor_set gauge_factors(cplx m, cplx tau, cplx z);

/* | res L1~ - m [[-1, 1], [1, -1]] |, residue from z = +-1e-4, L1~ = L1 - m theta1'/theta1 */
double rank1_residue_check(const dynamic_state& s, cplx m);

} // namespace torustau

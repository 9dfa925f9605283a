/*
 * Determinant side of the torus tau function.
 *
 * The trinion solutions are handled in "stripped" form: on C_in,
 * Y_in(z) = diag(e^{2 pi i sigma z}) G(X) with X = e^{-2 pi i z}, and on
 * C_out, Y_out(z) = D diag(e^{2 pi i sigma z}) G^(U) with U = e^{2 pi i z},
 * G^ = sigma_1 G sigma_1.  After stripping the diagonal exponentials the
 * four Cauchy kernels become double power series in (X, W), (X, U), (U, X)
 * and (U_z, U_w); their Taylor coefficients, extracted by a 2-D trapezoid
 * rule on two circles, are the matrix elements of the truncated operator.
 *
 * Index layout of a coefficient table: mode k (Fourier index r = k + 1/2)
 * and colour alpha give the flattened row 2k + alpha; likewise for columns.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torustau/combinatorics.hpp"
#include "torustau/specfun.hpp"

namespace torustau {

struct trinion_solution {
    cplx a, m, nu;
    int rank = 2;
    /* extra colour normalisation of the out solution, kappa and 1/kappa */
    cplx kappa = 1.0;
};

/* stripped matrices G(X) and G^(U) (rank 2 includes the (1 - X)^m factor) */
mat2c trinion_in_stripped(const trinion_solution& s, cplx X);
mat2c trinion_out_stripped(const trinion_solution& s, cplx U);

/* exponents on C_in and C_out */
std::pair<cplx, cplx> sigma_in(const trinion_solution& s);
std::pair<cplx, cplx> sigma_out(const trinion_solution& s);

/* full solutions in the cylinder coordinate z */
mat2c trinion_in(const trinion_solution& s, cplx z);
mat2c trinion_out(const trinion_solution& s, cplx z);

inline mat2c trinion_in(cplx z, cplx a, cplx m) { return trinion_in({a, m, 0.0, 2, 1.0}, z); }
inline mat2c trinion_out(cplx z, cplx a, cplx m, cplx nu) { return trinion_out({a, m, nu, 2, 1.0}, z); }

enum class kernel_kind { a, b, c, d };

/*
 * Kernels in the cylinder coordinate, identity terms as written:
 *   a = (1 - Y_in(z) Y_in(w)^-1)/(1 - e^{-2 pi i (z-w)}), and so on.
 * For a and d with |z - w| < 1e-4 a Taylor branch is used.
 */
mat2c kernel_eval(kernel_kind which, cplx z, cplx w, const trinion_solution& s);

struct fredholm_config {
    int modes = 12;
    int quad_points = 64;
    double radius_first = 0.3;   // |X| (or |U|) circle of the first kernel variable
    double radius_second = 0.2;  // circle of the second variable
    double quad_tol = 1e-10;     // QuadratureStall threshold when verifying
    bool verify_quadrature = false;
};

struct coefficient_table {
    int modes = 0;
    int rank = 2;
    cplx a, m;
    /* size (2 modes)^2 each, row-major over flattened (k, alpha) x (l, beta) */
    dynamic_matrix<cplx> a_blk, b_blk, c_blk, d_blk;
};

/* colour normalisation of Y_out that makes the minors match Z_pert exactly */
cplx connection_normalisation(cplx a, cplx m);

coefficient_table fourier_coefficients(cplx a, cplx m, cplx nu, int rank, const fredholm_config& cfg);

struct truncated_operator {
    int modes = 0;
    dynamic_matrix<cplx> matrix;  // 4M x 4M, blocks [[W1 c, W1 d W2], [-a, b W2]]
};

/* modes defaults to the full table; a smaller value truncates the same table */
truncated_operator assemble_K(const coefficient_table& t, cplx rho, cplx tau,
                              std::optional<int> modes = std::nullopt);

cplx det_one_minus_K(const truncated_operator& K);

struct determinant_value {
    cplx value;
    double convergence;  // relative change against half the modes
};

determinant_value fredholm_determinant(const coefficient_table& t, cplx rho, cplx tau);

/* i e^{-i pi tau/2} det(rho = 1/4 + tau/2)/det(rho = 1/4) */
cplx det_theta_ratio(const coefficient_table& t, cplx tau);

cplx transcendent_from_det(const coefficient_table& t, cplx tau, std::optional<cplx> guess = std::nullopt);

/* the twist at which the determinant's theta factors are evaluated */
inline cplx theorem1_theta_twist(cplx rho) { return rho + 0.5; }

struct theorem1_report {
    cplx lhs, rhs;
    double residual;
    cplx Q_det, Q_blocks;
};

theorem1_report theorem1_residual(const block_params& p, const fredholm_config& cfg,
                                  const truncation& trunc, double dtau);

enum class rank1_twist {
    tilde,          // rho~ = rho - m(tau+1)/2
    tilde_shifted   // rho~ + m tau/2 = rho - m/2
};

struct gauge_report {
    cplx lhs, rhs;
    double residual;
};

/*
 * tau-log-derivative of T_CM = T~_CM (eta e^{i pi tau/6})^{-2m^2}, with T_CM
 * taken from the rank-2 determinant and T~_CM from the rank-1 determinant.
 */
gauge_report gauge_residual(const block_params& p, const fredholm_config& cfg, double dtau,
                            rank1_twist twist = rank1_twist::tilde);

/* one minor of the rank-1 expansion, labelled by two charged partitions */
cplx trinion_minor(const coefficient_table& t, const partition_pair& Y, std::pair<int, int> Q);

/* SUM (-1)^Q q^{(Q+s)^2/2 - s^2/2 + |Y|} e^{-2 pi i (rho - tau/2 - m tau) Q} e^{2 pi i nu(Q1-Q2)} Z */
cplx minor_expansion_sum(const block_params& p, const truncation& trunc);

struct xi_kernel {
    cplx Q, rho, tau;
};

mat2c xi_kernel_eval(const xi_kernel& k, cplx z, cplx w);

/* "TTK1", uint32 M, uint32 4M, then row-major complex doubles, little-endian */
void write_ttk1(const std::string& path, const truncated_operator& K);

} // namespace torustau

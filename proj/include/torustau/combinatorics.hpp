/*
 * Partitions, Maya diagrams and the Nekrasov-Okounkov side of the torus
 * tau function: Z_bif, Z_inst, Z_pert ratios, toric conformal blocks, the
 * two series forms of the tau function and the transcendent Q(tau) read
 * off from the dual partition functions.
 */
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "torustau/specfun.hpp"

namespace torustau {

struct partition {
    std::vector<int> rows;  // weakly decreasing, positive

    int size() const;
    int length() const { return int(rows.size()); }
    /* Y_i for 1-based i, zero past the last row */
    int row(int i) const { return (i >= 1 && i <= length()) ? rows[i - 1] : 0; }
    partition transpose() const;
    bool operator==(const partition&) const = default;
};

/* half-integer positions stored doubled, so 13/2 is kept as 13 */
struct maya_diagram {
    std::vector<int> particles2;  // positive occupied sites, descending
    std::vector<int> holes2;      // negative empty sites, descending
    bool operator==(const maya_diagram&) const = default;
};

struct truncation {
    int max_boxes = 8;
    int max_charge = 4;
};

struct block_params {
    cplx a, m, nu, rho, tau;
};

/* sizes 0..n_max, ascending size, lexicographically descending inside a size */
std::vector<partition> enumerate_partitions(int n_max);

maya_diagram young_to_maya(const partition& Y, int Q);
std::pair<partition, int> maya_to_young(const maya_diagram& m);

struct charge_sums {
    long lhs2;      // 2 (SUM r + SUM s)
    long rhs2;      // Q^2 + 2|Y|
    long count_diff;  // #r - #s
};
charge_sums charge_sum_identity(const maya_diagram& m);

/* arm and leg of the box (i, j), 1-based, relative to Y */
int arm(const partition& Y, int i, int j);
int leg(const partition& Y, int i, int j);

cplx z_bif(cplx x, const partition& Yp, const partition& Y);

using partition_pair = std::pair<partition, partition>;

cplx z_inst(const std::pair<cplx, cplx>& sigma, const std::pair<cplx, cplx>& mu,
            const partition_pair& Yv, const partition_pair& Wv);

/* Z_pert(a+Q, a+Q+m)/Z_pert(a, a+m) with a = (a, -a) */
cplx z_pert_ratio(cplx a, std::pair<int, int> Qv, cplx m);

/*
 * SUM_{|Y1|=s1,|Y2|=s2} Z_inst((a',-a'), (a'+m,-a'+m) | Y, Y), returned as
 * a (max_boxes+1)^2 table indexed [s1 * (max_boxes+1) + s2], zero where
 * s1 + s2 > max_boxes.
 */
std::vector<cplx> instanton_sectors(cplx a_shifted, cplx m, int max_boxes);

/* SUM_{|Y|<=max_boxes} q^|Y| Z_inst at a' */
cplx instanton_sum(cplx a_shifted, cplx m, cplx tau, int max_boxes);

/* conformal block B(a + n/2, m, q), charges split as n = n1 - n2 */
cplx conformal_block(cplx a, int n, cplx m, cplx tau, const truncation& trunc);

struct sector_term {
    int n, k, size1, size2;
    cplx value;
};

/* per-(n, k, |Y1|, |Y2|) contributions to the series of tau_combinatorial */
std::vector<sector_term> tau_comb_sectors(const block_params& p, cplx Q, const truncation& trunc);

cplx tau_combinatorial(const block_params& p, cplx Q, const truncation& trunc);

/* SUM_{n,k} e^{2 pi i nu n} q^{(k+n/2)^2} e^{4 pi i (k+n/2)(rho+1/2)} B(a+n/2) */
cplx fourier_blocks_series(const block_params& p, const truncation& trunc);

cplx tau_fourier_blocks(const block_params& p, cplx Q, const truncation& trunc);

struct dual_partition {
    cplx z0, z_half;
};

/*
 * Z_0 = -SUM e^{4 pi i nu n} B(a+n), Z_1/2 = SUM e^{4 pi i nu (n+1/2)} B(a+n+1/2),
 * normalised so that the series of tau_combinatorial in rho~ equals
 * e^{-i pi tau/2} e^{2 pi i rho~} (Z_1/2 theta3(2 rho~|2tau) - Z_0 theta2(2 rho~|2tau)).
 */
dual_partition dual_partition_functions(const block_params& p, const truncation& trunc);

/* Q with theta3(2Q|2tau)/theta2(2Q|2tau) = R */
cplx invert_theta_ratio(cplx R, cplx tau, std::optional<cplx> guess = std::nullopt);

/* representative of {+-Q + Z + tau Z} in the centred cell, Re part >= 0 */
cplx canonical_transcendent(cplx Q, cplx tau);

cplx transcendent_from_blocks(const block_params& p, const truncation& trunc,
                              std::optional<cplx> guess = std::nullopt);

/* rho~ = rho - m (tau+1)/2 */
inline cplx rho_tilde(const block_params& p)
{
    return p.rho - p.m * (p.tau + 1.0) / 2.0;
}

} // namespace torustau

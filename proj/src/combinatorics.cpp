#include "torustau/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "torustau/parallel.hpp"

namespace torustau {

namespace {

const cplx I(0, 1);
const double PI = std::numbers::pi;

void partitions_of(int n, int max_part, std::vector<int>& prefix, std::vector<partition>& out)
{
    if (n == 0) {
        out.push_back(partition{prefix});
        return;
    }
    for (int p = std::min(n, max_part); p >= 1; p--) {
        prefix.push_back(p);
        partitions_of(n - p, p, prefix, out);
        prefix.pop_back();
    }
}

cplx theta1_checked(cplx z, const modular_parameter<double>& mp)
{
    cplx v = theta(1, z, mp);
    if (std::abs(v) < 1e-14)
        throw error(errc::theta_zero, "theta_1 prefactor vanishes: Q is on the Malgrange locus");
    return v;
}

} // namespace

int partition::size() const
{
    return std::accumulate(rows.begin(), rows.end(), 0);
}

partition partition::transpose() const
{
    partition t;
    int cols = rows.empty() ? 0 : rows.front();
    for (int j = 1; j <= cols; j++) {
        int c = 0;
        for (int r : rows)
            if (r >= j)
                c++;
        t.rows.push_back(c);
    }
    return t;
}

std::vector<partition> enumerate_partitions(int n_max)
{
    std::vector<partition> out;
    std::vector<int> prefix;
    for (int n = 0; n <= n_max; n++)
        partitions_of(n, n, prefix, out);
    return out;
}

maya_diagram young_to_maya(const partition& Y, int Q)
{
    /* occupied sites Y_i - i + 1/2 + Q, doubled: 2Y_i - 2i + 1 + 2Q */
    const int L = Y.length() + std::abs(Q) + 2;
    std::set<int> occupied;
    for (int i = 1; i <= L; i++)
        occupied.insert(2 * Y.row(i) - 2 * i + 1 + 2 * Q);
    const int lowest = -2 * L + 1 + 2 * Q;  // every site below is occupied

    maya_diagram m;
    for (auto it = occupied.rbegin(); it != occupied.rend(); ++it)
        if (*it > 0)
            m.particles2.push_back(*it);
    for (int s = -1; s > lowest; s -= 2)
        if (!occupied.count(s))
            m.holes2.push_back(s);
    return m;
}

std::pair<partition, int> maya_to_young(const maya_diagram& m)
{
    int Q = int(m.particles2.size()) - int(m.holes2.size());
    std::vector<int> occ(m.particles2.begin(), m.particles2.end());
    std::sort(occ.rbegin(), occ.rend());
    std::set<int> holes(m.holes2.begin(), m.holes2.end());
    int deepest = holes.empty() ? -1 : *holes.begin();
    /* take negative occupied sites down past the deepest hole plus padding */
    const int floor2 = deepest - 2 * (int(occ.size()) + 4);
    for (int s = -1; s >= floor2; s -= 2)
        if (!holes.count(s))
            occ.push_back(s);

    partition Y;
    for (int i = 1; i <= int(occ.size()); i++) {
        int twice = occ[i - 1] + 2 * i - 1 - 2 * Q;
        if (twice % 2 != 0)
            throw error(errc::domain, "maya_to_young: inconsistent half-integer sites");
        int yi = twice / 2;
        if (yi <= 0)
            break;
        Y.rows.push_back(yi);
    }
    return {Y, Q};
}

charge_sums charge_sum_identity(const maya_diagram& m)
{
    auto [Y, Q] = maya_to_young(m);
    charge_sums r{};
    for (int p : m.particles2)
        r.lhs2 += p;
    for (int h : m.holes2)
        r.lhs2 += -h;
    r.rhs2 = long(Q) * Q + 2L * Y.size();
    r.count_diff = long(m.particles2.size()) - long(m.holes2.size());
    return r;
}

int arm(const partition& Y, int i, int j)
{
    return Y.row(i) - j;
}

int leg(const partition& Y, int i, int j)
{
    return Y.transpose().row(j) - i;
}

cplx z_bif(cplx x, const partition& Yp, const partition& Y)
{
    const partition Yt = Y.transpose(), Ypt = Yp.transpose();
    cplx r = 1;
    for (int i = 1; i <= Y.length(); i++)
        for (int j = 1; j <= Y.row(i); j++)
            r *= x + double(1 + Yp.row(i) - j + Yt.row(j) - i);
    for (int i = 1; i <= Yp.length(); i++)
        for (int j = 1; j <= Yp.row(i); j++)
            r *= x - double(1 + Y.row(i) - j + Ypt.row(j) - i);
    return r;
}

cplx z_inst(const std::pair<cplx, cplx>& sigma, const std::pair<cplx, cplx>& mu,
            const partition_pair& Yv, const partition_pair& Wv)
{
    const cplx s[2] = {sigma.first, sigma.second};
    const cplx u[2] = {mu.first, mu.second};
    const partition* Y[2] = {&Yv.first, &Yv.second};
    const partition* W[2] = {&Wv.first, &Wv.second};
    cplx r = 1;
    for (int al = 0; al < 2; al++) {
        for (int be = 0; be < 2; be++) {
            cplx den = z_bif(s[al] - s[be], *Y[al], *Y[be]);
            if (den == 0.0 || !std::isfinite(std::abs(den))) {
                std::ostringstream os;
                os << "z_inst: vanishing denominator at (alpha,beta)=(" << al + 1 << ","
                   << be + 1 << "), sigma difference " << s[al] - s[be];
                throw error(errc::division_by_zero, os.str());
            }
            r *= z_bif(s[al] - u[be], *Y[al], *W[be]) / den;
        }
    }
    return r;
}

cplx z_pert_ratio(cplx a, std::pair<int, int> Qv, cplx m)
{
    const cplx av[2] = {a, -a};
    const int q[2] = {Qv.first, Qv.second};
    cplx r = 1;
    for (int al = 0; al < 2; al++) {
        for (int be = 0; be < 2; be++) {
            cplx d0 = av[al] - av[be];
            int n = q[al] - q[be];
            r *= barnes_g_ratio(d0 - m, n) / barnes_g_ratio(d0, n);
        }
    }
    return r;
}

std::vector<cplx> instanton_sectors(cplx a_shifted, cplx m, int max_boxes)
{
    const int w = max_boxes + 1;
    std::vector<cplx> table(std::size_t(w * w), 0.0);
    const auto parts = enumerate_partitions(max_boxes);
    const std::pair<cplx, cplx> sig{a_shifted, -a_shifted};
    const std::pair<cplx, cplx> mu{a_shifted + m, -a_shifted + m};

    std::vector<compensated_sum<double>> acc(table.size());
    for (const auto& Y1 : parts) {
        for (const auto& Y2 : parts) {
            int s1 = Y1.size(), s2 = Y2.size();
            if (s1 + s2 > max_boxes)
                continue;
            partition_pair Y{Y1, Y2};
            acc[std::size_t(s1 * w + s2)].add(z_inst(sig, mu, Y, Y));
        }
    }
    for (std::size_t i = 0; i < table.size(); i++)
        table[i] = acc[i].value();
    return table;
}

cplx instanton_sum(cplx a_shifted, cplx m, cplx tau, int max_boxes)
{
    const int w = max_boxes + 1;
    const auto table = instanton_sectors(a_shifted, m, max_boxes);
    const cplx q = std::exp(2.0 * PI * I * tau);
    compensated_sum<double> acc;
    for (int s1 = 0; s1 <= max_boxes; s1++)
        for (int s2 = 0; s1 + s2 <= max_boxes; s2++)
            acc.add(std::pow(q, s1 + s2) * table[std::size_t(s1 * w + s2)]);
    return acc.value();
}

namespace {

std::pair<int, int> split_charge(int n)
{
    int n1 = (n >= 0) ? (n + 1) / 2 : n / 2;
    return {n1, n1 - n};
}

cplx block_prefactor(cplx m, cplx tau)
{
    modular_parameter<double> mp(tau);
    cplx e = dedekind_eta(mp) * std::exp(-I * PI * tau / 12.0);
    return std::exp(-2.0 * m * m * std::log(e)) * std::exp(-I * PI * tau / 6.0);
}

} // namespace

cplx conformal_block(cplx a, int n, cplx m, cplx tau, const truncation& trunc)
{
    cplx ap = a + double(n) / 2.0;
    return block_prefactor(m, tau) * std::exp(2.0 * PI * I * tau * ap * ap)
           * z_pert_ratio(a, split_charge(n), m) * instanton_sum(ap, m, tau, trunc.max_boxes);
}

std::vector<sector_term> tau_comb_sectors(const block_params& p, cplx Q, const truncation& trunc)
{
    const int M = trunc.max_charge, nb = trunc.max_boxes, w = nb + 1;
    const modular_parameter<double> mp(p.tau);
    const cplx tau = p.tau, q = mp.q();
    const cplx rt = rho_tilde(p);

    cplx e = dedekind_eta(mp) * std::exp(-I * PI * tau / 12.0);
    cplx pref = std::exp((2.0 - 2.0 * p.m * p.m) * std::log(e))
                * std::exp(-2.0 * PI * I * (p.rho - tau / 2.0 * (p.m + 0.5) - p.m / 2.0))
                / (theta1_checked(Q + rt, mp) * theta1_checked(Q - rt, mp));

    std::vector<std::vector<cplx>> inst(std::size_t(2 * M + 1));
    std::vector<cplx> zpert(std::size_t(2 * M + 1));
    parallel_for(inst.size(), [&](std::size_t idx) {
        int n = int(idx) - M;
        inst[idx] = instanton_sectors(p.a + double(n) / 2.0, p.m, nb);
        zpert[idx] = z_pert_ratio(p.a, split_charge(n), p.m);
    });

    std::vector<sector_term> out;
    for (int n = -M; n <= M; n++) {
        const std::size_t idx = std::size_t(n + M);
        for (int k = -M; k <= M; k++) {
            if ((k - n) % 2 != 0)
                continue;
            const int n1 = (k + n) / 2, n2 = (k - n) / 2;
            cplx x1 = double(n1) + p.a, x2 = double(n2) - p.a;
            cplx ex = std::exp(2.0 * PI * I * tau * 0.5 * (x1 * x1 + x2 * x2))
                      * std::exp(2.0 * PI * I * (p.nu * double(n) - double(k) * (rt - tau / 2.0)));
            for (int s1 = 0; s1 <= nb; s1++)
                for (int s2 = 0; s1 + s2 <= nb; s2++)
                    out.push_back({n, k, s1, s2,
                                   pref * ex * std::pow(q, s1 + s2) * zpert[idx]
                                       * inst[idx][std::size_t(s1 * w + s2)]});
        }
    }
    return out;
}

cplx tau_combinatorial(const block_params& p, cplx Q, const truncation& trunc)
{
    compensated_sum<double> acc;
    for (const auto& s : tau_comb_sectors(p, Q, trunc))
        acc.add(s.value);
    return acc.value();
}

namespace {

/* B(a + n/2) for n = -nmax..nmax */
std::vector<cplx> block_table(const block_params& p, int nmax, const truncation& trunc)
{
    std::vector<cplx> B(std::size_t(2 * nmax + 1));
    parallel_for(B.size(), [&](std::size_t idx) {
        B[idx] = conformal_block(p.a, int(idx) - nmax, p.m, p.tau, trunc);
    });
    return B;
}

} // namespace

cplx fourier_blocks_series(const block_params& p, const truncation& trunc)
{
    const int M = trunc.max_charge;
    const auto B = block_table(p, M, trunc);
    compensated_sum<double> acc;
    for (int n = -M; n <= M; n++) {
        /* l = k + n/2 runs over Z + n/2 with |l| <= M + 1/2 */
        for (int k = -2 * M; k <= 2 * M; k++) {
            double l = k + n / 2.0;
            if (std::abs(l) > M + 0.5)
                continue;
            acc.add(std::exp(2.0 * PI * I * p.nu * double(n)) * std::exp(2.0 * PI * I * p.tau * l * l)
                    * std::exp(4.0 * PI * I * l * (p.rho + 0.5)) * B[std::size_t(n + M)]);
        }
    }
    return acc.value();
}

cplx tau_fourier_blocks(const block_params& p, cplx Q, const truncation& trunc)
{
    const modular_parameter<double> mp(p.tau);
    cplx eta = dedekind_eta(mp);
    return eta * eta / (theta1_checked(Q - p.rho, mp) * theta1_checked(Q + p.rho, mp))
           * fourier_blocks_series(p, trunc);
}

dual_partition dual_partition_functions(const block_params& p, const truncation& trunc)
{
    const int M = trunc.max_charge;
    const auto B = block_table(p, 2 * M + 1, trunc);
    compensated_sum<double> z0, zh;
    for (int j = -M; j <= M; j++) {
        z0.add(std::exp(4.0 * PI * I * p.nu * double(j)) * B[std::size_t(2 * j + 2 * M + 1)]);
        zh.add(std::exp(4.0 * PI * I * p.nu * (j + 0.5)) * B[std::size_t(2 * j + 1 + 2 * M + 1)]);
    }
    return {-z0.value(), zh.value()};
}

namespace {

struct cell_coords {
    double u, v;
};

cell_coords to_cell(cplx Q, cplx tau)
{
    double v = Q.imag() / tau.imag();
    return {Q.real() - v * tau.real(), v};
}

cplx reduce(cplx Q, cplx tau)
{
    auto c = to_cell(Q, tau);
    double v = c.v - std::round(c.v);
    double u = c.u - std::round(c.u);
    if (v <= -0.5) v += 1;
    if (u <= -0.5) u += 1;
    return u + v * tau;
}

} // namespace

cplx canonical_transcendent(cplx Q, cplx tau)
{
    cplx r = reduce(Q, tau);
    auto c = to_cell(r, tau);
    if (c.u < 0 || (c.u == 0 && c.v < 0))
        r = reduce(-r, tau);
    return r;
}

cplx invert_theta_ratio(cplx R, cplx tau, std::optional<cplx> guess)
{
    if (!std::isfinite(std::abs(R)))
        throw error(errc::degenerate_ratio, "theta ratio target is not finite");
    const modular_parameter<double> mp2(2.0 * tau);
    const bool flip = std::abs(R) > 1;
    auto f = [&](cplx Q, cplx* df) {
        cplx t3 = theta(3, 2.0 * Q, mp2), t2 = theta(2, 2.0 * Q, mp2);
        if (df) {
            cplx d3 = 2.0 * theta_dz(3, 1, 2.0 * Q, mp2), d2 = 2.0 * theta_dz(2, 1, 2.0 * Q, mp2);
            *df = flip ? d2 - d3 / R : d3 - R * d2;
        }
        return flip ? t2 - t3 / R : t3 - R * t2;
    };
    auto scaled = [&](cplx Q) {
        cplx t3 = theta(3, 2.0 * Q, mp2), t2 = theta(2, 2.0 * Q, mp2);
        return std::abs(f(Q, nullptr)) / (std::abs(t3) + std::abs(R) * std::abs(t2));
    };

    cplx Q0;
    if (guess) {
        Q0 = *guess;
    } else {
        const int G = 24;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < G; i++) {
            for (int j = 0; j < G; j++) {
                cplx Q = (-0.5 + (i + 0.5) / G) + (-0.5 + (j + 0.5) / G) * tau;
                double s = scaled(Q);
                if (s < best) {
                    best = s;
                    Q0 = Q;
                }
            }
        }
    }

    cplx Q = Q0;
    bool converged = false;
    for (int it = 0; it < 100; it++) {
        cplx df;
        cplx fv = f(Q, &df);
        if (df == 0.0)
            break;
        cplx step = fv / df;
        if (std::abs(step) > 0.25)
            step *= 0.25 / std::abs(step);
        Q -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(Q))) {
            converged = true;
            break;
        }
    }
    if (!converged && scaled(Q) > 1e-12)
        throw error(errc::root_not_found, "theta-ratio inversion did not converge");

    if (!guess)
        return canonical_transcendent(Q, tau);

    cplx best = Q;
    double dist = std::numeric_limits<double>::infinity();
    for (double s : {1.0, -1.0}) {
        auto c = to_cell(*guess - s * Q, tau);
        cplx cand = s * Q + std::round(c.u) + std::round(c.v) * tau;
        if (std::abs(cand - *guess) < dist) {
            dist = std::abs(cand - *guess);
            best = cand;
        }
    }
    return best;
}

cplx transcendent_from_blocks(const block_params& p, const truncation& trunc, std::optional<cplx> guess)
{
    auto z = dual_partition_functions(p, trunc);
    if (std::abs(z.z_half) < 1e-14 * std::abs(z.z0))
        throw error(errc::degenerate_ratio, "Z^D_{1/2} vanishes");
    return invert_theta_ratio(z.z0 / z.z_half, p.tau, guess);
}

} // namespace torustau

#include "torustau/fredholm.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <functional>

#include "torustau/parallel.hpp"

namespace torustau {

namespace {

const cplx I(0, 1);
const double PI = std::numbers::pi;

mat2c sigma1_conj(const mat2c& g)
{
    mat2c r;
    r << g(1, 1), g(1, 0), g(0, 1), g(0, 0);
    return r;
}

/* the hypergeometric Wronskian matrix, without prefactors */
mat2c hyp_matrix(cplx a, cplx m, cplx X)
{
    if (std::abs(a) < 1e-14)
        throw error(errc::pole, "trinion solution: a = 0 is resonant");
    mat2c g;
    g(0, 0) = hyp2f1(m, m - 2.0 * a, -2.0 * a, X);
    g(0, 1) = -m / (2.0 * a) * hyp2f1(1.0 + m, m - 2.0 * a, 1.0 - 2.0 * a, X);
    g(1, 0) = m * X / (2.0 * a + 1.0) * hyp2f1(1.0 + m, 1.0 + m + 2.0 * a, 2.0 + 2.0 * a, X);
    g(1, 1) = hyp2f1(m, 1.0 + m + 2.0 * a, 1.0 + 2.0 * a, X);
    return g;
}

mat2c inverse_checked(const mat2c& g)
{
    cplx det = g.determinant();
    if (!(std::abs(det) > 1e-300) || !std::isfinite(std::abs(det)))
        throw error(errc::singular_matrix, "trinion solution is not invertible");
    mat2c r;
    r << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
    return r / det;
}

mat2c diag_exp(std::pair<cplx, cplx> s, cplx z)
{
    mat2c d = mat2c::Zero();
    d(0, 0) = std::exp(2.0 * PI * I * s.first * z);
    d(1, 1) = std::exp(2.0 * PI * I * s.second * z);
    return d;
}

mat2c out_twist(const trinion_solution& s)
{
    mat2c d = mat2c::Zero();
    d(0, 0) = s.kappa * std::exp(2.0 * PI * I * s.nu);
    d(1, 1) = std::exp(-2.0 * PI * I * s.nu) / s.kappa;
    return d;
}

bool on_in_annulus(cplx z) { return std::abs(std::exp(-2.0 * PI * I * z)) < 1.0; }
bool on_out_annulus(cplx z) { return std::abs(std::exp(2.0 * PI * I * z)) < 1.0; }

/* Taylor coefficients Y^(n)(w)/n!, n = 0..4, from a circle of radius 0.02 */
template<typename F>
std::array<mat2c, 5> taylor_coefficients(F&& Y, cplx w)
{
    const int P = 16;
    const double r = 0.02;
    std::array<mat2c, 5> c;
    for (auto& x : c)
        x.setZero();
    for (int j = 0; j < P; j++) {
        cplx e = std::exp(2.0 * PI * I * double(j) / double(P));
        mat2c v = Y(w + r * e);
        for (int n = 0; n < 5; n++)
            c[std::size_t(n)] += v * std::pow(e, -n);
    }
    for (int n = 0; n < 5; n++)
        c[std::size_t(n)] /= double(P) * std::pow(r, n);
    return c;
}

/* (Y(z) Y(w)^-1 - 1)/(1 - e^{-2 pi i (z - w)}) for |z - w| small */
template<typename F>
mat2c diagonal_branch(F&& Y, cplx z, cplx w)
{
    auto c = taylor_coefficients(Y, w);
    mat2c Yinv = inverse_checked(Y(w));
    cplx delta = z - w;
    mat2c s = mat2c::Zero();
    cplx dn = 1;
    for (int n = 1; n < 5; n++) {
        s += c[std::size_t(n)] * dn;
        dn *= delta;
    }
    cplx x = 2.0 * PI * I * delta;
    cplx bern = (1.0 + x / 2.0 + x * x / 12.0 - x * x * x * x / 720.0) / (2.0 * PI * I);
    return s * Yinv * bern;
}

/* 2-D trapezoid coefficients of X^k W^l, k,l < K, for samples on radii (R1, R2) */
std::vector<mat2c> circle_coefficients(const std::vector<mat2c>& P, int N, int K, double R1, double R2)
{
    std::vector<cplx> roots(static_cast<std::size_t>(N));
    for (int j = 0; j < N; j++)
        roots[std::size_t(j)] = std::exp(-2.0 * PI * I * double(j) / double(N));

    std::vector<mat2c> partial(std::size_t(N * K), mat2c::Zero());
    parallel_for(std::size_t(N), [&](std::size_t i) {
        for (int l = 0; l < K; l++) {
            mat2c acc = mat2c::Zero();
            for (int j = 0; j < N; j++)
                acc += P[i * std::size_t(N) + std::size_t(j)] * roots[std::size_t((j * l) % N)];
            partial[i * std::size_t(K) + std::size_t(l)] = acc;
        }
    });

    std::vector<mat2c> C(std::size_t(K * K), mat2c::Zero());
    for (int k = 0; k < K; k++) {
        for (int l = 0; l < K; l++) {
            mat2c acc = mat2c::Zero();
            for (int i = 0; i < N; i++)
                acc += partial[std::size_t(i * K + l)] * roots[std::size_t((i * k) % N)];
            C[std::size_t(k * K + l)] = acc / (double(N) * double(N) * std::pow(R1, k) * std::pow(R2, l));
        }
    }
    return C;
}

struct raw_tables {
    std::vector<mat2c> a, b, c, d;  // (K x K), K = modes + 2
};

raw_tables raw_coefficients(const trinion_solution& s, int M, int N, double R1, double R2)
{
    const int K = M + 2;
    std::vector<cplx> t1(static_cast<std::size_t>(N)), t2(static_cast<std::size_t>(N));
    for (int j = 0; j < N; j++) {
        cplx e = std::exp(2.0 * PI * I * double(j) / double(N));
        t1[std::size_t(j)] = R1 * e;
        t2[std::size_t(j)] = R2 * e;
    }
    std::vector<mat2c> gx1(static_cast<std::size_t>(N)), gu1(static_cast<std::size_t>(N)), igx2(static_cast<std::size_t>(N)), igu2(static_cast<std::size_t>(N));
    parallel_for(std::size_t(N), [&](std::size_t j) {
        gx1[j] = trinion_in_stripped(s, t1[j]);
        gu1[j] = trinion_out_stripped(s, t1[j]);
        igx2[j] = inverse_checked(trinion_in_stripped(s, t2[j]));
        igu2[j] = inverse_checked(trinion_out_stripped(s, t2[j]));
    });

    const std::size_t NN = std::size_t(N) * std::size_t(N);
    std::vector<mat2c> pa(NN), pb(NN), pc(NN), pd(NN);
    const mat2c one = mat2c::Identity();
    parallel_for(std::size_t(N), [&](std::size_t i) {
        for (std::size_t j = 0; j < std::size_t(N); j++) {
            cplx x = t1[i], w = t2[j];
            std::size_t idx = i * std::size_t(N) + j;
            pa[idx] = (gx1[i] * igx2[j] - one) / (1.0 - x / w);
            pb[idx] = gx1[i] * igu2[j] / (1.0 - x * w);
            pc[idx] = gu1[i] * igx2[j] * (x * w / (1.0 - x * w));
            pd[idx] = (gu1[i] * igu2[j] - one) / (1.0 - w / x);
        }
    });
    return {circle_coefficients(pa, N, K, R1, R2), circle_coefficients(pb, N, K, R1, R2),
            circle_coefficients(pc, N, K, R1, R2), circle_coefficients(pd, N, K, R1, R2)};
}

void check_stall(const std::vector<mat2c>& lo, const std::vector<mat2c>& hi, int K,
                 double R1, double R2, double tol)
{
    for (int k = 0; k < K; k++) {
        for (int l = 0; l < K; l++) {
            double scale = std::pow(R1, k) * std::pow(R2, l);
            double diff = (lo[std::size_t(k * K + l)] - hi[std::size_t(k * K + l)]).cwiseAbs().maxCoeff();
            if (diff * scale > tol)
                throw error(errc::quadrature_stall, "doubling quad_points changed a kept coefficient");
        }
    }
}

cplx log_derivative(const std::function<cplx(cplx)>& f, cplx tau, double h)
{
    return 2.0 * PI * I * std::log(f(tau + h) / f(tau - h)) / (2.0 * h);
}

cplx theta_pair(cplx Q, cplx rho, cplx tau)
{
    const modular_parameter<double> mp(tau);
    return theta(1, Q - rho, mp) * theta(1, Q + rho, mp);
}

cplx eta_squared(cplx tau)
{
    cplx e = dedekind_eta(modular_parameter<double>(tau));
    return e * e;
}

} // namespace

std::pair<cplx, cplx> sigma_in(const trinion_solution& s)
{
    if (s.rank == 1)
        return {s.a - s.m / 2.0, -s.a - s.m / 2.0};
    return {s.a, -s.a};
}

std::pair<cplx, cplx> sigma_out(const trinion_solution& s)
{
    if (s.rank == 1)
        return {s.a + s.m / 2.0, -s.a + s.m / 2.0};
    return {s.a, -s.a};
}

mat2c trinion_in_stripped(const trinion_solution& s, cplx X)
{
    mat2c g = hyp_matrix(s.a, s.m, X);
    if (s.rank == 2)
        g *= std::pow(1.0 - X, s.m);
    return g;
}

mat2c trinion_out_stripped(const trinion_solution& s, cplx U)
{
    mat2c g = sigma1_conj(hyp_matrix(s.a, s.m, U));
    if (s.rank == 2)
        g *= std::pow(1.0 - U, s.m);
    return g;
}

mat2c trinion_in(const trinion_solution& s, cplx z)
{
    if (!on_in_annulus(z))
        throw error(errc::domain, "trinion_in: need |e^{-2 pi i z}| < 1");
    return diag_exp(sigma_in(s), z) * trinion_in_stripped(s, std::exp(-2.0 * PI * I * z));
}

mat2c trinion_out(const trinion_solution& s, cplx z)
{
    if (!on_out_annulus(z))
        throw error(errc::domain, "trinion_out: need |e^{2 pi i z}| < 1");
    return out_twist(s) * diag_exp(sigma_out(s), z) * trinion_out_stripped(s, std::exp(2.0 * PI * I * z));
}

mat2c kernel_eval(kernel_kind which, cplx z, cplx w, const trinion_solution& s)
{
    const mat2c one = mat2c::Identity();
    auto Yin = [&](cplx x) { return trinion_in(s, x); };
    auto Yout = [&](cplx x) { return trinion_out(s, x); };
    const cplx cauchy = 1.0 - std::exp(-2.0 * PI * I * (z - w));
    const bool near = std::abs(z - w) < 1e-4;

    switch (which) {
    case kernel_kind::a:
        if (near)
            return -diagonal_branch(Yin, z, w);
        return (one - Yin(z) * inverse_checked(Yin(w))) / cauchy;
    case kernel_kind::b:
        return Yin(z) * inverse_checked(Yout(w)) / cauchy;
    case kernel_kind::c:
        return -Yout(z) * inverse_checked(Yin(w)) / cauchy;
    case kernel_kind::d:
        if (near)
            return diagonal_branch(Yout, z, w);
        return (Yout(z) * inverse_checked(Yout(w)) - one) / cauchy;
    }
    throw error(errc::domain, "unknown kernel");
}

cplx connection_normalisation(cplx a, cplx m)
{
    return z_pert_ratio(a, {1, 0}, m);
}

coefficient_table fourier_coefficients(cplx a, cplx m, cplx nu, int rank, const fredholm_config& cfg)
{
    const int M = cfg.modes, N = cfg.quad_points;
    if (M < 0)
        throw error(errc::domain, "modes must be nonnegative");
    if (N < 4 * M || N < 8)
        throw error(errc::domain, "quad_points must be at least 4 modes (and 8)");
    if (rank != 1 && rank != 2)
        throw error(errc::domain, "rank must be 1 or 2");
    const double R1 = cfg.radius_first, R2 = cfg.radius_second;
    if (!(R1 > 0 && R1 < 1 && R2 > 0 && R2 < 1))
        throw error(errc::domain, "circle radii must lie in (0, 1)");

    trinion_solution s{a, m, nu, rank, 1.0};
    raw_tables raw = raw_coefficients(s, M, N, R1, R2);
    const int K = M + 2;
    if (cfg.verify_quadrature) {
        raw_tables fine = raw_coefficients(s, M, 2 * N, R1, R2);
        check_stall(raw.a, fine.a, K, R1, R2, cfg.quad_tol);
        check_stall(raw.b, fine.b, K, R1, R2, cfg.quad_tol);
        check_stall(raw.c, fine.c, K, R1, R2, cfg.quad_tol);
        check_stall(raw.d, fine.d, K, R1, R2, cfg.quad_tol);
    }

    const cplx zp = connection_normalisation(a, m);
    const std::array<cplx, 2> D{std::exp(2.0 * PI * I * nu) * zp, std::exp(-2.0 * PI * I * nu) / zp};

    coefficient_table t;
    t.modes = M;
    t.rank = rank;
    t.a = a;
    t.m = m;
    const int n = 2 * M;
    t.a_blk.resize(n, n);
    t.b_blk.resize(n, n);
    t.c_blk.resize(n, n);
    t.d_blk.resize(n, n);
    auto at = [K](const std::vector<mat2c>& v, int k, int l) -> const mat2c& {
        return v[std::size_t(k * K + l)];
    };
    for (int k = 0; k < M; k++) {
        for (int l = 0; l < M; l++) {
            for (int al = 0; al < 2; al++) {
                for (int be = 0; be < 2; be++) {
                    int i = 2 * k + al, j = 2 * l + be;
                    t.a_blk(i, j) = at(raw.a, k, l + 1)(al, be);
                    t.b_blk(i, j) = at(raw.b, k, l)(al, be) / D[std::size_t(be)];
                    t.c_blk(i, j) = D[std::size_t(al)] * at(raw.c, k + 1, l + 1)(al, be);
                    t.d_blk(i, j) = D[std::size_t(al)] * at(raw.d, k + 1, l)(al, be) / D[std::size_t(be)];
                }
            }
        }
    }
    return t;
}

truncated_operator assemble_K(const coefficient_table& t, cplx rho, cplx tau, std::optional<int> modes)
{
    const int M = modes.value_or(t.modes);
    if (M < 0 || M > t.modes)
        throw error(errc::domain, "assemble_K: modes exceed the coefficient table");
    trinion_solution s{t.a, t.m, 0.0, t.rank, 1.0};
    auto so = sigma_out(s);
    const std::array<cplx, 2> sig{so.first, so.second};

    const int n = 2 * M;
    dynamic_vector<cplx> w1(n), w2(n);
    for (int k = 0; k < M; k++) {
        double r = k + 0.5;
        for (int al = 0; al < 2; al++) {
            w1(2 * k + al) = std::exp(2.0 * PI * I * (-rho + tau * (0.5 + r + sig[std::size_t(al)])));
            w2(2 * k + al) = std::exp(2.0 * PI * I * (rho + tau * (r - 0.5 - sig[std::size_t(al)])));
        }
    }

    truncated_operator K;
    K.modes = M;
    K.matrix.resize(2 * n, 2 * n);
    auto c = t.c_blk.topLeftCorner(n, n);
    auto d = t.d_blk.topLeftCorner(n, n);
    auto a = t.a_blk.topLeftCorner(n, n);
    auto b = t.b_blk.topLeftCorner(n, n);
    K.matrix.topLeftCorner(n, n) = w1.asDiagonal() * c;
    K.matrix.topRightCorner(n, n) = w1.asDiagonal() * d * w2.asDiagonal();
    K.matrix.bottomLeftCorner(n, n) = -a;
    K.matrix.bottomRightCorner(n, n) = b * w2.asDiagonal();
    return K;
}

cplx det_one_minus_K(const truncated_operator& K)
{
    const auto n = K.matrix.rows();
    if (n == 0)
        return 1.0;
    dynamic_matrix<cplx> A = dynamic_matrix<cplx>::Identity(n, n) - K.matrix;
    return Eigen::PartialPivLU<dynamic_matrix<cplx>>(A).determinant();
}

determinant_value fredholm_determinant(const coefficient_table& t, cplx rho, cplx tau)
{
    cplx full = det_one_minus_K(assemble_K(t, rho, tau));
    cplx half = det_one_minus_K(assemble_K(t, rho, tau, t.modes / 2));
    double conv = std::abs(full) > 0 ? std::abs(full - half) / std::abs(full)
                                     : std::numeric_limits<double>::infinity();
    return {full, conv};
}

cplx det_theta_ratio(const coefficient_table& t, cplx tau)
{
    cplx num = det_one_minus_K(assemble_K(t, 0.25 + tau / 2.0, tau));
    cplx den = det_one_minus_K(assemble_K(t, 0.25, tau));
    if (!(std::abs(den) > 1e-14 * std::max(1.0, std::abs(num))))
        throw error(errc::degenerate_ratio, "det(1-K) vanishes at rho = 1/4");
    return I * std::exp(-PI * I * tau / 2.0) * num / den;
}

cplx transcendent_from_det(const coefficient_table& t, cplx tau, std::optional<cplx> guess)
{
    return invert_theta_ratio(det_theta_ratio(t, tau), tau, guess);
}

theorem1_report theorem1_residual(const block_params& p, const fredholm_config& cfg,
                                  const truncation& trunc, double dtau)
{
    if (!(dtau > 0) || p.tau.imag() - dtau <= 0)
        throw error(errc::domain, "theorem1_residual: bad dtau");
    coefficient_table t = fourier_coefficients(p.a, p.m, p.nu, 2, cfg);

    const cplx Qd0 = transcendent_from_det(t, p.tau);
    const cplx Qb0 = transcendent_from_blocks(p, trunc, Qd0);
    auto at_tau = [&](cplx tau) {
        block_params q = p;
        q.tau = tau;
        return q;
    };
    auto Qd = [&](cplx tau) { return transcendent_from_det(t, tau, Qd0); };
    auto Qb = [&](cplx tau) { return transcendent_from_blocks(at_tau(tau), trunc, Qb0); };

    const cplx rhoT = theorem1_theta_twist(p.rho);
    cplx lhs = log_derivative([&](cplx tau) { return det_one_minus_K(assemble_K(t, p.rho, tau)); },
                              p.tau, dtau);
    cplx dcomb = log_derivative([&](cplx tau) { return tau_combinatorial(at_tau(tau), Qb(tau), trunc); },
                                p.tau, dtau);
    cplx dtheta = log_derivative([&](cplx tau) { return theta_pair(Qd(tau), rhoT, tau) / eta_squared(tau); },
                                 p.tau, dtau);
    const cplx tpi = 2.0 * PI * I;
    cplx rhs = dcomb - tpi * tpi * p.a * p.a - tpi * tpi / 6.0 + dtheta;
    return {lhs, rhs, std::abs(lhs - rhs), Qd0, Qb0};
}

gauge_report gauge_residual(const block_params& p, const fredholm_config& cfg, double dtau, rank1_twist twist)
{
    if (!(dtau > 0) || p.tau.imag() - dtau <= 0)
        throw error(errc::domain, "gauge_residual: bad dtau");
    coefficient_table t2 = fourier_coefficients(p.a, p.m, p.nu, 2, cfg);
    coefficient_table t1 = fourier_coefficients(p.a, p.m, p.nu, 1, cfg);

    const cplx Qd0 = transcendent_from_det(t2, p.tau);
    auto Qd = [&](cplx tau) { return transcendent_from_det(t2, tau, Qd0); };
    auto rho_t = [&](cplx tau) { return p.rho - p.m * (tau + 1.0) / 2.0; };
    auto rho_K = [&](cplx tau) {
        return twist == rank1_twist::tilde ? rho_t(tau) : p.rho - p.m / 2.0;
    };

    const cplx tpi = 2.0 * PI * I;
    const cplx a2 = p.a * p.a, m2 = p.m * p.m;
    cplx T = log_derivative([&](cplx tau) { return det_one_minus_K(assemble_K(t2, p.rho, tau)); },
                            p.tau, dtau)
           + tpi * tpi * (a2 + 1.0 / 6.0)
           - log_derivative([&](cplx tau) {
                 return theta_pair(Qd(tau), theorem1_theta_twist(p.rho), tau) / eta_squared(tau);
             }, p.tau, dtau);
    cplx Tt = log_derivative([&](cplx tau) { return det_one_minus_K(assemble_K(t1, rho_K(tau), tau)); },
                             p.tau, dtau)
            + tpi * tpi * (a2 + m2 / 4.0 + 1.0 / 6.0)
            + log_derivative([&](cplx tau) {
                  return eta_squared(tau) / theta_pair(Qd(tau), theorem1_theta_twist(rho_t(tau)), tau);
              }, p.tau, dtau);
    const modular_parameter<double> mp(p.tau);
    cplx corr = -2.0 * m2 * tpi * (dlog_eta(mp) + I * PI / 6.0);
    cplx rhs = Tt + corr;
    return {T, rhs, std::abs(T - rhs)};
}

cplx trinion_minor(const coefficient_table& t, const partition_pair& Y, std::pair<int, int> Q)
{
    std::vector<int> J, Ih;
    const std::array<std::pair<const partition*, int>, 2> sec{{{&Y.first, Q.first}, {&Y.second, Q.second}}};
    for (int al = 0; al < 2; al++) {
        maya_diagram md = young_to_maya(*sec[std::size_t(al)].first, sec[std::size_t(al)].second);
        for (int p2 : md.particles2)
            J.push_back(2 * ((p2 - 1) / 2) + al);
        for (int h2 : md.holes2)
            Ih.push_back(2 * ((-h2 - 1) / 2) + al);
    }
    const int n = 2 * t.modes;
    for (int j : J)
        if (j >= n)
            throw error(errc::domain, "trinion_minor: sector exceeds the table modes");
    for (int i : Ih)
        if (i >= n)
            throw error(errc::domain, "trinion_minor: sector exceeds the table modes");

    const int nj = int(J.size()), ni = int(Ih.size());
    dynamic_matrix<cplx> mx(nj + ni, nj + ni);
    for (int r = 0; r < nj; r++) {
        for (int c = 0; c < nj; c++)
            mx(r, c) = t.c_blk(J[std::size_t(r)], J[std::size_t(c)]);
        for (int c = 0; c < ni; c++)
            mx(r, nj + c) = t.d_blk(J[std::size_t(r)], Ih[std::size_t(c)]);
    }
    for (int r = 0; r < ni; r++) {
        for (int c = 0; c < nj; c++)
            mx(nj + r, c) = -t.a_blk(Ih[std::size_t(r)], J[std::size_t(c)]);
        for (int c = 0; c < ni; c++)
            mx(nj + r, nj + c) = t.b_blk(Ih[std::size_t(r)], Ih[std::size_t(c)]);
    }
    if (nj + ni == 0)
        return 1.0;
    return Eigen::PartialPivLU<dynamic_matrix<cplx>>(mx).determinant();
}

cplx minor_expansion_sum(const block_params& p, const truncation& trunc)
{
    const auto parts = enumerate_partitions(trunc.max_boxes);
    const std::array<cplx, 2> sig{p.a - p.m / 2.0, -p.a - p.m / 2.0};
    const int C = trunc.max_charge;
    const int side = 2 * C + 1;
    std::vector<cplx> slots(std::size_t(side * side));

    parallel_for(slots.size(), [&](std::size_t idx) {
        int Q1 = int(idx) / side - C, Q2 = int(idx) % side - C;
        int Q = Q1 + Q2;
        cplx ex = 0.5 * ((double(Q1) + sig[0]) * (double(Q1) + sig[0]) + (double(Q2) + sig[1]) * (double(Q2) + sig[1])
                         - sig[0] * sig[0] - sig[1] * sig[1]);
        cplx pre = ((Q % 2 == 0) ? 1.0 : -1.0)
                 * std::exp(2.0 * PI * I * (p.tau * ex - (p.rho - p.tau / 2.0 - p.m * p.tau) * double(Q)
                                            + p.nu * double(Q1 - Q2)))
                 * z_pert_ratio(p.a, {Q1, Q2}, p.m);
        std::pair<cplx, cplx> sigma{p.a + double(Q1), -p.a + double(Q2)};
        std::pair<cplx, cplx> mu{sigma.first + p.m, sigma.second + p.m};
        compensated_sum<double> acc;
        for (const auto& Y1 : parts) {
            for (const auto& Y2 : parts) {
                int nb = Y1.size() + Y2.size();
                if (nb > trunc.max_boxes)
                    continue;
                partition_pair Yv{Y1, Y2};
                acc.add(std::exp(2.0 * PI * I * p.tau * double(nb)) * z_inst(sigma, mu, Yv, Yv));
            }
        }
        slots[idx] = pre * acc.value();
    });

    compensated_sum<double> total;
    for (const auto& s : slots)
        total.add(s);
    return total.value();
}

mat2c xi_kernel_eval(const xi_kernel& k, cplx z, cplx w)
{
    const modular_parameter<double> mp(k.tau);
    const double eps = 1e-12;
    if (lattice_distance(z - w, mp) < eps)
        throw error(errc::lattice_point, "xi kernel: z - w on the lattice");
    if (lattice_distance(k.Q - k.rho, mp) < eps || lattice_distance(k.Q + k.rho, mp) < eps)
        throw error(errc::lattice_point, "xi kernel: Q +- rho on the lattice");
    const cplx d1 = theta1_z_derivative(1, cplx(0), mp);
    const cplx t = theta(1, z - w, mp);
    mat2c r = mat2c::Zero();
    r(0, 0) = theta(1, z - w + k.Q - k.rho, mp) * d1 / (t * theta(1, k.Q - k.rho, mp));
    r(1, 1) = -theta(1, z - w - k.Q - k.rho, mp) * d1 / (t * theta(1, k.Q + k.rho, mp));
    return r;
}

void write_ttk1(const std::string& path, const truncated_operator& K)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw error(errc::domain, "cannot open " + path);
    auto put = [&](std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; i++)
            out.put(char((v >> (8 * i)) & 0xff));
    };
    out.write("TTK1", 4);
    put(std::uint32_t(K.modes), 4);
    put(std::uint32_t(K.matrix.rows()), 4);
    for (Eigen::Index i = 0; i < K.matrix.rows(); i++) {
        for (Eigen::Index j = 0; j < K.matrix.cols(); j++) {
            put(std::bit_cast<std::uint64_t>(K.matrix(i, j).real()), 8);
            put(std::bit_cast<std::uint64_t>(K.matrix(i, j).imag()), 8);
        }
    }
    if (!out)
        throw error(errc::domain, "write failed for " + path);
}

} // namespace torustau

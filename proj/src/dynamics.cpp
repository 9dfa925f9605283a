#include "torustau/dynamics.hpp"

#include <algorithm>
#include <array>

namespace torustau {

namespace {

const cplx I(0, 1);
const double PI = std::numbers::pi;

void check_point(cplx z, const modular_parameter<double>& mp, const char* what)
{
    if (lattice_distance(z, mp) < 1e-12)
        throw error(errc::lattice_point, what);
}

using vec2 = std::array<cplx, 2>;

vec2 flow(cplx tau, const vec2& y, cplx m)
{
    const modular_parameter<double> mp(tau);
    if (lattice_distance(2.0 * y[0], mp) < 1e-6)
        throw error(errc::singularity_hit, "2Q reached the period lattice");
    auto wp = weierstrass_p(2.0 * y[0], mp);
    return {y[1] / (2.0 * PI * I), m * m * wp.p_prime / (2.0 * PI * I)};
}

vec2 axpy(const vec2& y, cplx h, std::initializer_list<std::pair<double, const vec2*>> terms)
{
    vec2 r = y;
    for (auto [c, k] : terms) {
        r[0] += h * c * (*k)[0];
        r[1] += h * c * (*k)[1];
    }
    return r;
}

} // namespace

cplx lax_x(cplx xi, cplx z, cplx tau)
{
    const modular_parameter<double> mp(tau);
    check_point(z, mp, "lax_x: z on the lattice");
    check_point(xi, mp, "lax_x: xi on the lattice");
    return theta(1, z + xi, mp) * theta1_z_derivative(1, cplx(0), mp) / (theta(1, z, mp) * theta(1, xi, mp));
}

cplx lax_y(cplx xi, cplx z, cplx tau)
{
    const modular_parameter<double> mp(tau);
    check_point(z + xi, mp, "lax_y: z + xi on the lattice");
    auto dlog = [&](cplx u) { return theta1_z_derivative(1, u, mp) / theta(1, u, mp); };
    return lax_x(xi, z, tau) * (dlog(z + xi) - dlog(xi));
}

mat2c lax_L1(cplx z, const dynamic_state& s, cplx m)
{
    mat2c L;
    L << s.P, m * lax_x(2.0 * s.Q, z, s.tau), m * lax_x(-2.0 * s.Q, z, s.tau), -s.P;
    return L;
}

mat2c lax_L2(cplx z, const dynamic_state& s, cplx m)
{
    mat2c L;
    L << 0.0, m * lax_y(2.0 * s.Q, z, s.tau), m * lax_y(-2.0 * s.Q, z, s.tau), 0.0;
    return L;
}

cplx hamiltonian(const dynamic_state& s, cplx m)
{
    const modular_parameter<double> mp(s.tau);
    auto wp = weierstrass_p(2.0 * s.Q, mp);
    return s.P * s.P - m * m * wp.p + 4.0 * PI * I * m * m * dlog_eta(mp);
}

cplx hamiltonian_quadrature(const dynamic_state& s, cplx m, double height, int points)
{
    compensated_sum<double> acc;
    for (int j = 0; j < points; j++) {
        cplx z(double(j) / double(points), height);
        mat2c L = lax_L1(z, s, m);
        acc.add((L * L).trace());
    }
    return 0.5 * acc.value() / double(points);
}

dynamic_state propagate(const dynamic_state& s, cplx m, cplx tau_end, double tol)
{
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const cplx span = tau_end - s.tau;
    if (span == 0.0)
        return s;
    auto tau_at = [&](double u) { return s.tau + u * span; };
    auto f = [&](double u, const vec2& y) {
        vec2 d = flow(tau_at(u), y, m);
        return vec2{span * d[0], span * d[1]};
    };

    vec2 y{s.Q, s.P};
    double u = 0, h = 0.05;
    vec2 k1 = f(0, y);
    for (int iter = 0; iter < 200000; iter++) {
        if (u >= 1)
            break;
        h = std::min(h, 1 - u);
        const cplx hc = h;
        vec2 k2 = f(u + c2 * h, axpy(y, hc, {{a21, &k1}}));
        vec2 k3 = f(u + c3 * h, axpy(y, hc, {{a31, &k1}, {a32, &k2}}));
        vec2 k4 = f(u + c4 * h, axpy(y, hc, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        vec2 k5 = f(u + c5 * h, axpy(y, hc, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        vec2 k6 = f(u + h, axpy(y, hc, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        vec2 y5 = axpy(y, hc, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        vec2 k7 = f(u + h, y5);
        vec2 err = axpy(vec2{0.0, 0.0}, hc, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
        double en = 0;
        for (int i = 0; i < 2; i++)
            en = std::max(en, std::abs(err[std::size_t(i)]) / (tol * (1 + std::abs(y5[std::size_t(i)]))));
        if (en <= 1) {
            u += h;
            y = y5;
            k1 = k7;
        }
        double fac = en > 0 ? 0.9 * std::pow(en, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
        if (h < 1e-14)
            throw error(errc::non_convergent, "integrate_cm: step size underflow");
    }
    if (u < 1)
        throw error(errc::non_convergent, "integrate_cm: too many steps");
    return {y[0], y[1], tau_end};
}

std::vector<dynamic_state> integrate_cm(const dynamic_state& initial, cplx m, const path_spec& path, double tol)
{
    if (path.steps < 1)
        throw error(errc::domain, "integrate_cm: need at least one step");
    if (path.tau_start.imag() <= 0 || path.tau_end.imag() <= 0)
        throw error(errc::domain, "integrate_cm: path leaves the upper half plane");
    if (std::abs(initial.tau - path.tau_start) > 1e-14)
        throw error(errc::domain, "integrate_cm: initial state is not at tau_start");
    std::vector<dynamic_state> out{initial};
    const cplx step = (path.tau_end - path.tau_start) / double(path.steps);
    for (int j = 1; j <= path.steps; j++)
        out.push_back(propagate(out.back(), m, path.tau_start + double(j) * step, tol));
    return out;
}

cplx shoot_momentum(cplx Q0, cplx Q1, cplx tau0, cplx tau1, cplx m, cplx P_guess, double tol)
{
    auto miss = [&](cplx P) { return propagate({Q0, P, tau0}, m, tau1, tol).Q - Q1; };
    cplx P = P_guess;
    for (int it = 0; it < 50; it++) {
        cplx r = miss(P);
        const double h = 1e-6 * std::max(1.0, std::abs(P));
        cplx J = (miss(P + h) - miss(P - h)) / (2 * h);
        cplx step = r / J;
        P -= step;
        if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(P)))
            return P;
    }
    throw error(errc::root_not_found, "shoot_momentum did not converge");
}

cplx tau_from_hamiltonian(const std::vector<dynamic_state>& states, cplx m)
{
    const int n = int(states.size()) - 1;
    if (n < 1)
        throw error(errc::domain, "tau_from_hamiltonian: need two states");
    std::vector<cplx> H;
    for (const auto& s : states)
        H.push_back(hamiltonian(s, m));
    const cplx h = (states.back().tau - states.front().tau) / double(n);

    compensated_sum<double> acc;
    int simpson_end = n;
    if (n == 1) {
        acc.add(h / 2.0 * (H[0] + H[1]));
        simpson_end = 0;
    } else if (n % 2 == 1) {
        simpson_end = n - 3;
        acc.add(3.0 * h / 8.0 * (H[std::size_t(n - 3)] + 3.0 * H[std::size_t(n - 2)]
                                 + 3.0 * H[std::size_t(n - 1)] + H[std::size_t(n)]));
    }
    for (int j = 0; j + 2 <= simpson_end; j += 2)
        acc.add(h / 3.0 * (H[std::size_t(j)] + 4.0 * H[std::size_t(j + 1)] + H[std::size_t(j + 2)]));
    return acc.value() / (2.0 * PI * I);
}

cplx hamiltonian_flow_residual(const dynamic_state& s, cplx m, double dtau)
{
    dynamic_state fwd = propagate(s, m, s.tau + dtau, 1e-14);
    dynamic_state bwd = propagate(s, m, s.tau - dtau, 1e-14);
    cplx along = (hamiltonian(fwd, m) - hamiltonian(bwd, m)) / (2 * dtau);
    dynamic_state fp = s, fm = s;
    fp.tau += dtau;
    fm.tau -= dtau;
    cplx partial = (hamiltonian(fp, m) - hamiltonian(fm, m)) / (2 * dtau);
    return along - partial;
}

double zero_curvature_residual(const dynamic_state& s, cplx m, const std::vector<cplx>& z_grid,
                               double dtau, double dz)
{
    dynamic_state fwd = propagate(s, m, s.tau + dtau, 1e-14);
    dynamic_state bwd = propagate(s, m, s.tau - dtau, 1e-14);
    double worst = 0;
    for (cplx z : z_grid) {
        mat2c dL1 = (lax_L1(z, fwd, m) - lax_L1(z, bwd, m)) * (2.0 * PI * I / (2 * dtau));
        mat2c dL2 = (lax_L2(z + dz, s, m) - lax_L2(z - dz, s, m)) / (2 * dz);
        mat2c A = lax_L1(z, s, m), B = lax_L2(z, s, m);
        mat2c r = dL1 - dL2 - (A * B - B * A);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

monodromy_set monodromy_matrices(cplx a, cplx m, cplx nu)
{
    const cplx s2a = std::sin(2.0 * PI * a);
    if (std::abs(s2a) < 1e-12)
        throw error(errc::resonant_a, "sin(2 pi a) vanishes");
    monodromy_set r;
    r.MA = mat2c::Zero();
    r.MA(0, 0) = std::exp(2.0 * PI * I * a);
    r.MA(1, 1) = std::exp(-2.0 * PI * I * a);
    const cplx sm = std::sin(PI * m);
    r.MB << std::sin(PI * (2.0 * a - m)) / s2a * std::exp(-I * nu / 2.0), sm / s2a,
            -sm / s2a, std::sin(PI * (2.0 * a + m)) / s2a * std::exp(I * nu / 2.0);
    r.M0 = r.MA.inverse() * r.MB.inverse() * r.MA * r.MB;
    return r;
}

gauge_factor_set gauge_factors(cplx m, cplx tau, cplx z)
{
    return {std::exp(I * PI * m), std::exp(-2.0 * PI * I * (z + (tau + 1.0) / 2.0) * m),
            std::exp(-2.0 * PI * I * m), -m * (tau + 1.0) / 2.0};
}

double rank1_residue_check(const dynamic_state& s, cplx m)
{
    const cplx z = 1e-4;
    const modular_parameter<double> mp(s.tau);
    auto zL = [&](cplx x) {
        return x * (lax_L1(x, s, m) - m * theta1_z_derivative(1, x, mp) / theta(1, x, mp) * mat2c::Identity());
    };
    /* symmetric average removes the O(z) part of z L1~ */
    mat2c res = (zL(z) + zL(-z)) / 2.0;
    mat2c target;
    target << -m, m, m, -m;
    return (res - target).cwiseAbs().maxCoeff();
}

} // namespace torustau

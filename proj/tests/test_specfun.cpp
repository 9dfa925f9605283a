#include "doctest.h"

#include "support.hpp"
#include "torustau/specfun.hpp"

using namespace torustau;
using torustau::test::rel_diff;
using torustau::test::sampler;

namespace {

const double pi = std::numbers::pi;

/* plain partial sum over |n| <= 60 of exp(i pi tau nu^2 + 2 pi i z nu), nu in c + Z */
cplx naive_theta(int kind, cplx z, cplx tau)
{
    const cplx ipi(0, pi);
    double c = (kind == 1 || kind == 2) ? 0.5 : 0.0;
    cplx zs = (kind == 1 || kind == 4) ? z + 0.5 : z;
    cplx s = 0;
    for (int n = -60; n <= 60; n++) {
        double nu = c + n;
        s += std::exp(ipi * tau * (nu * nu) + 2.0 * ipi * zs * nu);
    }
    return kind == 1 ? -s : s;
}

cplx euler_eta(cplx tau, int terms)
{
    cplx q = std::exp(two_pi_i<double> * tau), prod = 1, qn = 1;
    for (int n = 1; n <= terms; n++) {
        qn *= q;
        prod *= 1.0 - qn;
    }
    return std::exp(two_pi_i<double> * tau / 24.0) * prod;
}

} // namespace

TEST_CASE("theta agrees with a brute-force partial sum")
{
    sampler s(11);
    for (int i = 0; i < 50; i++) {
        cplx tau = s.upper(0.5, 1.5), z = s.disk(0.6);
        modular_parameter<double> mp(tau);
        for (int k = 1; k <= 4; k++)
            CHECK(rel_diff(theta(k, z, mp), naive_theta(k, z, tau)) < 1e-12);
    }
}

TEST_CASE("theta1 is odd and vanishes at the origin")
{
    modular_parameter<double> mp(cplx(0, 1));
    CHECK(std::abs(theta(1, cplx(0), mp)) < 1e-15);
    cplx z(0.21, -0.13);
    CHECK(rel_diff(theta(1, -z, mp), -theta(1, z, mp)) < 1e-14);
    CHECK(std::abs(theta1_z_derivative(2, cplx(0), mp)) < 1e-12);
}

TEST_CASE("theta1 quasi-periodicity on the lattice")
{
    sampler s(12);
    const cplx ipi(0, pi);
    for (int i = 0; i < 200; i++) {
        cplx tau = s.upper(0.5, 1.5), z = s.disk(0.5);
        int m = int(s.uniform(-2, 3)), n = int(s.uniform(-1, 2));
        modular_parameter<double> mp(tau);
        double sign = ((m + n) % 2 == 0) ? 1 : -1;
        cplx lhs = theta(1, z + double(m) + double(n) * tau, mp);
        cplx rhs = sign * std::exp(-ipi * tau * double(n * n) - 2.0 * ipi * double(n) * z) * theta(1, z, mp);
        CHECK(rel_diff(lhs, rhs) < 1e-10);
    }
    modular_parameter<double> mp(cplx(0.1, 0.9));
    cplx z(0.17, 0.05);
    CHECK(rel_diff(theta(1, z + 1.0, mp), -theta(1, z, mp)) < 1e-13);
}

TEST_CASE("product identity for theta1 from the doubled-period thetas")
{
    auto residual = [](cplx x, cplx y, cplx tau) {
        modular_parameter<double> mp(tau), mp2(2.0 * tau);
        cplx lhs = theta(3, 2.0 * x, mp2) * theta(2, 2.0 * y, mp2) - theta(2, 2.0 * x, mp2) * theta(3, 2.0 * y, mp2);
        cplx rhs = theta(1, x - y, mp) * theta(1, x + y, mp);
        return rel_diff(lhs, rhs);
    };
    CHECK(residual({0.3, 0.1}, 0.12, {0, 0.8}) < 1e-12);
    sampler s(13);
    for (int i = 0; i < 200; i++)
        CHECK(residual(s.disk(0.5), s.disk(0.5), s.upper(0.5, 1.5)) < 1e-10);
}

TEST_CASE("heat equation 4 pi i d_tau theta = d_z^2 theta")
{
    sampler s(14);
    const double h = 1e-5;
    for (int i = 0; i < 50; i++) {
        cplx tau = s.upper(0.6, 1.4), z = s.disk(0.4);
        modular_parameter<double> mp(tau), up(tau + h), dn(tau - h);
        for (int k = 1; k <= 4; k++) {
            cplx dtau = (theta(k, z, up) - theta(k, z, dn)) / (2 * h);
            cplx dzz = theta_dz(k, 2, z, mp);
            double scale = std::abs(theta(k, z, mp)) + std::abs(dzz);
            CHECK(std::abs(4.0 * cplx(0, pi) * dtau - dzz) / scale < 1e-6);
        }
    }
}

TEST_CASE("term-wise derivatives match central differences")
{
    modular_parameter<double> mp(cplx(0, 0.7));
    cplx z(0.2, 0.3);
    const double h = 1e-5;
    for (int order = 1; order <= 3; order++) {
        cplx fd = (theta_dz(1, order - 1, z + h, mp) - theta_dz(1, order - 1, z - h, mp)) / (2 * h);
        CHECK(rel_diff(theta1_z_derivative(order, z, mp), fd) < 1e-8);
    }
}

TEST_CASE("eta: closed form at i, Euler product, and theta1'(0) = 2 pi eta^3")
{
    modular_parameter<double> mi(cplx(0, 1));
    double closed = 3.6256099082219083119 / (2 * std::pow(pi, 0.75));
    CHECK(rel_diff(dedekind_eta(mi), closed) < 1e-12);

    modular_parameter<double> m5(cplx(0, 5));
    cplx e5 = dedekind_eta(m5);
    CHECK(std::abs(e5.imag()) < 1e-15);
    CHECK(e5.real() > 0);
    CHECK(rel_diff(e5, euler_eta(cplx(0, 5), 50)) < 1e-14);

    sampler s(15);
    for (int i = 0; i < 200; i++) {
        cplx tau = s.upper(0.5, 1.5);
        modular_parameter<double> mp(tau);
        cplx eta = dedekind_eta(mp);
        CHECK(rel_diff(eta, euler_eta(tau, 400)) < 1e-12);
        CHECK(rel_diff(theta1_z_derivative(1, cplx(0), mp), 2 * pi * eta * eta * eta) < 1e-10);
    }
}

TEST_CASE("dlog_eta matches a central difference of log eta")
{
    cplx tau(0.1, 0.9);
    const double h = 1e-5;
    modular_parameter<double> mp(tau), up(tau + h), dn(tau - h);
    cplx fd = (std::log(dedekind_eta(up)) - std::log(dedekind_eta(dn))) / (2 * h);
    CHECK(rel_diff(dlog_eta(mp), fd) < 1e-8);
}

TEST_CASE("weierstrass p: parity, Laurent tail, periodicity")
{
    modular_parameter<double> mp(cplx(0, 0.8));
    cplx z(0.23, 0.11);
    auto w = weierstrass_p(z, mp), wm = weierstrass_p(-z, mp);
    CHECK(rel_diff(w.p, wm.p) < 1e-13);
    CHECK(rel_diff(w.p_prime, -wm.p_prime) < 1e-13);

    cplx small(1e-3, 0);
    CHECK(std::abs(weierstrass_p(small, mp).p - 1.0 / (small * small)) < 1e-4);

    sampler s(16);
    for (int i = 0; i < 50; i++) {
        cplx tau = s.upper(0.5, 1.5), x = s.disk(0.45);
        if (std::abs(x) < 0.05)
            continue;
        modular_parameter<double> m(tau);
        cplx p0 = weierstrass_p(x, m).p;
        CHECK(rel_diff(weierstrass_p(x + 1.0, m).p, p0) < 1e-10);
        CHECK(rel_diff(weierstrass_p(x + tau, m).p, p0) < 1e-10);
    }
}

TEST_CASE("weierstrass differential equation with Eisenstein invariants")
{
    sampler s(17);
    for (int i = 0; i < 200; i++) {
        cplx tau = s.upper(0.6, 1.4), z = s.disk(0.45);
        if (std::abs(z) < 0.05)
            continue;
        modular_parameter<double> mp(tau);
        auto [g2, g3] = weierstrass_invariants(mp);
        auto w = weierstrass_p(z, mp);
        cplx rhs = 4.0 * w.p * w.p * w.p - g2 * w.p - g3;
        CHECK(rel_diff(w.p_prime * w.p_prime, rhs) < 1e-10);
    }
}

TEST_CASE("g2 from the Eisenstein series agrees with a direct lattice sum")
{
    cplx tau(0, 0.7);
    modular_parameter<double> mp(tau);
    cplx lattice = 0;
    const int N = 300;
    for (int n = -N; n <= N; n++)
        for (int m = -N; m <= N; m++)
            if (m != 0 || n != 0)
                lattice += std::pow(double(m) + double(n) * tau, -4);
    CHECK(rel_diff(weierstrass_invariants(mp)[0], 60.0 * lattice) < 1e-4);
}

TEST_CASE("lattice points are rejected")
{
    modular_parameter<double> mp(cplx(0.1, 0.9));
    CHECK_THROWS_AS(weierstrass_p(cplx(1, 0) + mp.tau(), mp), error);
    try {
        weierstrass_p(cplx(0), mp);
    } catch (const error& e) {
        CHECK(e.code() == errc::lattice_point);
    }
}

TEST_CASE("modular parameter requires the upper half plane")
{
    CHECK_THROWS_AS(modular_parameter<double>(cplx(0.2, 0)), error);
    CHECK_THROWS_AS(modular_parameter<double>(cplx(0.2, -1)), error);
    modular_parameter<double> mp(cplx(0.1, 0.9));
    CHECK(std::abs(mp.q() - mp.q_half() * mp.q_half()) < 1e-16);
    CHECK(std::abs(mp.q()) < 1);
}

TEST_CASE("gamma special values and recurrence")
{
    CHECK(rel_diff(gamma(cplx(5)), 24.0) < 1e-13);
    CHECK(rel_diff(gamma(cplx(0.5)), std::sqrt(pi)) < 1e-13);
    CHECK(rel_diff(gamma(cplx(0.25)), 3.6256099082219083119) < 1e-13);
    sampler s(18);
    for (int i = 0; i < 50; i++) {
        cplx z = s.disk(2.0) + 0.1;
        CHECK(rel_diff(gamma(z + 1.0), z * gamma(z)) < 1e-12);
    }
    CHECK_THROWS_AS(gamma(cplx(-2)), error);
}

TEST_CASE("barnes G ratios telescope through Gamma")
{
    cplx x(0.2, 0.1);
    CHECK(barnes_g_ratio(x, 0) == cplx(1));
    CHECK(rel_diff(barnes_g_ratio(cplx(0.37), 1), gamma(cplx(1.37))) < 1e-15);
    CHECK(rel_diff(barnes_g_ratio(x, 3), gamma(1.0 + x) * gamma(2.0 + x) * gamma(3.0 + x)) < 1e-14);
    for (int n = -3; n < 4; n++)
        CHECK(rel_diff(barnes_g_ratio(x, n + 1), barnes_g_ratio(x, n) * gamma(1.0 + x + double(n))) < 1e-13);
    CHECK_THROWS_AS(barnes_g_ratio(cplx(-1), 1), error);
}

TEST_CASE("hyp2f1 closed forms, brute force and errors")
{
    CHECK(hyp2f1<double>(0.3, 0.7, 1.2, 0.0) == cplx(1));
    cplx x(0.4, 0.2);
    CHECK(rel_diff(hyp2f1<double>(0.3, 0.5, 0.5, x), std::pow(1.0 - x, -0.3)) < 1e-14);
    CHECK(rel_diff(hyp2f1<double>(1, 1, 2, x), -std::log(1.0 - x) / x) < 1e-14);

    cplx brute = 0, t = 1;
    for (int n = 0; n < 200; n++) {
        brute += t;
        t *= (0.2 + n) * (0.5 + n) / ((1.3 + n) * (n + 1.0)) * 0.35;
    }
    CHECK(rel_diff(hyp2f1<double>(0.2, 0.5, 1.3, 0.35), brute) < 1e-14);

    CHECK_THROWS_AS(hyp2f1<double>(0.2, 0.5, -2.0, 0.3), error);
    CHECK_THROWS_AS(hyp2f1<double>(0.2, 0.5, 1.3, 0.9995), error);
}

TEST_CASE("hyp2f1 satisfies the hypergeometric equation")
{
    sampler s(19);
    const double h = 1e-4;
    for (int i = 0; i < 30; i++) {
        cplx a = s.disk(0.5), b = s.disk(0.5), c = 1.0 + s.disk(0.4), x = s.disk(0.5);
        auto F = [&](cplx y) { return hyp2f1<double>(a, b, c, y); };
        cplx f0 = F(x), f1 = (F(x + h) - F(x - h)) / (2 * h), f2 = (F(x + h) - 2.0 * f0 + F(x - h)) / (h * h);
        cplx res = x * (1.0 - x) * f2 + (c - (a + b + 1.0) * x) * f1 - a * b * f0;
        CHECK(std::abs(res) < 1e-6);
    }
}

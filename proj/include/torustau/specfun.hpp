/*
 * Complex special functions on the torus: Jacobi theta functions and their
 * z-derivatives, Dedekind eta, the Weierstrass pair (p, p'), complex Gamma,
 * Barnes-G ratios and the Gauss series 2F1 on the unit disk.
 *
 * Theta conventions, with q = exp(2 pi i tau):
 *
 *   theta_3(z|tau) = SUM_n           q^(n^2/2)       exp(2 pi i z n)
 *   theta_2(z|tau) = SUM_n           q^((n+1/2)^2/2) exp(2 pi i z (n+1/2))
 *   theta_1(z|tau) = -theta_2(z + 1/2|tau)
 *   theta_4(z|tau) =  theta_3(z + 1/2|tau)
 *
 * so that theta_1(x-y)theta_1(x+y) = theta_3(2x|2tau)theta_2(2y|2tau)
 *                                  - theta_2(2x|2tau)theta_3(2y|2tau).
 *
 * All routines are templated on the real scalar; everything above the
 * special-function layer instantiates them with double.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "torustau/types.hpp"

namespace torustau {

template<typename T>
struct series_control {
    int term_cutoff = 200;
    T tol = std::numeric_limits<T>::epsilon() / 64;
};

template<typename T>
class modular_parameter {
public:
    modular_parameter(const complex<T>& tau) : tau_(tau)
    {
        if (!(tau.imag() > 0))
            throw error(errc::domain, "Im(tau) must be positive");
        q_half_ = std::exp(complex<T>(0, std::numbers::pi_v<T>) * tau);
        q_ = q_half_ * q_half_;
    }
    const complex<T>& tau() const { return tau_; }
    const complex<T>& q() const { return q_; }
    const complex<T>& q_half() const { return q_half_; }
private:
    complex<T> tau_, q_, q_half_;
};

namespace detail {

/* SUM over nu in c+Z of (2 pi i nu)^order exp(i pi tau nu^2 + 2 pi i zs nu) */
template<typename T>
complex<T>
theta_sum(T c, const complex<T>& zs, const modular_parameter<T>& mp, int order,
          const series_control<T>& ctl)
{
    const complex<T> ipi(0, std::numbers::pi_v<T>);
    const complex<T>& tau = mp.tau();
    auto term = [&](T nu) {
        complex<T> e = std::exp(ipi * tau * (nu * nu) + T(2) * ipi * zs * nu);
        if (order > 0)
            e *= std::pow(T(2) * ipi * nu, order);
        return e;
    };

    const T peak = std::abs(zs.imag()) / tau.imag() + 2;
    compensated_sum<T> acc;
    T scale = 0;
    for (int j = 0; j <= ctl.term_cutoff; j++) {
        complex<T> shell;
        if (c == 0)
            shell = (j == 0) ? term(0) : term(T(j)) + term(T(-j));
        else
            shell = term(c + j) + term(-c - j);
        acc.add(shell);
        T a = std::abs(shell);
        scale = std::max(scale, a);
        if (j > peak && a <= ctl.tol * scale)
            return acc.value();
    }
    throw error(errc::non_convergent, "theta series: term cutoff reached");
}

} // namespace detail

/* order-th z-derivative of theta_kind(z|tau), term-wise differentiated */
template<typename T>
complex<T>
theta_dz(int kind, int order, const complex<T>& z, const modular_parameter<T>& mp,
         const series_control<T>& ctl = {})
{
    const T h = T(1) / 2;
    switch (kind) {
    case 1: return -detail::theta_sum<T>(h, z + h, mp, order, ctl);
    case 2: return detail::theta_sum<T>(h, z, mp, order, ctl);
    case 3: return detail::theta_sum<T>(0, z, mp, order, ctl);
    case 4: return detail::theta_sum<T>(0, z + h, mp, order, ctl);
    }
    throw error(errc::domain, "theta kind must be 1..4");
}

template<typename T>
complex<T>
theta(int kind, const complex<T>& z, const modular_parameter<T>& mp,
      const series_control<T>& ctl = {})
{
    return theta_dz<T>(kind, 0, z, mp, ctl);
}

template<typename T>
complex<T>
theta1_z_derivative(int order, const complex<T>& z, const modular_parameter<T>& mp,
                    const series_control<T>& ctl = {})
{
    if (order < 1 || order > 3)
        throw error(errc::domain, "theta1 derivative order must be 1..3");
    return theta_dz<T>(1, order, z, mp, ctl);
}

/* eta(tau) = q^(1/24) PROD_{n>=1} (1 - q^n) */
template<typename T>
complex<T>
dedekind_eta(const modular_parameter<T>& mp, const series_control<T>& ctl = {})
{
    const complex<T> q = mp.q();
    complex<T> prod(1), qn(1);
    for (int n = 1; n <= 10 * ctl.term_cutoff; n++) {
        qn *= q;
        prod *= complex<T>(1) - qn;
        if (std::abs(qn) < ctl.tol)
            return std::exp(two_pi_i<T> * mp.tau() / T(24)) * prod;
    }
    throw error(errc::non_convergent, "eta product: term cutoff reached");
}

/* d/dtau log eta = 2 pi i (1/24 - SUM n q^n/(1 - q^n)) */
template<typename T>
complex<T>
dlog_eta(const modular_parameter<T>& mp, const series_control<T>& ctl = {})
{
    const complex<T> q = mp.q();
    compensated_sum<T> acc;
    complex<T> qn(1);
    for (int n = 1; n <= 10 * ctl.term_cutoff; n++) {
        qn *= q;
        complex<T> t = T(n) * qn / (complex<T>(1) - qn);
        acc.add(t);
        if (std::abs(t) < ctl.tol)
            return two_pi_i<T> * (complex<T>(T(1) / 24) - acc.value());
    }
    throw error(errc::non_convergent, "eta log-derivative: term cutoff reached");
}

/* distance from z to the nearest point of Z + tau Z */
template<typename T>
T lattice_distance(const complex<T>& z, const modular_parameter<T>& mp)
{
    const complex<T>& tau = mp.tau();
    T n0 = std::round(z.imag() / tau.imag());
    T best = std::numeric_limits<T>::infinity();
    for (T dn = -1; dn <= 1; dn++) {
        complex<T> w = z - (n0 + dn) * tau;
        T m0 = std::round(w.real());
        for (T dm = -1; dm <= 1; dm++)
            best = std::min(best, std::abs(w - (m0 + dm)));
    }
    return best;
}

template<typename T>
struct weierstrass_value {
    complex<T> p, p_prime;
};

/* p = -(log theta_1)'' + theta_1'''(0)/(3 theta_1'(0)) */
template<typename T>
weierstrass_value<T>
weierstrass_p(const complex<T>& z, const modular_parameter<T>& mp,
              const series_control<T>& ctl = {})
{
    if (lattice_distance(z, mp) < T(1e-8))
        throw error(errc::lattice_point, "weierstrass_p: z on the period lattice");
    const complex<T> t0 = theta_dz<T>(1, 0, z, mp, ctl);
    const complex<T> l1 = theta_dz<T>(1, 1, z, mp, ctl) / t0;
    const complex<T> l2 = theta_dz<T>(1, 2, z, mp, ctl) / t0;
    const complex<T> l3 = theta_dz<T>(1, 3, z, mp, ctl) / t0;
    const complex<T> zero(0);
    const complex<T> c = theta_dz<T>(1, 3, zero, mp, ctl) / theta_dz<T>(1, 1, zero, mp, ctl);

    weierstrass_value<T> r;
    r.p = -(l2 - l1 * l1) + c / T(3);
    r.p_prime = -(l3 - l1 * l2) + T(2) * l1 * (l2 - l1 * l1);
    return r;
}

/* g2, g3 for the lattice Z + tau Z from the Eisenstein q-series */
template<typename T>
std::array<complex<T>, 2>
weierstrass_invariants(const modular_parameter<T>& mp, int terms = 200)
{
    const T pi = std::numbers::pi_v<T>;
    const complex<T> q = mp.q();
    compensated_sum<T> e4, e6;
    complex<T> qn(1);
    for (int n = 1; n <= terms; n++) {
        qn *= q;
        T s3 = 0, s5 = 0;
        for (int d = 1; d <= n; d++) {
            if (n % d == 0) {
                s3 += std::pow(T(d), 3);
                s5 += std::pow(T(d), 5);
            }
        }
        e4.add(s3 * qn);
        e6.add(s5 * qn);
        if (std::abs(qn) * s5 < std::numeric_limits<T>::epsilon() / 16)
            break;
    }
    complex<T> E4 = T(1) + T(240) * e4.value();
    complex<T> E6 = T(1) - T(504) * e6.value();
    return {T(4) * std::pow(pi, 4) / T(3) * E4, T(8) * std::pow(pi, 6) / T(27) * E6};
}

/* Lanczos approximation (g = 7, n = 9) with reflection */
template<typename T>
complex<T> gamma(complex<T> z)
{
    const T pi = std::numbers::pi_v<T>;
    T nearest = std::round(z.real());
    if (nearest <= 0 && std::abs(z - nearest) < T(1e-14))
        throw error(errc::pole, "Gamma pole at " + std::to_string(double(nearest)));
    if (z.real() < T(0.5))
        return pi / (std::sin(pi * z) * gamma<T>(T(1) - z));

    static constexpr double p[] = {
        0.99999999999980993, 676.5203681218851, -1259.1392167224028,
        771.32342877765313, -176.61502916214059, 12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    z -= T(1);
    complex<T> x{T(p[0])};
    for (int i = 1; i < 9; i++)
        x += T(p[i]) / (z + T(i));
    complex<T> t = z + T(7.5);
    return std::sqrt(T(2) * pi) * std::exp((z + T(0.5)) * std::log(t) - t) * x;
}

/* G(1+x+n)/G(1+x) by telescoping G(2+y) = Gamma(1+y) G(1+y) */
template<typename T>
complex<T> barnes_g_ratio(const complex<T>& x, int n)
{
    complex<T> r(1);
    if (n >= 0) {
        for (int j = 0; j < n; j++)
            r *= gamma<T>(T(1) + x + T(j));
    } else {
        for (int j = 1; j <= -n; j++)
            r /= gamma<T>(T(1) + x - T(j));
    }
    return r;
}

/* Gauss series, |x| < 1 - delta */
template<typename T>
complex<T>
hyp2f1(const complex<T>& a, const complex<T>& b, const complex<T>& c, const complex<T>& x,
       const series_control<T>& ctl = {}, T delta = T(1e-3))
{
    T cn = std::round(c.real());
    if (cn <= 0 && std::abs(c - cn) < T(1e-14))
        throw error(errc::pole, "hyp2f1: c is a nonpositive integer");
    if (std::abs(x) >= T(1) - delta)
        throw error(errc::domain, "hyp2f1: |x| too close to 1");

    compensated_sum<T> acc;
    complex<T> t(1);
    acc.add(t);
    int small = 0;
    for (int n = 0; n < 50 * ctl.term_cutoff; n++) {
        t *= (a + T(n)) * (b + T(n)) / ((c + T(n)) * T(n + 1)) * x;
        acc.add(t);
        if (t == complex<T>(0))
            return acc.value();
        small = (std::abs(t) <= ctl.tol * std::abs(acc.value())) ? small + 1 : 0;
        if (small >= 2)
            return acc.value();
    }
    throw error(errc::non_convergent, "hyp2f1: term cutoff reached");
}

} // namespace torustau

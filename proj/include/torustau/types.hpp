#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace torustau {

template<typename T>
using complex = std::complex<T>;

using cplx = std::complex<double>;

template<typename T>
using dynamic_matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template<typename T>
using dynamic_vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template<typename T, int M, int N>
using static_matrix = Eigen::Matrix<T, M, N>;

/* 2x2 complex matrix, the workhorse of the Lax and trinion code */
template<typename T>
using mat2 = static_matrix<complex<T>, 2, 2>;

using mat2c = mat2<double>;

template<typename T>
constexpr complex<T> two_pi_i = complex<T>(0, 2 * std::numbers::pi_v<T>);

enum class errc {
    domain,
    non_convergent,
    pole,
    lattice_point,
    division_by_zero,
    theta_zero,
    singular_matrix,
    root_not_found,
    degenerate_ratio,
    quadrature_stall,
    singularity_hit,
    resonant_a,
    config
};

inline const char* errc_name(errc c)
{
    switch (c) {
    case errc::domain: return "DomainError";
    case errc::non_convergent: return "NonConvergent";
    case errc::pole: return "PoleError";
    case errc::lattice_point: return "LatticePoint";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::theta_zero: return "ThetaZero";
    case errc::singular_matrix: return "SingularMatrix";
    case errc::root_not_found: return "RootNotFound";
    case errc::degenerate_ratio: return "DegenerateRatio";
    case errc::quadrature_stall: return "QuadratureStall";
    case errc::singularity_hit: return "SingularityHit";
    case errc::resonant_a: return "ResonantA";
    case errc::config: return "ConfigError";
    }
    return "Error";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }
private:
    errc code_;
};

/* Neumaier-compensated accumulator; fixed call order gives reproducible bits */
template<typename T>
class compensated_sum {
public:
    void add(const complex<T>& x)
    {
        re_.add(x.real());
        im_.add(x.imag());
    }
    complex<T> value() const { return {re_.value(), im_.value()}; }
private:
    struct real_acc {
        T s = 0, c = 0;
        void add(T x)
        {
            T t = s + x;
            if (std::abs(s) >= std::abs(x))
                c += (s - t) + x;
            else
                c += (x - t) + s;
            s = t;
        }
        T value() const { return s + c; }
    };
    real_acc re_, im_;
};

} // namespace torustau

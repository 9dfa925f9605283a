#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "torustau/types.hpp"

namespace torustau::test {

inline double rel_diff(cplx a, cplx b)
{
    double s = std::max(std::abs(a), std::abs(b));
    return s == 0 ? 0 : std::abs(a - b) / s;
}

class sampler {
public:
    explicit sampler(unsigned long seed) : gen_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    cplx disk(double r) { return {uniform(-r, r), uniform(-r, r)}; }
    cplx upper(double im_lo, double im_hi) { return {uniform(-0.5, 0.5), uniform(im_lo, im_hi)}; }
private:
    std::mt19937_64 gen_;
};

} // namespace torustau::test

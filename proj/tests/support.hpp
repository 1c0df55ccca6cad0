#pragma once

#include <random>
#include <vector>

#include "qdurrmeyer/qdurrmeyer.hpp"

namespace qd::testing {

inline Scalar R(long num, long den = 1) { return Scalar::exact(num, den); }

inline Polynomial P(std::initializer_list<Scalar> c) { return Polynomial(c); }

inline Polynomial T(int m) { return Polynomial::monomial(m, Backend::Exact); }

inline std::vector<QContext> standard_contexts() {
    return {QContext::exact(1, 4), QContext::exact(1, 2), QContext::exact(3, 4)};
}

/// 16 rational points i/15 in [0,1].
inline std::vector<Scalar> grid16() {
    std::vector<Scalar> xs;
    for (int i = 0; i < 16; ++i) xs.push_back(R(i, 15));
    return xs;
}

inline Scalar random_unit(std::mt19937& rng, long den = 97) {
    return R(std::uniform_int_distribution<long>(0, den)(rng), den);
}

inline Scalar random_q(std::mt19937& rng) {
    long den = std::uniform_int_distribution<long>(2, 12)(rng);
    return R(std::uniform_int_distribution<long>(1, den - 1)(rng), den);
}

inline Polynomial random_poly(std::mt19937& rng, int degree) {
    std::uniform_int_distribution<long> num(-20, 20), den(1, 9);
    std::vector<Scalar> c;
    for (int i = 0; i <= degree; ++i) c.push_back(R(num(rng), den(rng)));
    return Polynomial(c);
}

} // namespace qd::testing

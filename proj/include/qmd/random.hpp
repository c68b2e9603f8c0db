#pragma once

#include <random>

#include "qmd/engine.hpp"

// Deterministic randomness helpers.  Everything here derives values from raw
// mt19937_64 output, never from std::*_distribution, so seeded sequences are
// reproducible across standard libraries.

namespace qmd {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double gaussian(std::mt19937_64& rng) {
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform01(rng);
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
}

inline cplx gaussian_cplx(std::mt19937_64& rng) {
    double re = gaussian(rng);
    double im = gaussian(rng);
    return {re, im};
}

// Haar-ish random unitary: complex Gaussian matrix orthonormalized column by
// column (two Gram-Schmidt sweeps keep the defect near machine precision).
inline SquareMatrix random_unitary(int dim, std::mt19937_64& rng) {
    SquareMatrix u(dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) u.at(r, c) = gaussian_cplx(rng);
    for (int c = 0; c < dim; ++c) {
        for (int sweep = 0; sweep < 2; ++sweep)
            for (int prev = 0; prev < c; ++prev) {
                cplx dot = 0.0;
                for (int r = 0; r < dim; ++r) dot += std::conj(u.at(r, prev)) * u.at(r, c);
                for (int r = 0; r < dim; ++r) u.at(r, c) -= dot * u.at(r, prev);
            }
        double norm = 0.0;
        for (int r = 0; r < dim; ++r) norm += std::norm(u.at(r, c));
        norm = std::sqrt(norm);
        for (int r = 0; r < dim; ++r) u.at(r, c) /= norm;
    }
    return u;
}

inline CoinOp random_coin(std::mt19937_64& rng) {
    SquareMatrix u = random_unitary(2, rng);
    return CoinOp::from_matrix(u.at(0, 0), u.at(0, 1), u.at(1, 0), u.at(1, 1));
}

inline QState random_state(const GameDims& dims, std::mt19937_64& rng) {
    QState s{dims, std::vector<cplx>(dims.total)};
    for (cplx& a : s.amp) a = gaussian_cplx(rng);
    double norm = s.norm();
    for (cplx& a : s.amp) a /= norm;
    return s;
}

}  // namespace qmd

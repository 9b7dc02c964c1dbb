// bell.hpp
// The four synchronous Bell functionals J_0..J_3, the effective J_3 form
// estimated by the protocol, and classification against the classical
// (J_i >= 0) and quantum (J_i >= -1/8, at most one violation) bounds.

#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <stdexcept>

#include "synqkd/correlations.hpp"

namespace synqkd {

inline constexpr double quantum_bound = -0.125;  // J_i >= -1/8 for synchronous quantum

struct BellReport {
    std::array<double, 4> j{};
    bool classical = false;
    bool quantum_feasible = false;
    std::optional<int> violated_index;
};

// J_0..J_3 from the correlator matrix; requires the synchronous
// normalization c_{xx} = 1.
inline BellReport bell_functionals(const BiasForm& b, double tol = 1e-9) {
    for (int x = 0; x < 3; ++x)
        if (std::abs(b.c[x][x] - 1.0) > tol)
            throw std::invalid_argument("bell_functionals: c_xx != 1 (not synchronous)");
    const double c01 = b.c[0][1], c02 = b.c[0][2], c12 = b.c[1][2];
    BellReport r;
    r.j[0] = (1.0 - c01 - c02 + c12) / 4.0;
    r.j[1] = (1.0 - c01 + c02 - c12) / 4.0;
    r.j[2] = (1.0 + c01 - c02 - c12) / 4.0;
    r.j[3] = (1.0 + c01 + c02 + c12) / 4.0;

    int negatives = 0, argmin = 0;
    for (int i = 0; i < 4; ++i) {
        if (r.j[i] < -tol) ++negatives;
        if (r.j[i] < r.j[argmin]) argmin = i;
    }
    r.classical = (negatives == 0);
    r.quantum_feasible = (r.j[argmin] >= quantum_bound - tol) && (negatives <= 1);
    if (negatives > 0) r.violated_index = argmin;
    return r;
}

// Effective J_3 of the raw table: defined for any correlation, synchronous
// or not. Terms are summed in a fixed order so results are reproducible.
inline double j3_effective(const Correlation& p) {
    static constexpr std::array<std::pair<int, int>, 6> pairs = {
        {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}};
    double sum = 0.0;
    for (const auto& [xa, xb] : pairs) {
        sum += p(0, 1, xa, xb);
        sum += p(1, 0, xa, xb);
    }
    return 1.0 - sum / 4.0;
}

// Full report for a symmetric synchronous nonsignalling correlation.
inline BellReport classify(const Correlation& p, double tol = 1e-9) {
    if (!check_nonsignalling(p, tol))
        throw std::invalid_argument("classify: correlation fails nonsignalling predicate");
    if (!check_symmetric(p, tol))
        throw std::invalid_argument("classify: correlation fails symmetric predicate");
    if (!check_synchronous(p, tol))
        throw std::invalid_argument("classify: correlation fails synchronous predicate");
    return bell_functionals(to_bias_form(p, tol), tol);
}

}  // namespace synqkd

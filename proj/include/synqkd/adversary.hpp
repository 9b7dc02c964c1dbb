// adversary.hpp
// The basis-guessing adversary: an eavesdropper who knows each party's
// basis only up to uncertainty epsilon produces observed statistics that
// are a fixed linear mix of her strategy's (J3, S). This module carries
// the forward map, its closed-form inverse, the epsilon thresholds beyond
// which no feasible strategy exists, and feasibility-curve generation.

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "synqkd/bell.hpp"
#include "synqkd/correlations.hpp"

namespace synqkd {

// The requested threshold does not exist (negative radicand).
class NoThresholdError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct EveModel {
    double epsilon = 0.0;
    Correlation strategy;  // q(yA,yB|zA,zB); normalization only, may signal

    void validate() const {
        if (!(epsilon >= 0.0 && epsilon <= 2.0 / 3.0))
            throw std::invalid_argument("EveModel: epsilon must lie in [0, 2/3]");
        if (strategy.normalization_defect() > 1e-9 || strategy.range_defect() > 1e-9)
            throw std::invalid_argument("EveModel: strategy table is not normalized");
    }
};

struct EveStats {
    double j3 = 0.0;
    double s = 0.0;
};

struct Thresholds {
    double lambda = 0.0, mu = 0.0, delta = 0.0;
    std::optional<double> eps_max;
    std::optional<double> eps_delta_max;
};

// Probability that the guess is z given the true basis is x:
// 1 - epsilon on z = x, epsilon/2 on each z != x.
inline std::array<double, 3> guess_distribution(double epsilon, int x) {
    if (!(epsilon >= 0.0 && epsilon <= 2.0 / 3.0))
        throw std::invalid_argument("guess_distribution: epsilon must lie in [0, 2/3]");
    PvmFamily::check_x(x);
    std::array<double, 3> w{};
    for (int z = 0; z < 3; ++z) w[z] = (z == x) ? 1.0 - epsilon : epsilon / 2.0;
    return w;
}

// Statistics Alice and Bob observe: the strategy mixed by independent
// basis-guess noise on the two sides.
inline Correlation observed_correlation(const EveModel& m) {
    m.validate();
    Correlation p;
    std::array<std::array<double, 3>, 3> w;
    for (int x = 0; x < 3; ++x) w[x] = guess_distribution(m.epsilon, x);
    for (int xa = 0; xa < 3; ++xa)
        for (int xb = 0; xb < 3; ++xb)
            for (int ya = 0; ya < 2; ++ya)
                for (int yb = 0; yb < 2; ++yb) {
                    double acc = 0.0;
                    for (int za = 0; za < 3; ++za)
                        for (int zb = 0; zb < 3; ++zb)
                            acc += m.strategy(ya, yb, za, zb) * w[xa][za] * w[xb][zb];
                    p(ya, yb, xa, xb) = acc;
                }
    return p;
}

// Expected (J3, S) seen by the users when Eve's strategy has statistics
// (J3~, S~) and her uncertainty is epsilon:
//   <1-J3> = (1 - e + 3/4 e^2)(1-J3~) + (3/2 e - 9/8 e^2) S~
//   <S>    = (1 - 2e + 3/2 e^2) S~    + (4/3 e - e^2)(1-J3~)
inline std::pair<double, double> forward_stats(const EveStats& e, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 2.0 / 3.0))
        throw std::invalid_argument("forward_stats: epsilon must lie in [0, 2/3]");
    const double one_minus_j3 = 1.0 - e.j3;
    const double ee = epsilon * epsilon;
    const double exp_one_minus_j3 =
        (1.0 - epsilon + 0.75 * ee) * one_minus_j3 + (1.5 * epsilon - 1.125 * ee) * e.s;
    const double exp_s = (1.0 - 2.0 * epsilon + 1.5 * ee) * e.s +
                         ((4.0 / 3.0) * epsilon - ee) * one_minus_j3;
    return {1.0 - exp_one_minus_j3, exp_s};
}

// Closed-form inverse of forward_stats with the observed statistics
// parameterized as <J3> = -1/8 + lambda and <S> = mu:
//   J3~ = [(3e^2-4e)(3-6mu+8lambda) + 16lambda - 2] / [4(3e-2)^2]
//   S~  = [(3e^2-4e)(6mu-8lambda+9) + 24mu]         / [6(3e-2)^2]
inline EveStats invert_stats(double lambda, double mu, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 2.0 / 3.0))
        throw std::domain_error("invert_stats: undefined at epsilon = 2/3 (singular mixing)");
    const double g = 3.0 * epsilon * epsilon - 4.0 * epsilon;
    const double den = 3.0 * epsilon - 2.0;
    const double den2 = den * den;
    EveStats out;
    out.j3 = (g * (3.0 - 6.0 * mu + 8.0 * lambda) + 16.0 * lambda - 2.0) / (4.0 * den2);
    out.s = (g * (6.0 * mu - 8.0 * lambda + 9.0) + 24.0 * mu) / (6.0 * den2);
    return out;
}

namespace detail {

inline double threshold_from(double radicand, double denominator, const char* what) {
    if (radicand < 0.0)
        throw NoThresholdError(std::string(what) + ": negative radicand, threshold undefined");
    return 2.0 / 3.0 - (2.0 / 3.0) * std::sqrt(radicand) / denominator;
}

}  // namespace detail

// Uncertainty beyond which Eve's asynchronicity S~ turns negative, i.e.
// no feasible strategy reproduces the accepted statistics.
inline double epsilon_max(double lambda, double mu) {
    if (!(lambda >= 0.0 && lambda <= 0.125))
        throw std::invalid_argument("epsilon_max: lambda must lie in [0, 1/8]");
    if (!(mu >= 0.0)) throw std::invalid_argument("epsilon_max: mu must be >= 0");
    const double radicand = 64.0 * lambda * lambda + 6.0 * (8.0 * lambda - 9.0) * mu -
                            72.0 * mu * mu - 144.0 * lambda + 81.0;
    return detail::threshold_from(radicand, 6.0 * mu - 8.0 * lambda + 9.0, "epsilon_max");
}

// Uncertainty beyond which S~ < delta. Coincides with epsilon_max at
// delta = 0; values below zero mean no epsilon >= 0 admits S~ >= delta.
inline double epsilon_delta_max(double delta, double lambda, double mu) {
    if (!(lambda >= 0.0 && lambda <= 0.125))
        throw std::invalid_argument("epsilon_delta_max: lambda must lie in [0, 1/8]");
    if (!(mu >= 0.0)) throw std::invalid_argument("epsilon_delta_max: mu must be >= 0");
    if (!(delta >= 0.0)) throw std::invalid_argument("epsilon_delta_max: delta must be >= 0");
    const double radicand = 144.0 * (delta - 1.0) * lambda + 64.0 * lambda * lambda +
                            6.0 * (36.0 * delta + 8.0 * lambda - 9.0) * mu - 72.0 * mu * mu -
                            162.0 * delta + 81.0;
    return detail::threshold_from(radicand, 6.0 * mu - 18.0 * delta - 8.0 * lambda + 9.0,
                                  "epsilon_delta_max");
}

// Both thresholds for one working point; a missing value means the
// radicand went negative. At delta = 0 the two coincide.
inline Thresholds compute_thresholds(double lambda, double mu, double delta = 0.0) {
    Thresholds t;
    t.lambda = lambda;
    t.mu = mu;
    t.delta = delta;
    try {
        t.eps_max = epsilon_max(lambda, mu);
    } catch (const NoThresholdError&) {
    }
    try {
        t.eps_delta_max = epsilon_delta_max(delta, lambda, mu);
    } catch (const NoThresholdError&) {
    }
    return t;
}

// Independent oracle for the closed forms: bisection on S~(eps) - delta
// over [0, 2/3). Returns nullopt when the bracket has no sign change
// (S~(0) = mu < delta).
inline std::optional<double> epsilon_threshold_bisect(double delta, double lambda, double mu,
                                                      double tol = 1e-12) {
    const auto g = [&](double eps) { return invert_stats(lambda, mu, eps).s - delta; };
    double lo = 0.0, hi = 2.0 / 3.0 - 1e-9;
    const double glo = g(lo);
    if (glo < 0.0) return std::nullopt;
    if (glo == 0.0) return 0.0;
    if (g(hi) > 0.0) return std::nullopt;  // no crossing below the singularity
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct FeasibilityCurve {
    std::vector<std::pair<double, double>> points;  // (mu, epsilon threshold)
    bool monotone = true;  // nondecreasing in mu over the tabulated range
};

// Tabulates the delta = 0 or delta > 0 threshold over mu = 0, step, ...,
// mu_max.
inline FeasibilityCurve feasibility_curve(double lambda, double mu_max, double delta,
                                          double step) {
    if (!(step > 0.0)) throw std::invalid_argument("feasibility_curve: step must be positive");
    if (!(mu_max >= 0.0)) throw std::invalid_argument("feasibility_curve: mu_max must be >= 0");
    FeasibilityCurve curve;
    const auto count = static_cast<std::size_t>(std::floor(mu_max / step + 1e-9)) + 1;
    curve.points.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double mu = static_cast<double>(k) * step;
        const double eps = (delta == 0.0) ? epsilon_max(lambda, mu)
                                          : epsilon_delta_max(delta, lambda, mu);
        if (!curve.points.empty() && eps < curve.points.back().second - 1e-12)
            curve.monotone = false;
        curve.points.emplace_back(mu, eps);
    }
    return curve;
}

}  // namespace synqkd

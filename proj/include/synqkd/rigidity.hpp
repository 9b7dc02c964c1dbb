// rigidity.hpp
// Numerical laboratory for the perturbation bound on near-maximal Bell
// violations. Families of binary measurements are assembled in the
// two-projections canonical form -- four one-dimensional "junk" summand
// types L_ab plus 2x2 angle blocks -- together with the snapped reference
// family, and the bound's three inequalities are checked quantity by
// quantity.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "synqkd/bell.hpp"
#include "synqkd/correlations.hpp"
#include "synqkd/hilbert.hpp"
#include "synqkd/rng.hpp"

namespace synqkd {

inline constexpr double theta_hat = 2.0 * std::numbers::pi / 3.0;  // ideal block angle
inline constexpr double theta_window = std::numbers::pi / 6.0;     // |theta - theta_hat| bound

namespace detail {

// Exact values of cos(2 theta_hat) = -1/2 and sin(2 theta_hat) = -sqrt3/2,
// so ideal blocks are built from representable constants rather than trig
// of an inexact angle.
inline double sin_2theta_hat() { return -std::sqrt(3.0) / 2.0; }
inline constexpr double cos_2theta_hat = -0.5;

struct Block2 {
    double a00, a01, a10, a11;
};

// Reflection-form observable [[cos a, sin a], [sin a, -cos a]].
inline Block2 reflection_block(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c, s, s, -c};
}

inline Block2 ideal_m1_block() {
    const double s = sin_2theta_hat();
    return {cos_2theta_hat, s, s, -cos_2theta_hat};
}

// Proof form [[-1-cos 2t, -sin 2t], [-sin 2t, 1+cos 2t]] at t = theta_hat;
// equals the reflection block at angle -2 theta_hat.
inline Block2 ideal_m2_block() {
    const double s = -sin_2theta_hat();
    return {-1.0 - cos_2theta_hat, s, s, 1.0 + cos_2theta_hat};
}

}  // namespace detail

// Canonical form data: junk dimensions, block angles, and the optional
// non-default third measurement.
struct TwoProjectionForm {
    std::size_t l00 = 0, l01 = 0, l10 = 0, l11 = 0;
    std::vector<double> theta;  // one angle per 2x2 block

    // Overrides for M_2; defaults are the ideal completion: the block at
    // angle -2 theta_hat, +1 on L00/L01 and -1 on L10/L11.
    std::optional<std::vector<double>> m2_block_angles;
    std::optional<std::array<double, 4>> m2_l_values;

    std::size_t dim() const { return l00 + l01 + l10 + l11 + 2 * theta.size(); }

    void validate() const {
        if (dim() < 1) throw std::invalid_argument("TwoProjectionForm: dimension must be >= 1");
        for (double t : theta)
            if (!(std::abs(t - theta_hat) <= theta_window + 1e-12))
                throw std::invalid_argument(
                    "TwoProjectionForm: block angle " + std::to_string(t) +
                    " outside the window [2pi/3 - pi/6, 2pi/3 + pi/6]");
        if (m2_block_angles && m2_block_angles->size() != theta.size())
            throw std::invalid_argument("TwoProjectionForm: m2_block_angles size mismatch");
        if (m2_l_values)
            for (double v : *m2_l_values)
                if (v != 1.0 && v != -1.0)
                    throw std::invalid_argument("TwoProjectionForm: m2_l_values must be +/-1");
    }
};

namespace detail {

inline CMatrix block_observable(const TwoProjectionForm& f, const std::array<double, 4>& lvals,
                                const std::vector<Block2>& blocks) {
    const std::size_t d = f.dim();
    CMatrix m(d);
    std::size_t at = 0;
    const std::array<std::size_t, 4> ldims = {f.l00, f.l01, f.l10, f.l11};
    for (int s = 0; s < 4; ++s)
        for (std::size_t i = 0; i < ldims[s]; ++i, ++at) m(at, at) = lvals[s];
    for (const auto& b : blocks) {
        m(at, at) = b.a00;
        m(at, at + 1) = b.a01;
        m(at + 1, at) = b.a10;
        m(at + 1, at + 1) = b.a11;
        at += 2;
    }
    return m;
}

inline std::array<CMatrix, 3> canonical_observables(const TwoProjectionForm& f) {
    const std::size_t k = f.theta.size();
    std::vector<Block2> b0(k, Block2{1.0, 0.0, 0.0, -1.0});
    std::vector<Block2> b1(k), b2(k);
    for (std::size_t j = 0; j < k; ++j) b1[j] = reflection_block(2.0 * f.theta[j]);
    if (f.m2_block_angles)
        for (std::size_t j = 0; j < k; ++j) b2[j] = reflection_block((*f.m2_block_angles)[j]);
    else
        for (std::size_t j = 0; j < k; ++j) b2[j] = ideal_m2_block();
    const std::array<double, 4> l2 = f.m2_l_values.value_or(std::array<double, 4>{1, 1, -1, -1});
    return {block_observable(f, {-1, -1, 1, 1}, b0), block_observable(f, {-1, 1, -1, 1}, b1),
            block_observable(f, l2, b2)};
}

inline PvmFamily family_from_observables(std::size_t d, const std::array<CMatrix, 3>& m) {
    PvmFamily fam;
    fam.dim = d;
    const CMatrix id = CMatrix::identity(d);
    for (int x = 0; x < num_inputs; ++x) {
        fam.effects[x][0] = (id + m[x]) * cdouble{0.5, 0.0};
        fam.effects[x][1] = (id - m[x]) * cdouble{0.5, 0.0};
    }
    return fam;
}

}  // namespace detail

// Projector family of the canonical form; passes validate_pvm by
// construction (each observable squares to the identity).
inline PvmFamily assemble_pvms(const TwoProjectionForm& f) {
    f.validate();
    return detail::family_from_observables(f.dim(), detail::canonical_observables(f));
}

// The snapped family: block angles replaced by theta_hat, third
// measurement fixed to the ideal completion. Independent of any M_2
// override in the form.
inline PvmFamily reference_family(const TwoProjectionForm& f) {
    f.validate();
    const std::size_t k = f.theta.size();
    std::vector<detail::Block2> b0(k, detail::Block2{1.0, 0.0, 0.0, -1.0});
    std::vector<detail::Block2> b1(k, detail::ideal_m1_block());
    std::vector<detail::Block2> b2(k, detail::ideal_m2_block());
    const std::array<CMatrix, 3> m = {detail::block_observable(f, {-1, -1, 1, 1}, b0),
                                      detail::block_observable(f, {-1, 1, -1, 1}, b1),
                                      detail::block_observable(f, {1, 1, -1, -1}, b2)};
    return detail::family_from_observables(f.dim(), m);
}

// Mean squared effect deviation (1/3) sum_{x,y} tr((E - F)^2) / d.
// Cross-checked against the observable route (1/6) sum_x tr((M-N)^2) / d,
// which must agree to 1e-12.
inline double trace_deviation(const PvmFamily& a, const PvmFamily& b) {
    if (a.dim != b.dim) throw std::invalid_argument("trace_deviation: dimension mismatch");
    const double d = static_cast<double>(a.dim);
    double effect_route = 0.0;
    for (int x = 0; x < num_inputs; ++x)
        for (int y = 0; y < num_outputs; ++y)
            effect_route += trace_of_squared_difference(a.effects[x][y], b.effects[x][y]) / d;
    effect_route /= 3.0;

    double observable_route = 0.0;
    for (int x = 0; x < num_inputs; ++x) {
        const CMatrix ma = a.effects[x][0] - a.effects[x][1];
        const CMatrix mb = b.effects[x][0] - b.effects[x][1];
        observable_route += trace_of_squared_difference(ma, mb) / d;
    }
    observable_route /= 6.0;
    if (std::abs(effect_route - observable_route) > 1e-12)
        throw std::logic_error("trace_deviation: effect and observable routes disagree");
    return effect_route;
}

struct RigidityReport {
    std::size_t d = 0;
    double j3 = 0.0;
    double lambda = 0.0;   // j3 + 1/8
    double l_ratio = 0.0;  // junk fraction l/d
    double deviation = 0.0;
    double stat_diff = 0.0;
    double l_ratio_bound = 0.0, deviation_bound = 0.0, stat_diff_bound = 0.0;
    double l_ratio_margin = 0.0, deviation_margin = 0.0, stat_diff_margin = 0.0;
    double delta_identity_residual = 0.0;  // |tr(Delta^2)/d - (1 + 8 J3)|
    bool l_ratio_ok = false, deviation_ok = false, stat_diff_ok = false, all_ok = false;
    double tol = 0.0;
};

namespace detail {

inline RigidityReport evaluate_bounds(const TwoProjectionForm& f, const PvmFamily& family,
                                      const PvmFamily& ref, const Correlation& corr,
                                      double tol) {
    const double d = static_cast<double>(family.dim);
    RigidityReport r;
    r.tol = tol;
    r.d = family.dim;
    r.j3 = j3_effective(corr);
    r.lambda = r.j3 + 0.125;
    const double lb = std::max(r.lambda, 0.0);

    r.l_ratio = static_cast<double>(f.l00 + f.l01 + f.l10 + f.l11) / d;
    r.deviation = trace_deviation(family, ref);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 2; ++y) r.stat_diff += std::abs(corr(y, y, x, x) - 0.5);
    r.stat_diff /= 3.0;

    r.l_ratio_bound = (32.0 / 3.0) * lb;
    r.deviation_bound = (52.0 / 3.0) * lb;
    r.stat_diff_bound = std::sqrt(8.0) * std::sqrt(lb) + (64.0 / 3.0) * lb;
    r.l_ratio_margin = r.l_ratio_bound - r.l_ratio;
    r.deviation_margin = r.deviation_bound - r.deviation;
    r.stat_diff_margin = r.stat_diff_bound - r.stat_diff;
    r.l_ratio_ok = r.l_ratio_margin >= -tol;
    r.deviation_ok = r.deviation_margin >= -tol;
    r.stat_diff_ok = r.stat_diff_margin >= -tol;
    r.all_ok = r.l_ratio_ok && r.deviation_ok && r.stat_diff_ok;

    CMatrix delta = (family.effects[0][0] - family.effects[0][1]) +
                    (family.effects[1][0] - family.effects[1][1]) +
                    (family.effects[2][0] - family.effects[2][1]);
    const double tr_delta_sq = trace_of_product(delta, delta).real() / d;
    r.delta_identity_residual = std::abs(tr_delta_sq - (1.0 + 8.0 * r.j3));
    return r;
}

}  // namespace detail

// Evaluates the three bound inequalities for one form. lambda is computed
// from the realized correlation, never taken as an input.
inline RigidityReport verify_main_bound(const TwoProjectionForm& f, double tol = 1e-9) {
    f.validate();
    const PvmFamily family = assemble_pvms(f);
    const PvmFamily ref = reference_family(f);
    return detail::evaluate_bounds(f, family, ref, tracial_correlation(family, 0.0), tol);
}

// Random canonical form: k blocks with angles uniform in the admissible
// window and junk dimensions uniform in [0, k].
inline TwoProjectionForm random_form(SplitMix64& rng, std::size_t max_blocks = 50) {
    TwoProjectionForm f;
    const std::size_t k = 1 + rng.below(max_blocks);
    f.theta.resize(k);
    for (auto& t : f.theta) t = rng.uniform(theta_hat - theta_window, theta_hat + theta_window);
    f.l00 = rng.below(k + 1);
    f.l01 = rng.below(k + 1);
    f.l10 = rng.below(k + 1);
    f.l11 = rng.below(k + 1);
    return f;
}

struct SweepSummary {
    std::size_t count = 0;
    std::size_t bound_violations = 0;      // forms with any margin < -tol
    std::size_t quantum_bound_violations = 0;  // any J_i < -1/8 - tol or two J_i < 0
    double min_margin = 0.0;
    double max_identity_residual = 0.0;
    double min_j = 0.0;  // most negative Bell functional seen
    bool all_ok = false;
};

inline SweepSummary sweep_forms(std::size_t count, std::uint64_t seed,
                                std::size_t max_blocks = 50, double tol = 1e-9) {
    SplitMix64 rng(seed);
    SweepSummary s;
    s.count = count;
    s.min_margin = std::numeric_limits<double>::infinity();
    s.min_j = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < count; ++it) {
        const TwoProjectionForm f = random_form(rng, max_blocks);
        const PvmFamily family = assemble_pvms(f);
        const Correlation corr = tracial_correlation(family, 0.0);
        const RigidityReport r = detail::evaluate_bounds(f, family, reference_family(f), corr, tol);
        if (!r.all_ok) ++s.bound_violations;
        s.min_margin = std::min({s.min_margin, r.l_ratio_margin, r.deviation_margin,
                                 r.stat_diff_margin});
        s.max_identity_residual = std::max(s.max_identity_residual, r.delta_identity_residual);

        const BellReport bell = bell_functionals(to_bias_form(corr));
        int negatives = 0;
        for (double j : bell.j) {
            s.min_j = std::min(s.min_j, j);
            if (j < -tol) ++negatives;
        }
        if (bell.j[0] < quantum_bound - tol || bell.j[1] < quantum_bound - tol ||
            bell.j[2] < quantum_bound - tol || bell.j[3] < quantum_bound - tol || negatives > 1)
            ++s.quantum_bound_violations;
    }
    s.all_ok = (s.bound_violations == 0 && s.quantum_bound_violations == 0);
    return s;
}

}  // namespace synqkd

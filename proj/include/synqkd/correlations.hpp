// correlations.hpp
// The correlation table p(yA,yB|xA,xB) over X={0,1,2}, Y={0,1}, its
// bias-form coordinates, and the synchronous / symmetric / nonsignalling
// predicates plus the asynchronicity measure.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "synqkd/hilbert.hpp"

namespace synqkd {

// Dense 36-entry table in fixed order: (yA,yB) major, (xA,xB) minor.
struct Correlation {
    std::array<double, 36> p{};

    static constexpr std::size_t index(int ya, int yb, int xa, int xb) {
        return static_cast<std::size_t>((ya * 2 + yb) * 9 + xa * 3 + xb);
    }

    double& operator()(int ya, int yb, int xa, int xb) { return p[index(ya, yb, xa, xb)]; }
    double operator()(int ya, int yb, int xa, int xb) const { return p[index(ya, yb, xa, xb)]; }

    double normalization_defect() const {
        double worst = 0.0;
        for (int xa = 0; xa < 3; ++xa)
            for (int xb = 0; xb < 3; ++xb) {
                double s = 0.0;
                for (int ya = 0; ya < 2; ++ya)
                    for (int yb = 0; yb < 2; ++yb) s += (*this)(ya, yb, xa, xb);
                worst = std::max(worst, std::abs(s - 1.0));
            }
        return worst;
    }

    double range_defect() const {
        double worst = 0.0;
        for (double v : p) worst = std::max({worst, -v, v - 1.0});
        return std::max(worst, 0.0);
    }

    bool is_valid(double tol = 1e-9) const {
        for (double v : p)
            if (!std::isfinite(v)) return false;
        return normalization_defect() <= tol && range_defect() <= tol;
    }
};

// Exact dyadic table realized by the ideal measurements on an EPR pair:
// 1/2 and 0 on equal bases, 1/8 and 3/8 on crossed bases.
inline Correlation ideal_correlation() {
    Correlation c;
    for (int xa = 0; xa < 3; ++xa)
        for (int xb = 0; xb < 3; ++xb) {
            const bool same = (xa == xb);
            c(0, 0, xa, xb) = same ? 0.5 : 0.125;
            c(1, 1, xa, xb) = same ? 0.5 : 0.125;
            c(0, 1, xa, xb) = same ? 0.0 : 0.375;
            c(1, 0, xa, xb) = same ? 0.0 : 0.375;
        }
    return c;
}

inline Correlation uniform_correlation() {
    Correlation c;
    c.p.fill(0.25);
    return c;
}

// p(yA,yB|xA,xB) = tr(E^xA_yA E^xB_yB) / d. Pass validate_tol <= 0 to skip
// revalidating a family that is valid by construction.
inline Correlation tracial_correlation(const PvmFamily& f, double validate_tol = 1e-9) {
    if (validate_tol > 0.0) {
        const PvmValidation v = validate_pvm(f, validate_tol);
        if (!v.pass)
            throw std::invalid_argument("tracial_correlation: PVM family fails validation, max defect " +
                                        std::to_string(v.max_defect()));
    }
    const double d = static_cast<double>(f.dim);
    Correlation c;
    for (int xa = 0; xa < 3; ++xa)
        for (int xb = 0; xb < 3; ++xb)
            for (int ya = 0; ya < 2; ++ya)
                for (int yb = 0; yb < 2; ++yb)
                    c(ya, yb, xa, xb) =
                        trace_of_product(f.effects[xa][ya], f.effects[xb][yb]).real() / d;
    return c;
}

// p = <psi| E^xA_yA (x) F^xB_yB |psi> via p = Re tr(E A F^T A†) with A the
// amplitude matrix, avoiding the tensor-product blowup.
inline Correlation correlation_from_state(const BipartiteState& psi, const PvmFamily& e,
                                          const PvmFamily& f) {
    if (psi.dim_a != e.dim || psi.dim_b != f.dim || psi.amp.size() != psi.dim_a * psi.dim_b)
        throw std::invalid_argument("correlation_from_state: dimension mismatch");
    const std::size_t da = psi.dim_a, db = psi.dim_b;
    Correlation c;
    for (int xa = 0; xa < 3; ++xa)
        for (int xb = 0; xb < 3; ++xb)
            for (int ya = 0; ya < 2; ++ya)
                for (int yb = 0; yb < 2; ++yb) {
                    const CMatrix& em = e.effects[xa][ya];
                    const CMatrix& fm = f.effects[xb][yb];
                    cdouble acc{};
                    // sum_{a,b,a',b'} conj(A[a,b]) E[a,a'] A[a',b'] F[b,b']
                    for (std::size_t a = 0; a < da; ++a)
                        for (std::size_t b = 0; b < db; ++b) {
                            cdouble inner{};
                            for (std::size_t a2 = 0; a2 < da; ++a2)
                                for (std::size_t b2 = 0; b2 < db; ++b2)
                                    inner += em(a, a2) * psi.amp[a2 * db + b2] * fm(b, b2);
                            acc += std::conj(psi.amp[a * db + b]) * inner;
                        }
                    c(ya, yb, xa, xb) = acc.real();
                }
    return c;
}

// Density-operator form p = tr(rho (E (x) F)).
inline Correlation correlation_from_state(const CMatrix& rho, const PvmFamily& e,
                                          const PvmFamily& f) {
    if (rho.dim() != e.dim * f.dim)
        throw std::invalid_argument("correlation_from_state: density operator dimension mismatch");
    Correlation c;
    for (int xa = 0; xa < 3; ++xa)
        for (int xb = 0; xb < 3; ++xb)
            for (int ya = 0; ya < 2; ++ya)
                for (int yb = 0; yb < 2; ++yb)
                    c(ya, yb, xa, xb) =
                        trace_of_product(rho, kron(e.effects[xa][ya], f.effects[xb][yb])).real();
    return c;
}

// Mixture of deterministic functions f: X -> Y.
struct ClassicalStrategy {
    struct Branch {
        std::array<int, 3> f{};
        double weight = 0.0;
    };
    std::vector<Branch> branches;

    void validate() const {
        double total = 0.0;
        for (const auto& b : branches) {
            if (b.weight < 0.0) throw std::invalid_argument("ClassicalStrategy: negative weight");
            for (int v : b.f)
                if (v != 0 && v != 1)
                    throw std::invalid_argument("ClassicalStrategy: outputs must be 0/1");
            total += b.weight;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("ClassicalStrategy: weights must sum to 1");
    }
};

inline Correlation classical_correlation(const ClassicalStrategy& s) {
    s.validate();
    Correlation c;
    for (const auto& b : s.branches)
        for (int xa = 0; xa < 3; ++xa)
            for (int xb = 0; xb < 3; ++xb) c(b.f[xa], b.f[xb], xa, xb) += b.weight;
    return c;
}

inline ClassicalStrategy deterministic_strategy(int f0, int f1, int f2) {
    return ClassicalStrategy{{{{f0, f1, f2}, 1.0}}};
}

// Biases a_x, b_x and correlator matrix c_{xA,xB}.
struct BiasForm {
    std::array<double, 3> a{};
    std::array<double, 3> b{};
    std::array<std::array<double, 3>, 3> c{};
};

inline bool check_nonsignalling(const Correlation& p, double tol = 1e-9) {
    for (int ya = 0; ya < 2; ++ya)
        for (int xa = 0; xa < 3; ++xa)
            for (int xb = 1; xb < 3; ++xb) {
                const double m0 = p(ya, 0, xa, 0) + p(ya, 1, xa, 0);
                const double mb = p(ya, 0, xa, xb) + p(ya, 1, xa, xb);
                if (std::abs(m0 - mb) > tol) return false;
            }
    for (int yb = 0; yb < 2; ++yb)
        for (int xb = 0; xb < 3; ++xb)
            for (int xa = 1; xa < 3; ++xa) {
                const double m0 = p(0, yb, 0, xb) + p(1, yb, 0, xb);
                const double ma = p(0, yb, xa, xb) + p(1, yb, xa, xb);
                if (std::abs(m0 - ma) > tol) return false;
            }
    return true;
}

inline bool check_symmetric(const Correlation& p, double tol = 1e-9) {
    for (int ya = 0; ya < 2; ++ya)
        for (int yb = 0; yb < 2; ++yb)
            for (int xa = 0; xa < 3; ++xa)
                for (int xb = 0; xb < 3; ++xb)
                    if (std::abs(p(ya, yb, xa, xb) - p(yb, ya, xb, xa)) > tol) return false;
    return true;
}

inline bool check_synchronous(const Correlation& p, double tol = 1e-9) {
    for (int x = 0; x < 3; ++x)
        if (p(0, 1, x, x) > tol || p(1, 0, x, x) > tol) return false;
    return true;
}

// Signed sums over outputs. Throws when a marginal depends on the other
// party's input, naming the violated marginal.
inline BiasForm to_bias_form(const Correlation& p, double tol = 1e-9) {
    BiasForm f;
    for (int xa = 0; xa < 3; ++xa) {
        double first = 0.0;
        for (int xb = 0; xb < 3; ++xb) {
            double ax = 0.0;
            for (int ya = 0; ya < 2; ++ya)
                for (int yb = 0; yb < 2; ++yb)
                    ax += (ya == 0 ? 1.0 : -1.0) * p(ya, yb, xa, xb);
            if (xb == 0)
                first = ax;
            else if (std::abs(ax - first) > tol)
                throw std::runtime_error(
                    "to_bias_form: signalling correlation, a-marginal for x_A=" +
                    std::to_string(xa) + " differs between x_B=0 and x_B=" + std::to_string(xb));
            f.a[xa] += ax / 3.0;
        }
    }
    for (int xb = 0; xb < 3; ++xb) {
        double first = 0.0;
        for (int xa = 0; xa < 3; ++xa) {
            double bx = 0.0;
            for (int ya = 0; ya < 2; ++ya)
                for (int yb = 0; yb < 2; ++yb)
                    bx += (yb == 0 ? 1.0 : -1.0) * p(ya, yb, xa, xb);
            if (xa == 0)
                first = bx;
            else if (std::abs(bx - first) > tol)
                throw std::runtime_error(
                    "to_bias_form: signalling correlation, b-marginal for x_B=" +
                    std::to_string(xb) + " differs between x_A=0 and x_A=" + std::to_string(xa));
            f.b[xb] += bx / 3.0;
        }
    }
    for (int xa = 0; xa < 3; ++xa)
        for (int xb = 0; xb < 3; ++xb) {
            double cxx = 0.0;
            for (int ya = 0; ya < 2; ++ya)
                for (int yb = 0; yb < 2; ++yb)
                    cxx += ((ya + yb) % 2 == 0 ? 1.0 : -1.0) * p(ya, yb, xa, xb);
            f.c[xa][xb] = cxx;
        }
    return f;
}

// Reconstruction p = (1 + (-1)^yA a + (-1)^yB b + (-1)^(yA+yB) c) / 4.
inline Correlation to_correlation(const BiasForm& f) {
    Correlation p;
    for (int ya = 0; ya < 2; ++ya)
        for (int yb = 0; yb < 2; ++yb)
            for (int xa = 0; xa < 3; ++xa)
                for (int xb = 0; xb < 3; ++xb) {
                    const double sa = (ya == 0 ? 1.0 : -1.0);
                    const double sb = (yb == 0 ? 1.0 : -1.0);
                    p(ya, yb, xa, xb) =
                        (1.0 + sa * f.a[xa] + sb * f.b[xb] + sa * sb * f.c[xa][xb]) / 4.0;
                }
    return p;
}

// Canonical synchronous quantum realization: c_{xA,xB} = <u_xA, u_xB>,
// unit diagonal, zero biases.
inline BiasForm from_unit_vectors(std::span<const double> u0, std::span<const double> u1,
                                  std::span<const double> u2, double tol = 1e-9) {
    const std::array<std::span<const double>, 3> u = {u0, u1, u2};
    for (const auto& v : u) {
        if (v.size() != u0.size())
            throw std::invalid_argument("from_unit_vectors: vectors must share a dimension");
        double sq = 0.0;
        for (double x : v) sq += x * x;
        if (std::abs(std::sqrt(sq) - 1.0) > tol)
            throw std::invalid_argument("from_unit_vectors: vector is not unit length");
    }
    BiasForm f;
    for (int xa = 0; xa < 3; ++xa)
        for (int xb = 0; xb < 3; ++xb) {
            if (xa == xb) {
                f.c[xa][xb] = 1.0;
                continue;
            }
            double dot = 0.0;
            for (std::size_t i = 0; i < u0.size(); ++i) dot += u[xa][i] * u[xb][i];
            f.c[xa][xb] = dot;
        }
    return f;
}

struct Asynchronicity {
    double total = 0.0;
    std::array<double, 3> per_basis{};
};

// S_x = p(0,1|x,x) + p(1,0|x,x); S = mean over x.
inline Asynchronicity asynchronicity(const Correlation& p) {
    Asynchronicity s;
    for (int x = 0; x < 3; ++x) {
        s.per_basis[x] = p(0, 1, x, x) + p(1, 0, x, x);
        s.total += s.per_basis[x];
    }
    s.total /= 3.0;
    return s;
}

}  // namespace synqkd

// hilbert.hpp
// Minimal dense complex linear algebra for small dimensions: square
// matrices, projection-valued measures, +/-1 observables, bipartite
// states and their Schmidt decomposition. Everything is a pure value.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace synqkd {

using cdouble = std::complex<double>;

// Dense square complex matrix, row-major.
class CMatrix {
  public:
    CMatrix() = default;
    explicit CMatrix(std::size_t dim) : dim_(dim), a_(dim * dim) {}

    static CMatrix identity(std::size_t dim) {
        CMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const { return dim_; }

    cdouble& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
    const cdouble& operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }

    CMatrix& operator+=(const CMatrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    CMatrix& operator*=(cdouble s) {
        for (auto& z : a_) z *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, cdouble s) { return a *= s; }
    friend CMatrix operator*(cdouble s, CMatrix a) { return a *= s; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        a.require_same_dim(b);
        const std::size_t n = a.dim_;
        CMatrix c(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const cdouble aik = a(i, k);
                if (aik == cdouble{}) continue;
                for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    CMatrix adjoint() const {
        CMatrix m(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    cdouble trace() const {
        cdouble t{};
        for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : a_) m = std::max(m, std::abs(z));
        return m;
    }

    bool all_finite() const {
        for (const auto& z : a_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

  private:
    void require_same_dim(const CMatrix& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("CMatrix dimension mismatch");
    }

    std::size_t dim_ = 0;
    std::vector<cdouble> a_;
};

// tr(A B) in O(dim^2), no intermediate product.
inline cdouble trace_of_product(const CMatrix& a, const CMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("trace_of_product: dimension mismatch");
    cdouble t{};
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) t += a(i, j) * b(j, i);
    return t;
}

// tr((A-B)^2) for Hermitian A, B; real by construction.
inline double trace_of_squared_difference(const CMatrix& a, const CMatrix& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("trace_of_squared_difference: dimension mismatch");
    double t = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) t += std::norm(a(i, j) - b(i, j));
    return t;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    const std::size_t da = a.dim(), db = b.dim();
    CMatrix c(da * db);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < da; ++j) {
            const cdouble aij = a(i, j);
            if (aij == cdouble{}) continue;
            for (std::size_t k = 0; k < db; ++k)
                for (std::size_t l = 0; l < db; ++l) c(i * db + k, j * db + l) = aij * b(k, l);
        }
    return c;
}

inline CMatrix direct_sum(const CMatrix& a, const CMatrix& b) {
    const std::size_t da = a.dim(), db = b.dim();
    CMatrix c(da + db);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < da; ++j) c(i, j) = a(i, j);
    for (std::size_t i = 0; i < db; ++i)
        for (std::size_t j = 0; j < db; ++j) c(da + i, da + j) = b(i, j);
    return c;
}

inline double hermiticity_defect(const CMatrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
    return m;
}

inline double max_abs_difference(const CMatrix& a, const CMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("max_abs_difference: dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

inline constexpr int num_inputs = 3;   // X = {0,1,2}
inline constexpr int num_outputs = 2;  // Y = {0,1}

// Binary projection-valued measures, one pair (E^x_0, E^x_1) per input.
struct PvmFamily {
    std::size_t dim = 0;
    std::array<std::array<CMatrix, 2>, 3> effects;

    const CMatrix& effect(int x, int y) const { return effects[check_x(x)][check_y(y)]; }
    CMatrix& effect(int x, int y) { return effects[check_x(x)][check_y(y)]; }

    static int check_x(int x) {
        if (x < 0 || x >= num_inputs) throw std::out_of_range("input index outside {0,1,2}");
        return x;
    }
    static int check_y(int y) {
        if (y < 0 || y >= num_outputs) throw std::out_of_range("output index outside {0,1}");
        return y;
    }
};

// +/-1-valued observable M = E_0 - E_1.
struct Observable {
    std::size_t dim = 0;
    CMatrix m;
};

// d=2 family with E^x_1 the projector onto (cos t_x)|0> + (sin t_x)|1>.
inline PvmFamily pvm_from_angles(double t0, double t1, double t2) {
    const std::array<double, 3> t = {t0, t1, t2};
    for (double v : t)
        if (!std::isfinite(v)) throw std::invalid_argument("pvm_from_angles: non-finite angle");
    PvmFamily f;
    f.dim = 2;
    for (int x = 0; x < num_inputs; ++x) {
        const double c = std::cos(t[x]), s = std::sin(t[x]);
        CMatrix e1(2);
        e1(0, 0) = c * c;
        e1(0, 1) = c * s;
        e1(1, 0) = s * c;
        e1(1, 1) = s * s;
        f.effects[x][1] = e1;
        f.effects[x][0] = CMatrix::identity(2) - e1;
    }
    return f;
}

// The ideal d=2 measurements: rank-1 projectors onto |1>,
// (sqrt3/2)|0> + (1/2)|1> and (sqrt3/2)|0> - (1/2)|1|. Entries are written
// out so the dyadic ones (3/4, 1/4, 0, 1) are exact in double precision.
inline PvmFamily ideal_pvms() {
    const double r = std::sqrt(3.0) / 4.0;
    PvmFamily f;
    f.dim = 2;

    CMatrix e01(2);
    e01(1, 1) = 1.0;  // |1><1|
    f.effects[0][1] = e01;

    CMatrix e11(2);
    e11(0, 0) = 0.75;
    e11(0, 1) = r;
    e11(1, 0) = r;
    e11(1, 1) = 0.25;
    f.effects[1][1] = e11;

    CMatrix e21(2);
    e21(0, 0) = 0.75;
    e21(0, 1) = -r;
    e21(1, 0) = -r;
    e21(1, 1) = 0.25;
    f.effects[2][1] = e21;

    for (int x = 0; x < num_inputs; ++x)
        f.effects[x][0] = CMatrix::identity(2) - f.effects[x][1];
    return f;
}

inline Observable observable(const PvmFamily& p, int x) {
    PvmFamily::check_x(x);
    return Observable{p.dim, p.effects[x][0] - p.effects[x][1]};
}

// Per-input defect report for the PVM axioms.
struct PvmValidation {
    std::array<double, 3> hermiticity{};
    std::array<double, 3> idempotency{};
    std::array<double, 3> completeness{};
    double tol = 0.0;
    bool pass = false;

    double max_defect() const {
        double m = 0.0;
        for (int x = 0; x < num_inputs; ++x)
            m = std::max({m, hermiticity[x], idempotency[x], completeness[x]});
        return m;
    }
};

inline PvmValidation validate_pvm(const PvmFamily& p, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("validate_pvm: tol must be positive");
    PvmValidation v;
    v.tol = tol;
    const CMatrix id = CMatrix::identity(p.dim);
    for (int x = 0; x < num_inputs; ++x) {
        for (int y = 0; y < num_outputs; ++y) {
            const CMatrix& e = p.effects[x][y];
            if (e.dim() != p.dim)
                throw std::invalid_argument("validate_pvm: effect dimension mismatch");
            if (!e.all_finite()) throw std::invalid_argument("validate_pvm: non-finite entries");
            v.hermiticity[x] = std::max(v.hermiticity[x], hermiticity_defect(e));
            v.idempotency[x] = std::max(v.idempotency[x], max_abs_difference(e * e, e));
        }
        v.completeness[x] = max_abs_difference(p.effects[x][0] + p.effects[x][1], id);
    }
    v.pass = v.max_defect() <= tol;
    return v;
}

// Pure state on H_A (x) H_B; amp[a * dim_b + b] is the |a>|b> amplitude.
struct BipartiteState {
    std::size_t dim_a = 0, dim_b = 0;
    std::vector<cdouble> amp;

    double norm() const {
        double s = 0.0;
        for (const auto& z : amp) s += std::norm(z);
        return std::sqrt(s);
    }
};

inline BipartiteState epr_pair() {
    BipartiteState s{2, 2, std::vector<cdouble>(4)};
    const double r = 1.0 / std::sqrt(2.0);
    s.amp[0] = r;   // |00>
    s.amp[3] = r;   // |11>
    return s;
}

// One group of equal Schmidt coefficients: sigma is the squared
// coefficient, shared by `multiplicity` paired basis vectors.
struct SchmidtGroup {
    double sigma = 0.0;
    std::size_t multiplicity = 0;
    std::vector<std::vector<cdouble>> basis_a;  // multiplicity vectors of length dim_a
    std::vector<std::vector<cdouble>> basis_b;
};

struct SchmidtDecomposition {
    std::size_t dim_a = 0, dim_b = 0;
    std::vector<SchmidtGroup> groups;  // sigma descending

    double coefficient_sum() const {  // sum sigma_j * d_j
        double s = 0.0;
        for (const auto& g : groups) s += g.sigma * static_cast<double>(g.multiplicity);
        return s;
    }

    BipartiteState reconstruct() const {
        BipartiteState st{dim_a, dim_b, std::vector<cdouble>(dim_a * dim_b)};
        for (const auto& g : groups) {
            const double coeff = std::sqrt(g.sigma);
            for (std::size_t m = 0; m < g.multiplicity; ++m)
                for (std::size_t a = 0; a < dim_a; ++a)
                    for (std::size_t b = 0; b < dim_b; ++b)
                        st.amp[a * dim_b + b] += coeff * g.basis_a[m][a] * g.basis_b[m][b];
        }
        return st;
    }
};

namespace detail {

// One-sided Jacobi SVD of a matrix given as n columns of length m with
// n <= m, so the columns can be made mutually orthogonal. Right rotations
// orthogonalize columns; V accumulates them. M = sum_k s_k left_k right_k†.
struct SvdResult {
    std::vector<double> singular;                // descending
    std::vector<std::vector<cdouble>> left;      // length m
    std::vector<std::vector<cdouble>> right;     // length n
};

inline SvdResult jacobi_svd(std::vector<std::vector<cdouble>> col) {
    const std::size_t n = col.size();
    const std::size_t m = col.empty() ? 0 : col[0].size();
    std::vector<std::vector<cdouble>> v(n, std::vector<cdouble>(n));
    for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

    const double eps = 1e-15;
    for (int sweep = 0; sweep < 64; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0;
                cdouble apq{};
                for (std::size_t i = 0; i < m; ++i) {
                    app += std::norm(col[p][i]);
                    aqq += std::norm(col[q][i]);
                    apq += std::conj(col[p][i]) * col[q][i];
                }
                const double off = std::abs(apq);
                if (off <= eps * std::sqrt(app * aqq) || off == 0.0) continue;
                rotated = true;
                // de-phase column q so the 2x2 Gram block becomes real,
                // then apply the real Jacobi rotation
                const cdouble dephase = std::conj(apq) / off;
                const double tau = (aqq - app) / (2.0 * off);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                for (std::size_t i = 0; i < m; ++i) {
                    const cdouble cp = col[p][i], cq = dephase * col[q][i];
                    col[p][i] = c * cp - sn * cq;
                    col[q][i] = sn * cp + c * cq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cdouble vp = v[p][i], vq = dephase * v[q][i];
                    v[p][i] = c * vp - sn * vq;
                    v[q][i] = sn * vp + c * vq;
                }
            }
        if (!rotated) break;
    }

    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < n; ++j) order[j] = j;
    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) {
        double sq = 0.0;
        for (const auto& z : col[j]) sq += std::norm(z);
        norms[j] = std::sqrt(sq);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

    SvdResult r;
    for (std::size_t j : order) {
        if (norms[j] <= 1e-14) continue;  // null space
        r.singular.push_back(norms[j]);
        std::vector<cdouble> u(m);
        for (std::size_t i = 0; i < m; ++i) u[i] = col[j][i] / norms[j];
        r.left.push_back(std::move(u));
        r.right.push_back(v[j]);
    }
    return r;
}

}  // namespace detail

// Schmidt decomposition with squared coefficients grouped when they agree
// within group_tol, so degenerate coefficients form multiplicity-d blocks.
inline SchmidtDecomposition schmidt_decompose(const BipartiteState& s, double group_tol = 1e-9) {
    if (!(group_tol > 0.0)) throw std::invalid_argument("schmidt_decompose: group_tol must be positive");
    if (s.amp.size() != s.dim_a * s.dim_b)
        throw std::invalid_argument("schmidt_decompose: amplitude length mismatch");
    if (s.norm() < 1e-12) throw std::invalid_argument("schmidt_decompose: zero state");

    // Feed the side with fewer dimensions as columns; for dim_b > dim_a
    // decompose the adjoint and swap the roles of the two sides.
    const bool flip = s.dim_b > s.dim_a;
    std::vector<std::vector<cdouble>> col;
    if (!flip) {
        col.assign(s.dim_b, std::vector<cdouble>(s.dim_a));
        for (std::size_t a = 0; a < s.dim_a; ++a)
            for (std::size_t b = 0; b < s.dim_b; ++b) col[b][a] = s.amp[a * s.dim_b + b];
    } else {
        col.assign(s.dim_a, std::vector<cdouble>(s.dim_b));
        for (std::size_t a = 0; a < s.dim_a; ++a)
            for (std::size_t b = 0; b < s.dim_b; ++b)
                col[a][b] = std::conj(s.amp[a * s.dim_b + b]);
    }
    const auto svd = detail::jacobi_svd(std::move(col));

    SchmidtDecomposition d;
    d.dim_a = s.dim_a;
    d.dim_b = s.dim_b;

    std::size_t k = 0;
    while (k < svd.singular.size()) {
        SchmidtGroup g;
        const double lead = svd.singular[k] * svd.singular[k];
        double sum = 0.0;
        while (k < svd.singular.size()) {
            const double sq = svd.singular[k] * svd.singular[k];
            if (!g.basis_a.empty() && std::abs(sq - lead) > group_tol) break;
            sum += sq;
            // amp matrix A = sum_k s_k u_k v_k†, so the B-side vectors are
            // the conjugated right factors.
            const auto& u = flip ? svd.right[k] : svd.left[k];
            const auto& vv = flip ? svd.left[k] : svd.right[k];
            g.basis_a.push_back(u);
            std::vector<cdouble> b(vv.size());
            for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::conj(vv[i]);
            g.basis_b.push_back(std::move(b));
            ++k;
        }
        g.multiplicity = g.basis_a.size();
        g.sigma = sum / static_cast<double>(g.multiplicity);
        d.groups.push_back(std::move(g));
    }
    return d;
}

}  // namespace synqkd

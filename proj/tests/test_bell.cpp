#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "synqkd/bell.hpp"
#include "synqkd/correlations.hpp"
#include "synqkd/rng.hpp"

using namespace synqkd;

namespace {

constexpr double pi = std::numbers::pi;

BiasForm synchronous_bias(double c01, double c02, double c12) {
    BiasForm b;
    for (int x = 0; x < 3; ++x) b.c[x][x] = 1.0;
    b.c[0][1] = b.c[1][0] = c01;
    b.c[0][2] = b.c[2][0] = c02;
    b.c[1][2] = b.c[2][1] = c12;
    return b;
}

ClassicalStrategy random_mixture(SplitMix64& rng) {
    ClassicalStrategy s;
    double total = 0.0;
    for (int f = 0; f < 8; ++f) {
        const double w = rng.next_double();
        s.branches.push_back({{f & 1, (f >> 1) & 1, (f >> 2) & 1}, w});
        total += w;
    }
    for (auto& b : s.branches) b.weight /= total;
    double sum = 0.0;
    for (const auto& b : s.branches) sum += b.weight;
    s.branches.back().weight += 1.0 - sum;
    return s;
}

}  // namespace

TEST_CASE("bell functionals on reference correlator patterns") {
    const BellReport trine = bell_functionals(synchronous_bias(-0.5, -0.5, -0.5));
    CHECK(trine.j[0] == Catch::Approx(0.375).margin(1e-15));
    CHECK(trine.j[1] == Catch::Approx(0.375).margin(1e-15));
    CHECK(trine.j[2] == Catch::Approx(0.375).margin(1e-15));
    CHECK(trine.j[3] == Catch::Approx(-0.125).margin(1e-15));
    CHECK_FALSE(trine.classical);
    CHECK(trine.quantum_feasible);
    REQUIRE(trine.violated_index.has_value());
    CHECK(*trine.violated_index == 3);

    const BellReport constant = bell_functionals(synchronous_bias(1, 1, 1));
    CHECK(constant.j == std::array<double, 4>{0.0, 0.0, 0.0, 1.0});
    CHECK(constant.classical);
    CHECK(constant.quantum_feasible);
    CHECK_FALSE(constant.violated_index.has_value());

    const BellReport uncorrelated = bell_functionals(synchronous_bias(0, 0, 0));
    CHECK(uncorrelated.j == std::array<double, 4>{0.25, 0.25, 0.25, 0.25});
    CHECK(uncorrelated.classical);
}

TEST_CASE("bell functionals require the synchronous normalization") {
    BiasForm b = synchronous_bias(0, 0, 0);
    b.c[1][1] = 0.9;
    CHECK_THROWS_AS(bell_functionals(b), std::invalid_argument);
}

TEST_CASE("effective J3 on reference tables") {
    CHECK(j3_effective(ideal_correlation()) == -0.125);  // exact at double precision
    CHECK(j3_effective(uniform_correlation()) == 0.25);
}

TEST_CASE("effective J3 agrees with the facet formula on synchronous tables") {
    SplitMix64 rng(31);
    for (int it = 0; it < 200; ++it) {
        Correlation c;
        switch (it % 3) {
            case 0: c = classical_correlation(random_mixture(rng)); break;
            case 1:
                c = tracial_correlation(pvm_from_angles(rng.uniform(-pi, pi),
                                                        rng.uniform(-pi, pi),
                                                        rng.uniform(-pi, pi)));
                break;
            default:
                c = to_correlation(synchronous_bias(rng.uniform(-0.5, 1), rng.uniform(-0.5, 1),
                                                    rng.uniform(-0.5, 1)));
        }
        const double direct = j3_effective(c);
        const double facet = bell_functionals(to_bias_form(c)).j[3];
        CHECK(std::abs(direct - facet) <= 1e-12);
    }
}

TEST_CASE("classify the ideal correlation") {
    const BellReport r = classify(ideal_correlation());
    CHECK_FALSE(r.classical);
    CHECK(r.quantum_feasible);
    REQUIRE(r.violated_index.has_value());
    CHECK(*r.violated_index == 3);
    CHECK(r.j[0] == Catch::Approx(0.375).margin(1e-12));
}

TEST_CASE("classify a classical mixture") {
    SplitMix64 rng(37);
    const BellReport r = classify(classical_correlation(random_mixture(rng)));
    CHECK(r.classical);
    CHECK(r.quantum_feasible);
}

TEST_CASE("classify flags a nonsignalling-only violation as quantum infeasible") {
    const Correlation c = to_correlation(synchronous_bias(-1, -1, -1));
    const BellReport r = classify(c);
    CHECK(r.j[3] == Catch::Approx(-0.5).margin(1e-15));
    CHECK_FALSE(r.classical);
    CHECK_FALSE(r.quantum_feasible);
}

TEST_CASE("classify names the failed predicate") {
    CHECK_THROWS_WITH(classify(uniform_correlation()),
                      Catch::Matchers::ContainsSubstring("synchronous"));

    Correlation sig = ideal_correlation();
    sig(0, 0, 0, 1) += 0.01;
    const double scale = 1.0 / 1.01;
    for (int ya = 0; ya < 2; ++ya)
        for (int yb = 0; yb < 2; ++yb) sig(ya, yb, 0, 1) *= scale;
    CHECK_THROWS_WITH(classify(sig), Catch::Matchers::ContainsSubstring("nonsignalling"));

    BiasForm asym = synchronous_bias(0.3, 0.1, -0.2);
    asym.c[0][1] = 0.3;
    asym.c[1][0] = 0.1;  // break the transpose symmetry
    CHECK_THROWS_WITH(classify(to_correlation(asym)),
                      Catch::Matchers::ContainsSubstring("symmetric"));
}

TEST_CASE("quantum families satisfy the -1/8 bound with at most one violation") {
    SplitMix64 rng(41);
    for (int it = 0; it < 1000; ++it) {
        const Correlation c = tracial_correlation(pvm_from_angles(
            rng.uniform(-pi, pi), rng.uniform(-pi, pi), rng.uniform(-pi, pi)));
        const BellReport r = classify(c);
        int negatives = 0;
        for (double j : r.j) {
            CHECK(j >= -0.125 - 1e-9);
            if (j < -1e-9) ++negatives;
        }
        CHECK(negatives <= 1);
        CHECK(r.quantum_feasible);
    }
}

TEST_CASE("classical correlations satisfy all four inequalities") {
    SplitMix64 rng(43);
    for (int f = 0; f < 8; ++f) {
        const auto det = deterministic_strategy(f & 1, (f >> 1) & 1, (f >> 2) & 1);
        const BellReport r = classify(classical_correlation(det));
        for (double j : r.j) CHECK(j >= -1e-12);
    }
    for (int it = 0; it < 1000; ++it) {
        const BellReport r = classify(classical_correlation(random_mixture(rng)));
        for (double j : r.j) CHECK(j >= -1e-12);
        CHECK(r.classical);
    }
}

TEST_CASE("near-maximal violations pin the correlator pattern") {
    // dense grid around the extremal triple: every point with
    // |J3 + 1/8| <= 1e-6 must have its correlators within 1e-2 of -1/2
    int close_points = 0;
    for (int i = -10; i <= 10; ++i)
        for (int j = -10; j <= 10; ++j) {
            const double d1 = i * 1e-3, d2 = j * 1e-3;
            const double p1 = 2 * pi / 3 + d1, p2 = 4 * pi / 3 + d2;
            const std::vector<double> u0 = {1.0, 0.0};
            const std::vector<double> u1 = {std::cos(p1), std::sin(p1)};
            const std::vector<double> u2 = {std::cos(p2), std::sin(p2)};
            const BiasForm b = from_unit_vectors(u0, u1, u2);
            const double j3 = (1.0 + b.c[0][1] + b.c[0][2] + b.c[1][2]) / 4.0;
            if (std::abs(j3 + 0.125) > 1e-6) continue;
            ++close_points;
            CHECK(std::abs(b.c[0][1] + 0.5) <= 1e-2);
            CHECK(std::abs(b.c[0][2] + 0.5) <= 1e-2);
            CHECK(std::abs(b.c[1][2] + 0.5) <= 1e-2);
        }
    CHECK(close_points > 0);
}

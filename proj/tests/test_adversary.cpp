#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "synqkd/adversary.hpp"
#include "synqkd/bell.hpp"
#include "synqkd/rng.hpp"

using namespace synqkd;

namespace {

Correlation random_strategy(SplitMix64& rng) {
    Correlation q;
    for (int xa = 0; xa < 3; ++xa)
        for (int xb = 0; xb < 3; ++xb) {
            double total = 0.0;
            double w[4];
            for (double& v : w) {
                v = rng.next_double() + 1e-3;
                total += v;
            }
            for (int k = 0; k < 4; ++k) q(k >> 1, k & 1, xa, xb) = w[k] / total;
        }
    return q;
}

EveStats stats_of(const Correlation& q) {
    return {j3_effective(q), asynchronicity(q).total};
}

}  // namespace

TEST_CASE("guess distribution") {
    CHECK(guess_distribution(0.0, 1) == std::array<double, 3>{0.0, 1.0, 0.0});

    const auto uniform = guess_distribution(2.0 / 3.0, 0);
    for (double w : uniform) CHECK(w == Catch::Approx(1.0 / 3.0).margin(1e-15));

    const auto skew = guess_distribution(0.1, 2);
    CHECK(skew[0] == Catch::Approx(0.05).margin(1e-15));
    CHECK(skew[1] == Catch::Approx(0.05).margin(1e-15));
    CHECK(skew[2] == Catch::Approx(0.9).margin(1e-15));

    CHECK_THROWS_AS(guess_distribution(-0.01, 0), std::invalid_argument);
    CHECK_THROWS_AS(guess_distribution(0.7, 0), std::invalid_argument);
}

TEST_CASE("eve model validation") {
    EveModel m{0.8, ideal_correlation()};
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    Correlation broken = ideal_correlation();
    broken(0, 0, 1, 2) += 0.3;
    EveModel m2{0.1, broken};
    CHECK_THROWS_AS(m2.validate(), std::invalid_argument);
}

TEST_CASE("mixing with zero uncertainty is the identity") {
    SplitMix64 rng(51);
    const Correlation q = random_strategy(rng);
    const Correlation p = observed_correlation({0.0, q});
    for (int i = 0; i < 36; ++i) CHECK(p.p[i] == q.p[i]);
}

TEST_CASE("mixing the ideal strategy at maximal uncertainty") {
    const Correlation p = observed_correlation({2.0 / 3.0, ideal_correlation()});
    CHECK(j3_effective(p) == Catch::Approx(0.25).margin(1e-12));
    CHECK(asynchronicity(p).total == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("the uniform strategy is invariant under mixing") {
    SplitMix64 rng(53);
    for (int it = 0; it < 20; ++it) {
        const double eps = rng.uniform(0.0, 2.0 / 3.0);
        const Correlation p = observed_correlation({eps, uniform_correlation()});
        for (double v : p.p) CHECK(v == Catch::Approx(0.25).margin(1e-12));
    }
}

TEST_CASE("forward map at the endpoints") {
    const auto [j0, s0] = forward_stats({-0.125, 0.0}, 0.0);
    CHECK(j0 == -0.125);
    CHECK(s0 == 0.0);

    const auto [j1, s1] = forward_stats({-0.125, 0.0}, 2.0 / 3.0);
    CHECK(j1 == Catch::Approx(0.25).margin(1e-12));
    CHECK(s1 == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("forward map agrees with table-level mixing") {
    SplitMix64 rng(57);
    // ideal strategy across random uncertainties
    for (int it = 0; it < 100; ++it) {
        const double eps = rng.uniform(0.0, 2.0 / 3.0);
        const Correlation p = observed_correlation({eps, ideal_correlation()});
        const auto [j3, s] = forward_stats({-0.125, 0.0}, eps);
        CHECK(j3_effective(p) == Catch::Approx(j3).margin(1e-12));
        CHECK(asynchronicity(p).total == Catch::Approx(s).margin(1e-12));
    }
    // arbitrary normalized strategies
    for (int it = 0; it < 100; ++it) {
        const Correlation q = random_strategy(rng);
        const double eps = rng.uniform(0.0, 2.0 / 3.0);
        const Correlation p = observed_correlation({eps, q});
        const auto [j3, s] = forward_stats(stats_of(q), eps);
        CHECK(j3_effective(p) == Catch::Approx(j3).margin(1e-12));
        CHECK(asynchronicity(p).total == Catch::Approx(s).margin(1e-12));
    }
}

TEST_CASE("inverse at zero uncertainty forces the ideal statistics") {
    const EveStats st = invert_stats(0.0, 0.0, 0.0);
    CHECK(st.j3 == -0.125);
    CHECK(st.s == 0.0);
}

TEST_CASE("inverse is singular at epsilon = 2/3") {
    CHECK_THROWS_AS(invert_stats(0.01, 0.01, 2.0 / 3.0), std::domain_error);
}

TEST_CASE("forward of inverse reproduces the observed statistics") {
    SplitMix64 rng(59);
    for (int it = 0; it < 1000; ++it) {
        const double lambda = rng.uniform(0.0, 0.125);
        const double mu = rng.uniform(0.0, 0.5);
        const double eps = rng.uniform(0.0, (2.0 - 0.05) / 3.0);  // |3e-2| >= 0.05
        const EveStats st = invert_stats(lambda, mu, eps);
        const auto [j3, s] = forward_stats(st, eps);
        CHECK(j3 == Catch::Approx(-0.125 + lambda).margin(1e-10));
        CHECK(s == Catch::Approx(mu).margin(1e-10));
    }
}

TEST_CASE("inverse of forward recovers the strategy statistics") {
    SplitMix64 rng(61);
    for (int it = 0; it < 1000; ++it) {
        const EveStats st{rng.uniform(-0.125, 0.25), rng.uniform(0.0, 0.5)};
        const double eps = rng.uniform(0.0, (2.0 - 0.05) / 3.0);
        const auto [j3, s] = forward_stats(st, eps);
        const EveStats back = invert_stats(j3 + 0.125, s, eps);
        CHECK(back.j3 == Catch::Approx(st.j3).margin(1e-10));
        CHECK(back.s == Catch::Approx(st.s).margin(1e-10));
    }
}

TEST_CASE("epsilon_max reference values") {
    CHECK(epsilon_max(0.0, 0.0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(epsilon_max(0.125, 0.05) == Catch::Approx(0.03718142191496711).margin(1e-9));
    CHECK_THROWS_AS(epsilon_max(0.2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_max(0.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_max(0.0, 1.0), NoThresholdError);
}

TEST_CASE("epsilon_delta_max reference values") {
    CHECK(epsilon_delta_max(0.01, 0.125, 0.05) ==
          Catch::Approx(0.030242611928498750).margin(1e-9));

    SplitMix64 rng(67);
    for (int it = 0; it < 200; ++it) {
        const double lambda = rng.uniform(0.0, 0.125);
        const double mu = rng.uniform(0.0, 0.3);
        CHECK(epsilon_delta_max(0.0, lambda, mu) ==
              Catch::Approx(epsilon_max(lambda, mu)).margin(1e-14));
    }
}

TEST_CASE("eve's asynchronicity changes sign at epsilon_max") {
    const double lambda = 0.125, mu = 0.05;
    const double em = epsilon_max(lambda, mu);
    CHECK(invert_stats(lambda, mu, em).s == Catch::Approx(0.0).margin(1e-9));
    CHECK(invert_stats(lambda, mu, em + 1e-4).s < 0.0);
    CHECK(invert_stats(lambda, mu, em - 1e-4).s > 0.0);
}

TEST_CASE("at the delta threshold eve's asynchronicity equals delta") {
    const double delta = 0.01, lambda = 0.125, mu = 0.05;
    const double ed = epsilon_delta_max(delta, lambda, mu);
    CHECK(invert_stats(lambda, mu, ed).s == Catch::Approx(delta).margin(1e-8));
}

TEST_CASE("bisection oracle validates the closed forms") {
    for (int k = 0; k <= 10; ++k) {
        const double mu = 0.005 * k;
        const auto root = epsilon_threshold_bisect(0.0, 0.125, mu);
        REQUIRE(root.has_value());
        CHECK(*root == Catch::Approx(epsilon_max(0.125, mu)).margin(1e-9));
    }
    for (int k = 2; k <= 10; ++k) {  // bracket needs mu >= delta
        const double mu = 0.005 * k;
        const auto root = epsilon_threshold_bisect(0.01, 0.125, mu);
        REQUIRE(root.has_value());
        CHECK(*root == Catch::Approx(epsilon_delta_max(0.01, 0.125, mu)).margin(1e-9));
    }
    CHECK_FALSE(epsilon_threshold_bisect(0.01, 0.125, 0.005).has_value());
}

TEST_CASE("threshold pairs order correctly") {
    SplitMix64 rng(71);
    for (int it = 0; it < 300; ++it) {
        const double lambda = rng.uniform(0.0, 0.125);
        const double mu = rng.uniform(0.0, 0.2);
        const double delta = rng.uniform(0.0, mu);
        const Thresholds t = compute_thresholds(lambda, mu, delta);
        REQUIRE(t.eps_max.has_value());
        REQUIRE(t.eps_delta_max.has_value());
        CHECK(*t.eps_delta_max <= *t.eps_max + 1e-12);
        CHECK(*t.eps_delta_max >= -1e-12);  // delta <= mu keeps it nonnegative
    }
    const Thresholds none = compute_thresholds(0.0, 1.0);
    CHECK_FALSE(none.eps_max.has_value());
}

TEST_CASE("feasibility curves") {
    const FeasibilityCurve base = feasibility_curve(0.125, 0.05, 0.0, 0.005);
    REQUIRE(base.points.size() == 11);
    CHECK(base.monotone);
    CHECK(base.points.front().second == Catch::Approx(0.0).margin(1e-12));
    CHECK(base.points.back().second == Catch::Approx(0.0371814219).margin(1e-6));

    const FeasibilityCurve shifted = feasibility_curve(0.125, 0.05, 0.01, 0.005);
    REQUIRE(shifted.points.size() == 11);
    CHECK(shifted.monotone);
    for (std::size_t i = 0; i < 11; ++i)
        CHECK(shifted.points[i].second < base.points[i].second);

    CHECK_THROWS_AS(feasibility_curve(0.125, 0.05, 0.0, 0.0), std::invalid_argument);
}

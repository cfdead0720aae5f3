#include <doctest.h>

#include <cmath>
#include <random>

#include "fdtruss/energy.hpp"
#include "fdtruss/errors.hpp"
#include "fdtruss/pareto.hpp"
#include "oracles.hpp"

using namespace fdtruss;

namespace {

std::vector<ParetoPoint> front(std::initializer_list<Objectives> s) {
    std::vector<ParetoPoint> out;
    for (const auto& o : s) out.push_back(ParetoPoint{o, Eigen::VectorXd::Constant(1, o[0]), {}, {}, {}});
    return out;
}

} // namespace

TEST_CASE("slopes and ratios on a three-point front") {
    const auto est = estimate_ratios(front({{4, 4}, {1, 10}, {2, 6}}));
    const auto& p = est.points;
    REQUIRE(p.size() == 3);
    CHECK(p[0].S[0] == 1.0);
    CHECK_FALSE(p[0].beta.has_value());
    CHECK(*p[1].beta == doctest::Approx(-4.0));
    CHECK(*p[2].beta == doctest::Approx(-1.0));
    CHECK(*p[0].mu_ratio == doctest::Approx(4.0));
    CHECK(*p[1].mu_ratio == doctest::Approx(2.0));
    CHECK(*p[2].mu_ratio == doctest::Approx(1.0));
    CHECK(*p[1].r_est == doctest::Approx(std::sqrt(2.0)));
    CHECK_FALSE(est.nonconvex);
    // Genomes travel with their points.
    CHECK(p[1].genome[0] == 2.0);

    const auto bent = estimate_ratios(front({{1, 10}, {2, 9}, {3, 5}}));
    CHECK(bent.nonconvex);
}

TEST_CASE("ratio lies between neighboring slopes on convex fronts") {
    std::vector<ParetoPoint> pts;
    for (int i = 1; i <= 12; ++i) {
        const double x = i;
        pts.push_back(ParetoPoint{{x, 1.0 / x}, {}, {}, {}, {}});
    }
    const auto est = estimate_ratios(pts);
    const auto& p = est.points;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        CHECK(*p[i].mu_ratio <= std::abs(*p[i].beta));
        CHECK(*p[i].mu_ratio >= std::abs(*p[i + 1].beta));
    }
}

TEST_CASE("too few points") {
    CHECK_THROWS_AS(estimate_ratios(front({{1, 2}, {2, 1}})), TooFewPoints);
    // Duplicates and dominated points do not count.
    CHECK_THROWS_AS(estimate_ratios(front({{1, 2}, {1, 2}, {2, 1}, {3, 3}})), TooFewPoints);
    CHECK_THROWS_AS(solution_for_ratio({}, 1.0), TooFewPoints);
    CHECK_THROWS_AS(solution_for_ratio(front({{1, 1}}), 1.0), TooFewPoints);
}

TEST_CASE("front cleaning") {
    const auto c = clean_front(front({{3, 1}, {1, 5}, {2, 5}, {1, 5 + 1e-13}, {2, 2}, {4, 1}}));
    REQUIRE(c.size() == 3);
    CHECK(c[0].S == Objectives{1, 5});
    CHECK(c[1].S == Objectives{2, 2});
    CHECK(c[2].S == Objectives{3, 1});
    CHECK(clean_front({}).empty());
}

TEST_CASE("choosing a point for a ratio") {
    auto pts = estimate_ratios(front({{1, 10}, {2, 6}, {4, 4}, {8, 3}})).points;
    // r_est runs 2, sqrt(2), sqrt(0.5), 0.5.
    CHECK(&solution_for_ratio(pts, 2.0) == &pts[0]);
    CHECK(&solution_for_ratio(pts, 100.0) == &pts[0]);
    CHECK(&solution_for_ratio(pts, 1e-3) == &pts[3]);
    CHECK(&solution_for_ratio(pts, *pts[1].r_est) == &pts[1]);

    // Equal distance: the smaller Fx wins.
    pts[0].r_est = 10.0;
    pts[1].r_est = 3.0;
    pts[2].r_est = 1.0;
    CHECK(&solution_for_ratio(pts, 2.0) == &pts[1]);
}

TEST_CASE("hypervolume") {
    const std::vector<Objectives> pts{{1, 3}, {2, 2}, {3, 1}};
    CHECK(hypervolume(pts, {4, 4}) == doctest::Approx(6.0));
    CHECK(hypervolume(std::vector<Objectives>{{1, 1}}, {2, 3}) == doctest::Approx(2.0));
    // Points outside the reference box contribute nothing.
    CHECK(hypervolume(std::vector<Objectives>{{5, 1}, {1, 5}}, {4, 4}) == 0.0);
    // A dominated point adds nothing.
    const std::vector<Objectives> more{{1, 3}, {2, 2}, {3, 1}, {3, 3}};
    CHECK(hypervolume(more, {4, 4}) == doctest::Approx(6.0));
    CHECK(hypervolume(std::vector<Objectives>{}, {4, 4}) == 0.0);
}

TEST_CASE("realization at a ratio") {
    const auto g = generate_grid(3, 2, 3.0, 2.0);
    std::mt19937_64 rng(79);
    const auto q = oracle::random_feasible_q(g, rng);

    const auto one = realize_at_ratio(g, q, 1.0, 50.0, 1.0, 1.0);
    const auto direct = fully_stressed_sizing(g, realize_design(g, q, 1.0, 1.0));
    const auto [norm, info] = normalize_volume(g, direct, 50.0);
    CHECK(one.compliance == doctest::Approx(compliance(norm, g)).epsilon(1e-12));
    CHECK(one.design.volume() == doctest::Approx(50.0));

    for (double r : {0.5, 2.5}) {
        const auto s = scale_structure(g, r, 1.0);
        const auto real = realize_at_ratio(g, q, r, 50.0, 1.0, 1.0);
        const auto raw = fully_stressed_sizing(s, realize_design(s, q, 1.0, 1.0));
        // Fully stressed: the energy form equals the compliance before normalization.
        const double predicted = design_objectives(s, raw).F / real.normalization.scale;
        CHECK(oracle::rel(real.compliance, predicted) <= 1e-6);
    }
    CHECK_THROWS_AS(realize_at_ratio(g, q, 0.0, 50.0, 1.0, 1.0), ConfigError);
}

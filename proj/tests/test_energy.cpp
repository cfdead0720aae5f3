#include <doctest.h>

#include <cmath>
#include <random>

#include "fdtruss/energy.hpp"
#include "fdtruss/errors.hpp"
#include "oracles.hpp"

using namespace fdtruss;

namespace {

GroundStructure single_member(Point a, Point b) {
    return GroundStructure({a, b}, {{NodeId{0}, NodeId{1}}}, {{NodeId{0}}}, {{NodeId{1}, 0.0, 1.0}});
}

} // namespace

TEST_CASE("split of single members") {
    SUBCASE("horizontal") {
        const auto g = single_member({0, 0}, {2, 0});
        const auto geom = solve_free_coordinates(g, Eigen::VectorXd::Constant(1, 3.0));
        const auto v = split_objectives(g, geom, Eigen::VectorXd::Constant(1, 3.0), 1.0, 1.0);
        CHECK(v.Fx == doctest::Approx(12.0));
        CHECK(v.Fy == 0.0);
        CHECK(v.F == doctest::Approx(12.0));
    }
    SUBCASE("45 degrees") {
        const auto g = single_member({0, 0}, {1, 1});
        const auto geom = solve_free_coordinates(g, Eigen::VectorXd::Constant(1, -1.0));
        const auto v = split_objectives(g, geom, Eigen::VectorXd::Constant(1, -1.0), 1.0, 1.0);
        CHECK(v.Fx == doctest::Approx(1.0));
        CHECK(v.Fy == doctest::Approx(1.0));
    }
    SUBCASE("material ratio scales linearly") {
        const auto g = single_member({0, 0}, {1, 2});
        const auto geom = solve_free_coordinates(g, Eigen::VectorXd::Constant(1, 1.0));
        const auto v = split_objectives(g, geom, Eigen::VectorXd::Constant(1, 1.0), 3.0, 2.0);
        CHECK(v.Fx == doctest::Approx(1.5));
        CHECK(v.Fy == doctest::Approx(6.0));
    }
}

TEST_CASE("energy split equals the direct length form") {
    const auto g = generate_grid(3, 2, 3.0, 2.0);
    std::mt19937_64 rng(47);
    for (int t = 0; t < 20; ++t) {
        const auto q = oracle::random_feasible_q(g, rng);
        const auto d = realize_design(g, q, 1.0, 1.0);
        const auto v = design_objectives(g, d);
        double direct = 0.0;
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            direct += d.geometry.lengths[i] * d.geometry.lengths[i] * std::abs(d.q_tilde[i]);
        }
        CHECK(oracle::rel(v.Fx + v.Fy, v.F) <= 1e-15);
        CHECK(oracle::rel(v.F, direct) <= 1e-12);
    }
}

TEST_CASE("smoothed weighted sum") {
    const auto g = generate_grid(3, 2, 3.0, 2.0);
    std::mt19937_64 rng(53);
    const auto q = oracle::random_feasible_q(g, rng);
    const auto geom = solve_free_coordinates(g, q);
    const double c = 1e-10;
    const auto v = split_objectives(g, geom, q, 1.0, 1.0);
    const double w = weighted_sum(g, geom, q, 2.0, 0.5, 1.0, 1.0, c);
    const double exact = 2.0 * v.Fx + 0.5 * v.Fy;
    // sqrt(q^2 + c) lies in [|q|, |q| + sqrt(c)].
    double slack = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const double dx = geom.lengths[i];
        slack += 2.0 * dx * dx * std::sqrt(c);
    }
    CHECK(w >= exact);
    CHECK(w <= exact + slack);

    // A vanishing density still costs sqrt(c).
    const auto one = single_member({0, 0}, {1, 0});
    const auto g1 = solve_free_coordinates(one, Eigen::VectorXd::Constant(1, 1.0));
    CHECK(weighted_sum(one, g1, Eigen::VectorXd::Zero(1), 1.0, 1.0, 1.0, 1.0, 1e-4) ==
          doctest::Approx(1e-2));

    CHECK_THROWS_AS(weighted_sum(g, geom, q, -1.0, 1.0, 1.0, 1.0, c), ConfigError);
    CHECK_THROWS_AS(weighted_sum(g, geom, q, 1.0, 1.0, 1.0, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(split_objectives(g, geom, Eigen::VectorXd::Zero(3), 1.0, 1.0), ConfigError);
}

TEST_CASE("scaled structure reproduces the weighted split") {
    const auto g = generate_grid(3, 2, 3.0, 2.0);
    std::mt19937_64 rng(59);
    for (double mu : {0.25, 2.25, 6.25}) {
        const auto q = oracle::random_feasible_q(g, rng);
        const auto v = split_objectives(g, solve_free_coordinates(g, q), q, 1.0, 1.0);
        const auto s = scale_structure(g, std::sqrt(mu), 1.0);
        const auto w = split_objectives(s, solve_free_coordinates(s, q), q, 1.0, 1.0);
        CHECK(oracle::rel(w.F, mu * v.Fx + v.Fy) <= 1e-9);
        CHECK(oracle::rel(w.Fx, mu * v.Fx) <= 1e-9);
        CHECK(oracle::rel(w.Fy, v.Fy) <= 1e-9);
    }
}

TEST_CASE("volume normalization") {
    const auto g = oracle::two_bar();
    const auto d = realize_design(g, Eigen::Vector2d(0.5, 0.5), 1.0, 1.0);
    const double v0 = d.volume();
    CHECK(v0 == doctest::Approx(2.0));
    const auto [n, info] = normalize_volume(g, d, 10.0);
    CHECK(n.volume() == doctest::Approx(10.0));
    CHECK(info.scale == doctest::Approx(5.0));
    CHECK(info.sigma_bar_adjusted == doctest::Approx(0.2));
    // Forces do not change, stresses drop by the area factor.
    CHECK(n.N_tilde[0] == doctest::Approx(d.N_tilde[0]));
    CHECK(std::abs(n.stresses()[0]) == doctest::Approx(info.sigma_bar_adjusted));
    CHECK(compliance(n, g) == doctest::Approx(compliance(d, g) / 5.0));

    auto empty = d;
    empty.areas.setZero();
    CHECK_THROWS_AS(normalize_volume(g, empty, 1.0), ZeroVolume);
    CHECK_THROWS_AS(normalize_volume(g, d, 0.0), ConfigError);
}

TEST_CASE("topology readout") {
    Eigen::VectorXd q(5);
    q << 1.0, -2.0, 1.9e-6, -2.1e-6, 0.0;
    const auto keep = retained_members(q);
    CHECK(keep == std::vector<bool>{true, true, false, true, false});
    CHECK(retained_members(Eigen::VectorXd::Zero(3)) == std::vector<bool>(3, false));
    CHECK(retained_members(Eigen::VectorXd()).empty());
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "fdtruss/errors.hpp"
#include "fdtruss/wsopt.hpp"
#include "oracles.hpp"

using namespace fdtruss;

namespace {

WSConfig quick() {
    WSConfig c;
    c.starts = 1;
    c.resize = false;
    c.max_iters = 60;
    return c;
}

} // namespace

TEST_CASE("accepted objective values never increase") {
    const auto g = generate_grid(2, 1, 2.0, 1.0);
    auto cfg = quick();
    cfg.mu_x = 2.0;
    const auto res = minimize_from(g, initial_force_densities(g), cfg, 1.0, 1.0);
    REQUIRE(res.history.size() >= 2);
    for (std::size_t i = 1; i < res.history.size(); ++i) {
        CHECK(res.history[i] <= res.history[i - 1]);
    }
    CHECK(res.F_star == doctest::Approx(res.history.back()).epsilon(1e-12));
    CHECK(res.F_star < res.history.front());
    CHECK(res.q.minCoeff() >= cfg.q_lower);
    CHECK(res.q.maxCoeff() <= cfg.q_upper);
    CHECK(res.F_star == doctest::Approx(weighted_objective(g, res.q, cfg, 1.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("gradient agrees with a wide central difference") {
    const auto g = generate_grid(2, 1, 2.0, 1.0);
    auto cfg = quick();
    cfg.mu_x = 0.5;
    std::mt19937_64 rng(73);
    const auto q = oracle::random_feasible_q(g, rng, 2.0);
    const auto grad = weighted_gradient(g, q, cfg, 1.0, 1.0);
    const double h = 1e-4;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        Eigen::VectorXd p = q, m = q;
        p[i] += h;
        m[i] -= h;
        const double fd = (weighted_objective(g, p, cfg, 1.0, 1.0) -
                           weighted_objective(g, m, cfg, 1.0, 1.0)) /
                          (2.0 * h);
        CHECK(std::abs(grad[i] - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("infeasible points evaluate to infinity") {
    const auto g = generate_grid(2, 1, 2.0, 1.0);
    const auto cfg = quick();
    CHECK(std::isinf(weighted_objective(g, Eigen::VectorXd::Zero(11), cfg, 1.0, 1.0)));
    auto one = cfg;
    one.start = Eigen::VectorXd::Zero(11);
    CHECK_THROWS_AS(minimize(g, one, 1.0, 1.0), StartInfeasible);
    CHECK_THROWS_AS(minimize_from(g, Eigen::VectorXd::Zero(11), cfg, 1.0, 1.0),
                    StartInfeasible);
}

TEST_CASE("common weight factor does not move the optimum") {
    const auto g = generate_grid(2, 1, 2.0, 1.0);
    auto a = quick();
    a.mu_x = 1.5;
    auto b = a;
    b.mu_x = 3.0;
    b.mu_y = 2.0;
    const auto q0 = initial_force_densities(g);
    CHECK(weighted_objective(g, q0, b, 1.0, 1.0) == 2.0 * weighted_objective(g, q0, a, 1.0, 1.0));
    const auto ra = minimize_from(g, q0, a, 1.0, 1.0);
    const auto rb = minimize_from(g, q0, b, 1.0, 1.0);
    CHECK(oracle::rel(rb.F_star, 2.0 * ra.F_star) <= 1e-6);
    CHECK(oracle::rel(rb.objectives.Fx, ra.objectives.Fx) <= 1e-3);
    CHECK(oracle::rel(rb.objectives.Fy, ra.objectives.Fy) <= 1e-3);
}

TEST_CASE("structure without free nodes") {
    const auto g = oracle::two_bar();
    auto cfg = quick();
    cfg.start = Eigen::Vector2d(0.5, 0.5);
    const auto res = minimize(g, cfg, 1.0, 1.0);
    CHECK(std::isfinite(res.F_star));
    // The geometry is fixed, so the recomputed densities are the two-bar values.
    CHECK(res.objectives.Fx == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.objectives.Fy == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("unit aspect ratio makes both methods identical") {
    const auto g = generate_grid(2, 1, 2.0, 1.0);
    WSConfig cfg;
    cfg.starts = 1;
    cfg.max_iters = 80;
    const auto s = scaling_method(g, 1.0, 10.0, 1.0, 1.0, cfg);
    const auto w = weighted_method(g, 1.0, 10.0, 1.0, 1.0, cfg);
    CHECK(s.compliance == w.compliance);
    CHECK(s.design.volume() == doctest::Approx(10.0));
    CHECK(s.compliance > 0.0);
}

TEST_CASE("invalid settings") {
    const auto g = generate_grid(1, 1, 1.0, 1.0);
    auto bad = [&](auto edit) {
        auto c = quick();
        edit(c);
        CHECK_THROWS_AS(minimize(g, c, 1.0, 1.0), ConfigError);
    };
    bad([](WSConfig& c) { c.c = 0.0; });
    bad([](WSConfig& c) { c.mu_x = -1.0; });
    bad([](WSConfig& c) { c.starts = 0; });
    bad([](WSConfig& c) { c.q_lower = 1.0; c.q_upper = 0.0; });
    CHECK_THROWS_AS(scaling_method(g, 0.0, 1.0, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(minimize_from(g, Eigen::VectorXd::Ones(2), quick(), 1.0, 1.0), ConfigError);
}

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "fdtruss/errors.hpp"
#include "fdtruss/experiment.hpp"
#include "fdtruss/io.hpp"
#include "fdtruss/render.hpp"
#include "oracles.hpp"

using namespace fdtruss;

namespace {

std::size_t count_lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::size_t count_of(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

} // namespace

TEST_CASE("problem files round trip") {
    const auto g = generate_grid(3, 2, 3.0, 2.0);
    const auto back = parse_problem(problem_json(g));
    CHECK(back.node_count() == g.node_count());
    CHECK(back.member_count() == g.member_count());
    CHECK(back.x_coords() == g.x_coords());
    CHECK(back.y_coords() == g.y_coords());
    CHECK(back.px() == g.px());
    CHECK(back.py() == g.py());
    CHECK(std::equal(back.fixed_nodes().begin(), back.fixed_nodes().end(),
                     g.fixed_nodes().begin(), g.fixed_nodes().end()));
    CHECK(problem_json(back) == problem_json(g));

    const auto text = R"({
        "nodes": [[0, 0], [1, 0], [0.5, 1], [0.5, 0.4]],
        "members": [[0, 3], [1, 3], [2, 3]],
        "supports": [{"node": 0}, {"node": 1, "fix_x": false}],
        "loads": [{"node": 2, "direction": "y", "magnitude": -1},
                  {"node": 2, "direction": "x", "magnitude": 0.5},
                  {"node": 2, "direction": "y", "magnitude": -1}],
        "fixed": [3]
    })";
    const auto p = parse_problem(text);
    CHECK(p.free_nodes().empty());
    REQUIRE(p.loads().size() == 1);
    CHECK(p.loads()[0].px == 0.5);
    CHECK(p.loads()[0].py == -2.0);
    CHECK_FALSE(p.supports()[1].fix_x);
    CHECK(p.supports()[1].fix_y);
    CHECK(parse_problem(problem_json(p)).fixed_nodes().size() == 4);
}

TEST_CASE("malformed problem files") {
    CHECK_THROWS_AS(parse_problem("{"), ParseError);
    CHECK_THROWS_AS(parse_problem("[]"), ParseError);
    CHECK_THROWS_AS(parse_problem(R"({"nodes": [], "members": [], "supports": []})"), ParseError);
    const std::string head = R"({"nodes": [[0,0],[1,0]], "members": [[0,1]], )";
    CHECK_THROWS_AS(parse_problem(head + R"("supports": [{"node": 5}], "loads": []})"),
                    ParseError);
    CHECK_THROWS_AS(parse_problem(head + R"("supports": [{"node": 0, "fix_x": 1}], "loads": []})"),
                    ParseError);
    CHECK_THROWS_AS(
        parse_problem(head + R"("supports": [{"node": 0}], "loads": [{"node": 1, "direction": "z", "magnitude": 1}]})"),
        ParseError);
    CHECK_THROWS_AS(parse_problem(R"({"nodes": [[0,0],["a",0]], "members": [], "supports": [], "loads": []})"),
                    ParseError);
    // Well-formed but structurally invalid.
    CHECK_THROWS_AS(parse_problem(head + R"("supports": [], "loads": []})"), ConfigError);
    CHECK_THROWS_AS(read_problem("/nonexistent/problem.json"), IoError);
}

TEST_CASE("front CSV") {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<ParetoPoint> pts;
    for (int i = 0; i < 40; ++i) {
        const double x = 1.0 + i + u(rng);
        pts.push_back(ParetoPoint{{x, 1.0 / x + 1e-17 * u(rng)}, {}, {}, {}, {}});
    }
    const auto est = estimate_ratios(pts);
    const auto text = front_csv(est.points);
    CHECK(text.rfind("index,Fx,Fy,beta,mu_ratio,r_est\n", 0) == 0);
    CHECK(count_lines(text) == est.points.size() + 1);

    const auto back = parse_front_csv(text);
    REQUIRE(back.size() == est.points.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].S == est.points[i].S);
        CHECK(back[i].beta == est.points[i].beta);
        CHECK(back[i].mu_ratio == est.points[i].mu_ratio);
        CHECK(back[i].r_est == est.points[i].r_est);
    }
    CHECK(front_csv(back) == text);

    const ParetoPoint lone{{1.0, 2.0}, {}, {}, {}, {}};
    CHECK(front_csv(std::span(&lone, 1)) == "index,Fx,Fy,beta,mu_ratio,r_est\n0,1,2,,,\n");
    CHECK_THROWS_AS(parse_front_csv("Fx,Fy\n1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_front_csv("index,Fx,Fy,beta,mu_ratio,r_est\n0,1,x,,,\n"), ParseError);
    CHECK_THROWS_AS(parse_front_csv("index,Fx,Fy,beta,mu_ratio,r_est\n0,1,2\n"), ParseError);
}

TEST_CASE("numeric and genome CSV") {
    ParetoPoint p;
    p.genome = Eigen::Vector3d(0.1, -2.0, 1e-300);
    const auto text = genome_csv(std::span(&p, 1));
    CHECK(text.rfind("index,q0,q1,q2\n", 0) == 0);
    const auto rows = parse_numeric_csv(text);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == std::vector<double>{0.0, 0.1, -2.0, 1e-300});
    CHECK(parse_numeric_csv("1,2\n3,4\n").size() == 2);
    CHECK_THROWS_AS(parse_numeric_csv("1,2\nx,4\n"), ParseError);
    CHECK(genome_csv({}).empty());
}

TEST_CASE("comparison CSV") {
    const std::vector<ComparisonRow> rows{{"scaling", 0.5, 1.25}, {"nsga3", 2.5, 100.0}};
    CHECK(comparison_csv(rows) == "method,r,compliance\nscaling,0.5,1.25\nnsga3,2.5,100\n");
}

TEST_CASE("files") {
    const auto dir = std::filesystem::temp_directory_path() / "fdtruss-io-test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "a" / "b.txt";
    write_text(path, "hello\n");
    CHECK(read_text(path) == "hello\n");
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(read_text(path), IoError);
}

TEST_CASE("truss drawing") {
    const auto g = oracle::vertical_bar(1.0, 1.0);
    const auto d = realize_design(g, Eigen::VectorXd::Constant(1, 1.0), 1.0, 1.0);
    const auto svg = truss_svg(g, d);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    // The thickest member is 2% of the 800 px drawing extent.
    CHECK(svg.find("stroke=\"#1f4e9c\" stroke-width=\"16\"") != std::string::npos);
    CHECK(truss_svg(g, d) == svg);

    const auto grid = generate_grid(3, 2, 3.0, 2.0);
    std::mt19937_64 rng(89);
    const auto q = oracle::random_feasible_q(grid, rng);
    const auto e = realize_design(grid, q, 1.0, 1.0);
    const auto picture = truss_svg(grid, e, Window{0, 3, 0, 2});
    std::size_t kept = 0;
    for (bool k : retained_members(e.q_tilde)) kept += k;
    CHECK(count_of(picture, "stroke=\"#1f4e9c\"") + count_of(picture, "stroke=\"#b22222\"") == kept);
}

TEST_CASE("front plot") {
    const std::vector<ParetoPoint> pts{{{1, 3}, {}, {}, {}, {}}, {{2, 1}, {}, {}, {}, {}}};
    const std::vector<Objectives> ref{{1.5, 2.0}};
    const auto svg = front_svg(pts, ref);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg == front_svg(pts, ref));
    CHECK(count_of(svg, "<circle") == 1);
}

TEST_CASE("run configuration") {
    RunConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    auto bad = [&](auto edit) {
        RunConfig c;
        edit(c);
        CHECK_THROWS_AS(validate(c), ConfigError);
    };
    bad([](RunConfig& c) { c.r_list.clear(); });
    bad([](RunConfig& c) { c.r_list = {1.0, -2.0}; });
    bad([](RunConfig& c) { c.V_target = 0.0; });
    bad([](RunConfig& c) { c.E = 0.0; });
    bad([](RunConfig& c) { c.repetitions = 0; });
    bad([](RunConfig& c) { c.nx = 0; });
    bad([](RunConfig& c) { c.seed_ratios = {0.0}; });

    const auto g = build_problem(cfg);
    CHECK(g.member_count() == 29);
    const auto manifest = manifest_json(cfg, "moo");
    CHECK(manifest.find("\"verb\": \"moo\"") != std::string::npos);
    CHECK(manifest.find(std::string(library_version())) != std::string::npos);
}

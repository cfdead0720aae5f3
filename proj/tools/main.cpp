#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fdtruss/errors.hpp"
#include "fdtruss/experiment.hpp"
#include "fdtruss/io.hpp"
#include "fdtruss/render.hpp"

namespace fs = std::filesystem;
using namespace fdtruss;

namespace {

struct Options {
    RunConfig run;
    std::string problem;
    bool single_thread = false;
    std::string log;
    std::string genome;
    std::size_t index = 0;
    std::string front;
    std::string reference;
};

void add_common(CLI::App& app, Options& o) {
    app.add_option("--nx", o.run.nx, "Grid cells in x")->capture_default_str();
    app.add_option("--ny", o.run.ny, "Grid cells in y")->capture_default_str();
    app.add_option("--width", o.run.width, "Grid width")->capture_default_str();
    app.add_option("--height", o.run.height, "Grid height")->capture_default_str();
    app.add_option("--problem", o.problem, "Problem file (JSON); overrides the grid");
    app.add_option("--r", o.run.r_list, "Aspect ratios")->delimiter(',')->capture_default_str();
    app.add_option("--volume", o.run.V_target, "Target structural volume")->capture_default_str();
    app.add_option("--pop", o.run.ga.population_size, "GA population")->capture_default_str();
    app.add_option("--gens", o.run.ga.generations, "GA generations")->capture_default_str();
    app.add_option("--pcx", o.run.ga.p_crossover, "Crossover probability")->capture_default_str();
    app.add_option("--pmut", o.run.ga.p_mutation, "Per-gene mutation probability (0: 1/m)")
        ->capture_default_str();
    app.add_option("--seed", o.run.rng_seed, "Random seed")->capture_default_str();
    app.add_option("--reps", o.run.repetitions, "GA repetitions")->capture_default_str();
    app.add_option("--out", o.run.output_dir, "Output directory")->capture_default_str();
    app.add_flag("--single-thread", o.single_thread, "Evaluate candidates on one thread");
}

std::string tag(double r) { return fmt::format("r{:g}", r); }

void write_design(const fs::path& dir, const std::string& stem, const GroundStructure& g,
                  double r, const RealizedPoint& p) {
    const auto scaled = scale_structure(g, r, 1.0);
    write_text(dir / (stem + ".svg"), truss_svg(scaled, p.design));
}

int do_moo(const Options& o, const GroundStructure& g) {
    const auto& cfg = o.run;
    const auto& dir = cfg.output_dir;
    write_text(dir / "manifest.json", manifest_json(cfg, "moo"));

    std::ofstream log_file;
    GenerationLog log;
    if (!o.log.empty()) {
        log_file.open(dir / o.log);
        if (!log_file) throw IoError("cannot write generation log");
        log = [&log_file](int rep, int gen, std::span<const Individual> pop) {
            nlohmann::json front = nlohmann::json::array();
            for (const auto& ind : pop) {
                if (ind.rank == 0 && ind.objectives) {
                    front.push_back({(*ind.objectives)[0], (*ind.objectives)[1]});
                }
            }
            log_file << nlohmann::json{{"repetition", rep}, {"generation", gen}, {"front", front}}
                            .dump()
                     << '\n';
        };
    }

    const auto moo = run_moo(g, cfg, log);
    std::string hv = "repetition,seed,points,hypervolume\n";
    for (std::size_t k = 0; k < moo.runs.size(); ++k) {
        const auto rep_dir = dir / fmt::format("rep-{:02d}", k);
        const auto cleaned = clean_front(moo.runs[k].points);
        write_text(rep_dir / "front.csv", front_csv(cleaned));
        write_text(rep_dir / "genomes.csv", genome_csv(cleaned));
        hv += fmt::format("{},{},{},{}\n", k, cfg.rng_seed + k, cleaned.size(),
                          format_double(moo.hypervolumes[k]));
    }
    write_text(dir / "hypervolume.csv", hv);

    const auto& pts = moo.ratios.points;
    write_text(dir / "front.csv", front_csv(pts));
    write_text(dir / "genomes.csv", genome_csv(pts));
    std::vector<Objectives> seeds;
    for (const auto& s : moo.seeds) {
        if (const auto o2 = evaluate(s, g, cfg.sigma_bar, cfg.E)) seeds.push_back(*o2);
    }
    write_text(dir / "front.svg", front_svg(pts, seeds));

    std::cout << fmt::format("best repetition {} of {}, {} front points{}\n", moo.best,
                             moo.runs.size(), pts.size(),
                             moo.ratios.nonconvex ? " (slopes not monotone)" : "");
    for (double r : cfg.r_list) {
        const auto& p = solution_for_ratio(pts, r);
        const auto real = realize_at_ratio(g, p.genome, r, cfg.V_target, cfg.sigma_bar, cfg.E);
        write_design(dir, "nsga3-" + tag(r), g, r, real);
        std::cout << fmt::format("r={:g}  r_est={:.4g}  compliance={:.6g}\n", r, *p.r_est,
                                 real.compliance);
    }
    return 0;
}

int do_single(const Options& o, const GroundStructure& g, bool scaling) {
    const auto& cfg = o.run;
    const auto& dir = cfg.output_dir;
    const char* name = scaling ? "scaling" : "weighted-sum";
    const std::string stem = scaling ? "scaling" : "wsum";
    write_text(dir / "manifest.json", manifest_json(cfg, stem));
    std::vector<ComparisonRow> rows;
    for (double r : cfg.r_list) {
        const auto res = scaling ? scaling_method(g, r, cfg.V_target, cfg.sigma_bar, cfg.E, cfg.ws)
                                 : weighted_method(g, r, cfg.V_target, cfg.sigma_bar, cfg.E,
                                                   cfg.ws);
        rows.push_back({name, r, res.compliance});
        ParetoPoint p;
        p.genome = res.optimum.q;
        write_text(dir / (stem + "-" + tag(r) + "-q.csv"), genome_csv(std::span(&p, 1)));
        write_text(dir / (stem + "-" + tag(r) + ".svg"),
                   truss_svg(scale_structure(g, r, 1.0), res.design));
        std::cout << fmt::format("r={:g}  F*={:.6g}  compliance={:.6g}\n", r, res.optimum.F_star,
                                 res.compliance);
    }
    write_text(dir / (stem + ".csv"), comparison_csv(rows));
    return 0;
}

int do_compare(const Options& o, const GroundStructure& g) {
    const auto& cfg = o.run;
    write_text(cfg.output_dir / "manifest.json", manifest_json(cfg, "compare"));
    const auto res = run_compare(g, cfg);
    write_text(cfg.output_dir / "comparison.csv", comparison_csv(res.rows));
    write_text(cfg.output_dir / "front.csv", front_csv(res.moo.ratios.points));
    for (const auto& row : res.rows) {
        std::cout << fmt::format("{:<13} r={:<5g} {:.6g}\n", row.method, row.r, row.compliance);
    }
    for (double r : res.flagged) {
        std::cerr << fmt::format("flag: scaling and weighted-sum differ by more than 10% at r={:g}\n",
                                 r);
    }
    return 0;
}

int do_render(const Options& o, const GroundStructure& g) {
    const auto& cfg = o.run;
    if (o.genome.empty()) throw ConfigError("render needs --genome");
    const auto rows = parse_numeric_csv(read_text(o.genome));
    if (o.index >= rows.size()) throw ConfigError("genome index out of range");
    const auto& row = rows[o.index];
    const auto m = g.member_count();
    // Rows written by the tool lead with their index.
    const std::size_t offset = row.size() == m + 1 ? 1 : 0;
    if (row.size() != m + offset) throw ConfigError("genome length does not match the problem");
    Eigen::VectorXd q(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) q[static_cast<Eigen::Index>(i)] = row[i + offset];
    for (double r : cfg.r_list) {
        const auto real = realize_at_ratio(g, q, r, cfg.V_target, cfg.sigma_bar, cfg.E);
        write_design(cfg.output_dir, "truss-" + tag(r), g, r, real);
        std::cout << fmt::format("r={:g}  compliance={:.6g}\n", r, real.compliance);
    }
    return 0;
}

int do_front(const Options& o) {
    if (o.front.empty()) throw ConfigError("front needs --front");
    const auto pts = parse_front_csv(read_text(o.front));
    std::vector<Objectives> ref;
    if (!o.reference.empty()) {
        for (const auto& row : parse_numeric_csv(read_text(o.reference))) {
            if (row.size() < 2) throw ParseError("reference rows need Fx,Fy");
            ref.push_back({row[row.size() - 2], row[row.size() - 1]});
        }
    }
    write_text(o.run.output_dir / "front.svg", front_svg(pts, ref));
    std::cout << fmt::format("{} points\n", pts.size());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truss layout optimization by force densities"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(library_version()));

    Options o;
    auto* moo = app.add_subcommand("moo", "Multiobjective GA run with slope-based ratio estimates");
    auto* wsum = app.add_subcommand("wsum", "Weighted-sum optimization on the unscaled structure");
    auto* scaling = app.add_subcommand("scaling", "Unit-weight optimization of scaled structures");
    auto* compare = app.add_subcommand("compare", "Compliance table of all three methods");
    auto* render = app.add_subcommand("render", "Draw a design from a genome file");
    auto* front = app.add_subcommand("front", "Plot a front CSV");
    for (auto* sub : {moo, wsum, scaling, compare, render, front}) add_common(*sub, o);
    moo->add_option("--log", o.log, "Per-generation JSON lines log inside --out");
    render->add_option("--genome", o.genome, "Genome CSV")->required();
    render->add_option("--index", o.index, "Row of the genome CSV")->capture_default_str();
    front->add_option("--front", o.front, "Front CSV")->required();
    front->add_option("--reference", o.reference, "CSV of reference Fx,Fy pairs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!o.problem.empty()) o.run.problem = o.problem;
        o.run.ga.single_thread = o.single_thread;
        validate(o.run);
        if (front->parsed()) return do_front(o);
        const auto g = build_problem(o.run);
        if (moo->parsed()) return do_moo(o, g);
        if (wsum->parsed()) return do_single(o, g, false);
        if (scaling->parsed()) return do_single(o, g, true);
        if (compare->parsed()) return do_compare(o, g);
        if (render->parsed()) return do_render(o, g);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

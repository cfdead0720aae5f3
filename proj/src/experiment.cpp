#include "fdtruss/experiment.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fdtruss/errors.hpp"

#ifndef FDTRUSS_VERSION
#define FDTRUSS_VERSION "unknown"
#endif

namespace fdtruss {

namespace {

constexpr double kMethodGap = 0.10;

template <class F>
auto cell(const char* method, double r, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(fmt::format("{} at r={}: {}", method, format_double(r), e.what()));
    }
}

} // namespace

void validate(const RunConfig& cfg) {
    if (cfg.r_list.empty()) throw ConfigError("r list is empty");
    for (double r : cfg.r_list) {
        if (!(r > 0.0)) throw ConfigError("aspect ratios must be positive");
    }
    if (!(cfg.V_target > 0.0)) throw ConfigError("volume must be positive");
    if (!(cfg.E > 0.0) || !(cfg.sigma_bar > 0.0)) {
        throw ConfigError("material constants must be positive");
    }
    if (cfg.repetitions < 1) throw ConfigError("at least one repetition is required");
    if (!cfg.problem && (cfg.nx < 1 || cfg.ny < 1 || !(cfg.width > 0.0) || !(cfg.height > 0.0))) {
        throw ConfigError("grid needs nx, ny >= 1 and positive size");
    }
    for (double r : cfg.seed_ratios) {
        if (!(r > 0.0)) throw ConfigError("seed ratios must be positive");
    }
}

GroundStructure build_problem(const RunConfig& cfg) {
    if (cfg.problem) return read_problem(*cfg.problem);
    return generate_grid(cfg.nx, cfg.ny, cfg.width, cfg.height);
}

MooOutcome run_moo(const GroundStructure& g, const RunConfig& cfg, const GenerationLog& log) {
    validate(cfg);
    MooOutcome out;
    out.seeds = weighted_sum_seeds(g, cfg.seed_ratios, cfg.sigma_bar, cfg.E, cfg.ws);

    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        GAConfig ga = cfg.ga;
        ga.seed_individuals = out.seeds;
        ga.rng_seed = cfg.rng_seed + static_cast<std::uint64_t>(rep);
        if (log) {
            ga.on_generation = [&log, rep](int gen, std::span<const Individual> pop) {
                log(rep, gen, pop);
            };
        }
        out.runs.push_back(run(g, ga, cfg.sigma_bar, cfg.E));
    }

    Objectives worst{0.0, 0.0};
    for (const auto& r : out.runs) {
        for (const auto& p : r.points) {
            worst[0] = std::max(worst[0], p.S[0]);
            worst[1] = std::max(worst[1], p.S[1]);
        }
    }
    out.hv_reference = {1.1 * worst[0], 1.1 * worst[1]};
    for (std::size_t k = 0; k < out.runs.size(); ++k) {
        std::vector<Objectives> s;
        for (const auto& p : out.runs[k].points) s.push_back(p.S);
        out.hypervolumes.push_back(hypervolume(s, out.hv_reference));
        if (out.hypervolumes[k] > out.hypervolumes[out.best]) out.best = k;
    }
    out.ratios = estimate_ratios(out.runs[out.best].points);
    return out;
}

CompareResult run_compare(const GroundStructure& g, const RunConfig& cfg,
                          const GenerationLog& log) {
    validate(cfg);
    CompareResult res;
    res.moo = run_moo(g, cfg, log);
    for (double r : cfg.r_list) {
        const double cs = cell("scaling", r, [&] {
            return scaling_method(g, r, cfg.V_target, cfg.sigma_bar, cfg.E, cfg.ws).compliance;
        });
        const double cw = cell("weighted-sum", r, [&] {
            return weighted_method(g, r, cfg.V_target, cfg.sigma_bar, cfg.E, cfg.ws).compliance;
        });
        const double cg = cell("nsga3", r, [&] {
            const auto& p = solution_for_ratio(res.moo.ratios.points, r);
            return realize_at_ratio(g, p.genome, r, cfg.V_target, cfg.sigma_bar, cfg.E)
                .compliance;
        });
        res.rows.push_back({"scaling", r, cs});
        res.rows.push_back({"weighted-sum", r, cw});
        res.rows.push_back({"nsga3", r, cg});
        if (std::abs(cw - cs) > kMethodGap * cs) res.flagged.push_back(r);
    }
    return res;
}

std::string manifest_json(const RunConfig& cfg, std::string_view verb) {
    nlohmann::json j;
    j["version"] = std::string(library_version());
    j["verb"] = std::string(verb);
    if (cfg.problem) {
        j["problem"] = cfg.problem->string();
    } else {
        j["grid"] = {{"nx", cfg.nx}, {"ny", cfg.ny}, {"width", cfg.width}, {"height", cfg.height}};
    }
    j["r"] = cfg.r_list;
    j["volume"] = cfg.V_target;
    j["E"] = cfg.E;
    j["sigma_bar"] = cfg.sigma_bar;
    j["rng_seed"] = cfg.rng_seed;
    j["repetitions"] = cfg.repetitions;
    j["seed_ratios"] = cfg.seed_ratios;
    const auto& ga = cfg.ga;
    j["ga"] = {{"population", ga.population_size},
               {"generations", ga.generations},
               {"p_crossover", ga.p_crossover},
               {"p_mutation", ga.p_mutation},
               {"q_lower", ga.q_lower},
               {"q_upper", ga.q_upper},
               {"init_halfwidth", ga.init_halfwidth},
               {"eta_crossover", ga.eta_crossover},
               {"eta_mutation", ga.eta_mutation},
               {"niche_space", ga.niche_space == NicheSpace::log ? "log" : "linear"},
               {"single_thread", ga.single_thread}};
    const auto& ws = cfg.ws;
    j["ws"] = {{"c", ws.c},
               {"tol_rel", ws.tol_rel},
               {"tol_grad", ws.tol_grad},
               {"max_iters", ws.max_iters},
               {"fd_step", ws.fd_step},
               {"q_lower", ws.q_lower},
               {"q_upper", ws.q_upper},
               {"starts", ws.starts},
               {"start_halfwidth", ws.start_halfwidth},
               {"rng_seed", ws.rng_seed},
               {"resize", ws.resize},
               {"max_rounds", ws.max_rounds},
               {"smoothing", ws.smoothing == SmoothingTarget::raw ? "raw" : "recomputed"}};
    return j.dump(2) + "\n";
}

std::string_view library_version() { return FDTRUSS_VERSION; }

} // namespace fdtruss

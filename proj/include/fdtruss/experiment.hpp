#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fdtruss/ground.hpp"
#include "fdtruss/io.hpp"
#include "fdtruss/moga.hpp"
#include "fdtruss/pareto.hpp"
#include "fdtruss/wsopt.hpp"

namespace fdtruss {

struct RunConfig {
    /// Problem file; when empty the cantilever grid below is generated.
    std::optional<std::filesystem::path> problem;
    std::size_t nx = 3;
    std::size_t ny = 2;
    double width = 3.0;
    double height = 2.0;

    std::vector<double> r_list{0.5, 1.5, 2.5};
    double V_target = 100.0;
    double E = 1.0;
    double sigma_bar = 1.0;

    GAConfig ga;
    WSConfig ws;
    int repetitions = 10;
    /// Aspect ratios whose weighted-sum optima seed every GA repetition.
    std::vector<double> seed_ratios{1.0, 2.0, 3.0};
    /// Repetition k uses rng_seed + k.
    std::uint64_t rng_seed = 1;
    std::filesystem::path output_dir = "out";
};

/// Throws ConfigError for invalid values.
void validate(const RunConfig& cfg);

GroundStructure build_problem(const RunConfig& cfg);

struct MooOutcome {
    std::vector<FrontArchive> runs;
    std::vector<double> hypervolumes;
    /// 1.1x the worst objectives over every run's front.
    Objectives hv_reference{};
    std::size_t best = 0;
    /// Slope estimates on the best run's front.
    RatioEstimate ratios;
    std::vector<Eigen::VectorXd> seeds;
};

using GenerationLog = std::function<void(int repetition, int generation,
                                         std::span<const Individual> population)>;

/// Weighted-sum seeds, then cfg.repetitions GA runs. The best run has the
/// largest hypervolume; ties go to the earlier run.
MooOutcome run_moo(const GroundStructure& g, const RunConfig& cfg, const GenerationLog& log = {});

struct CompareResult {
    /// Scaling, weighted sum and GA rows for every r.
    std::vector<ComparisonRow> rows;
    /// Ratios where scaling and weighted sum differ by more than 10%.
    std::vector<double> flagged;
    MooOutcome moo;
};

/// Compliance table over cfg.r_list. A failing cell aborts with an Error whose
/// message names the method and r.
CompareResult run_compare(const GroundStructure& g, const RunConfig& cfg,
                          const GenerationLog& log = {});

/// Resolved configuration, seed and version as JSON.
std::string manifest_json(const RunConfig& cfg, std::string_view verb);

/// Version string compiled into the library.
std::string_view library_version();

} // namespace fdtruss

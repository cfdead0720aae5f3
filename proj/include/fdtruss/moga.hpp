#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fdtruss/ground.hpp"
#include "fdtruss/pareto.hpp"

namespace fdtruss {

struct Individual {
    Eigen::VectorXd genome;
    /// Empty for infeasible candidates, which every feasible one dominates.
    std::optional<Objectives> objectives;
    int rank = 0;
    int niche = -1;
};

/// Coordinates in which objectives are normalized for reference-point niching.
/// Dominance is unaffected. `log` spreads the population evenly over fronts
/// whose objectives span many decades.
enum class NicheSpace { linear, log };

struct GAConfig {
    int population_size = 40;
    int generations = 500;
    double p_crossover = 0.9;
    /// Per gene. Zero selects 1/m.
    double p_mutation = 0.0;
    double q_lower = -1000.0;
    double q_upper = 1000.0;
    /// Center of the initial sampling box; defaults to initial_force_densities(g).
    std::optional<Eigen::VectorXd> init_center;
    double init_halfwidth = 10.0;
    std::vector<Eigen::VectorXd> seed_individuals;
    std::uint64_t rng_seed = 1;
    double eta_crossover = 30.0;
    double eta_mutation = 20.0;
    bool single_thread = true;
    NicheSpace niche_space = NicheSpace::log;
    /// Called after the initial evaluation (generation 0) and every generation.
    std::function<void(int, std::span<const Individual>)> on_generation;
};

struct FrontArchive {
    /// First nondominated rank of the final population.
    std::vector<ParetoPoint> points;
    std::vector<Individual> population;
};

/// Force densities N_i / L_i of the ground structure at its initial layout
/// with every area equal to one. Throws SingularStiffness when the ground
/// structure itself is unstable.
Eigen::VectorXd initial_force_densities(const GroundStructure& g, double E = 1.0);

/// (F~x, F~y) through realize_design and split_objectives on q~; empty when
/// the candidate is infeasible.
std::optional<Objectives> evaluate(const Eigen::VectorXd& genome, const GroundStructure& g,
                                   double sigma_bar, double E);

/// Nondomination ranks (0 = not dominated). Infeasible entries rank after all
/// feasible ones.
std::vector<int> nondominated_sort(std::span<const std::optional<Objectives>> points);

/// Uniformly spaced reference points on the two-objective simplex.
std::vector<Objectives> reference_points(int divisions);

/// Simulated binary crossover on bounded variables, in place.
void sbx_crossover(Eigen::VectorXd& a, Eigen::VectorXd& b, double eta, double lower,
                   double upper, std::mt19937_64& rng);

/// Polynomial mutation on bounded variables, each gene with probability p.
void polynomial_mutation(Eigen::VectorXd& x, double eta, double p, double lower, double upper,
                         std::mt19937_64& rng);

/// Reference-point environmental selection of `count` survivors.
std::vector<Individual> select_survivors(std::vector<Individual> pool, std::size_t count,
                                         std::span<const Objectives> refs, std::mt19937_64& rng,
                                         NicheSpace space = NicheSpace::log);

/// Runs the evolutionary loop. Throws ConfigError for invalid parameters.
FrontArchive run(const GroundStructure& g, const GAConfig& config, double sigma_bar, double E);

} // namespace fdtruss

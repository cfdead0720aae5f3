#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fdtruss/energy.hpp"
#include "fdtruss/ground.hpp"

namespace fdtruss {

struct WSConfig {
    double mu_x = 1.0;
    double mu_y = 1.0;
    double c = 1e-10;
    double tol_rel = 1e-8;
    /// Projected-gradient infinity norm, relative to max(1, |F*|).
    double tol_grad = 1e-10;
    int max_iters = 500;
    /// Central-difference step is fd_step * max(1, |q_i|).
    double fd_step = 1e-6;
    double q_lower = -1000.0;
    double q_upper = 1000.0;
    /// Defaults to the uniform-section force densities of the ground structure.
    std::optional<Eigen::VectorXd> start;
    /// Number of starts: the start point, then start +- uniform perturbations.
    int starts = 5;
    double start_halfwidth = 10.0;
    std::uint64_t rng_seed = 12345;
    /// Alternate quasi-Newton convergence with fully-stressed resizing q <- q~.
    bool resize = true;
    int max_rounds = 20;
    SmoothingTarget smoothing = SmoothingTarget::recomputed;
};

enum class WSStatus {
    converged,
    no_progress,
    iteration_limit,
};

struct WSResult {
    Eigen::VectorXd q;
    double F_star = 0.0;
    ObjectiveValues objectives;
    WSStatus status = WSStatus::converged;
    int iterations = 0;
    int evaluations = 0;
    /// Accepted objective values, in order.
    std::vector<double> history;
};

/// Smoothed weighted sum F*(q) through the full q -> q~ pipeline. Returns
/// +infinity for infeasible q.
double weighted_objective(const GroundStructure& g, const Eigen::VectorXd& q,
                          const WSConfig& cfg, double sigma_bar, double E);

/// Central-difference gradient of weighted_objective, one-sided at bounds or
/// where a perturbed point is infeasible.
Eigen::VectorXd weighted_gradient(const GroundStructure& g, const Eigen::VectorXd& q,
                                  const WSConfig& cfg, double sigma_bar, double E,
                                  int* evaluations = nullptr);

/// Bound-constrained minimization of F* with a projected BFGS method and an
/// Armijo line search on the projection arc. With cfg.resize, each converged
/// point is followed by stress-ratio resizing steps q <- q~ on the structure
/// stretched by (sqrt(mu_x), sqrt(mu_y)); they are kept while the
/// volume-normalized compliance there decreases, and the quasi-Newton phase
/// then restarts from the resized point. The best point seen by that measure
/// is returned.
///
/// Multi-start from the start point and antithetic perturbations of it; the
/// lowest F* wins. Throws StartInfeasible if no start can be evaluated.
WSResult minimize(const GroundStructure& g, const WSConfig& cfg, double sigma_bar, double E);

/// Single start of the local method, no multi-start.
WSResult minimize_from(const GroundStructure& g, const Eigen::VectorXd& start,
                       const WSConfig& cfg, double sigma_bar, double E);

struct MethodResult {
    double compliance = 0.0;
    TrussDesign design;
    WSResult optimum;
};

/// Optimizes the (r, 1)-scaled structure with unit weights and reports the
/// volume-normalized compliance of the result.
MethodResult scaling_method(const GroundStructure& g, double r, double V_target,
                            double sigma_bar, double E, WSConfig cfg = {});

/// Optimizes the unscaled structure with weights (r^2, 1), then realizes the
/// optimum on the (r, 1)-scaled structure.
MethodResult weighted_method(const GroundStructure& g, double r, double V_target,
                             double sigma_bar, double E, WSConfig cfg = {});

/// Weighted-sum optima at the given aspect ratios, used as GA seed genomes.
std::vector<Eigen::VectorXd> weighted_sum_seeds(const GroundStructure& g,
                                                const std::vector<double>& ratios,
                                                double sigma_bar, double E, WSConfig cfg = {});

} // namespace fdtruss

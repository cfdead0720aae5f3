#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fdtruss/fdm.hpp"
#include "fdtruss/fea.hpp"
#include "fdtruss/ground.hpp"

namespace fdtruss {

/// Relative cutoff below which a member counts as removed when reading out
/// the topology: |q~_i| < kTopologyThreshold * max_j |q~_j|.
inline constexpr double kTopologyThreshold = 1e-6;

struct ObjectiveValues {
    double Fx = 0.0;
    double Fy = 0.0;
    double F = 0.0;
    double mu_x = 1.0;
    double mu_y = 1.0;
    double F_star = 0.0;
    double c = 0.0;
};

struct VolumeNormalization {
    double V_target = 0.0;
    double sigma_bar_adjusted = 0.0;
    double scale = 1.0;
};

/// Which force densities enter the smoothed term sqrt(q^2 + c) of the
/// weighted sum.
enum class SmoothingTarget {
    recomputed,  // q~(q), the equilibrium-consistent densities
    raw,         // the design variables q themselves
};

/// Fx = sum (sigma/E) dx_i^2 |q_i|, Fy likewise with dy, F = Fx + Fy.
ObjectiveValues split_objectives(const GroundStructure& g, const EquilibriumGeometry& geom,
                                 const Eigen::VectorXd& q_eval, double sigma_bar, double E);

/// sum (sigma/E) [mu_x dx_i^2 + mu_y dy_i^2] sqrt(q_i^2 + c).
double weighted_sum(const GroundStructure& g, const EquilibriumGeometry& geom,
                    const Eigen::VectorXd& q_eval, double mu_x, double mu_y, double sigma_bar,
                    double E, double c);

/// Objective split of a realized design, evaluated on q~.
ObjectiveValues design_objectives(const GroundStructure& g, const TrussDesign& d);

/// Uniformly scales the areas to the target volume and re-analyzes. The
/// stress level becomes sigma / s for area multiplier s.
std::pair<TrussDesign, VolumeNormalization> normalize_volume(const GroundStructure& g,
                                                             const TrussDesign& d,
                                                             double V_target);

/// Members surviving the topology readout threshold.
std::vector<bool> retained_members(const Eigen::VectorXd& q_tilde);

} // namespace fdtruss

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fdtruss/energy.hpp"
#include "fdtruss/fea.hpp"
#include "fdtruss/ground.hpp"

namespace fdtruss {

using Objectives = std::array<double, 2>;

struct ParetoPoint {
    Objectives S{};  // (Fx, Fy)
    Eigen::VectorXd genome;
    /// Slope to the previous point of the cleaned front; empty for the first.
    std::optional<double> beta;
    std::optional<double> mu_ratio;
    std::optional<double> r_est;
};

struct RatioEstimate {
    std::vector<ParetoPoint> points;
    /// |beta| failed to be non-increasing somewhere along the front.
    bool nonconvex = false;
};

/// Sorts by increasing Fx and drops duplicates (both objectives within 1e-12)
/// and dominated points, leaving Fy strictly decreasing.
std::vector<ParetoPoint> clean_front(std::vector<ParetoPoint> points);

/// Slopes between consecutive points, beta_i = (Fy_i - Fy_{i-1}) / (Fx_i - Fx_{i-1}),
/// and per-point weight ratios mu_x/mu_y. Interior points take the geometric
/// mean of the two adjacent |beta|; endpoints take their single neighbor's.
/// r_est = sqrt(mu_x/mu_y). Throws TooFewPoints with fewer than three points
/// after cleaning.
RatioEstimate estimate_ratios(std::vector<ParetoPoint> points);

/// Point whose r_est is nearest to r; ties go to the smaller Fx.
const ParetoPoint& solution_for_ratio(std::span<const ParetoPoint> points, double r);

struct RealizedPoint {
    TrussDesign design;
    VolumeNormalization normalization;
    double compliance = 0.0;
};

/// Realizes the genome on the (r, 1)-scaled structure and normalizes the
/// volume to V_target; compliance is from the normalized design.
RealizedPoint realize_at_ratio(const GroundStructure& g, const Eigen::VectorXd& genome, double r,
                               double V_target, double sigma_bar, double E);

/// Area dominated by the points and bounded by the reference point (both
/// objectives minimized). Points not strictly better than ref contribute 0.
double hypervolume(std::span<const Objectives> points, const Objectives& ref);

} // namespace fdtruss

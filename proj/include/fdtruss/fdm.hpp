#pragma once

#include <Eigen/Dense>

#include "fdtruss/ground.hpp"

namespace fdtruss {

/// Force densities (member force divided by member length), one per member,
/// with box bounds. Values are clamped into the bounds on construction.
class ForceDensityVector {
public:
    ForceDensityVector(Eigen::VectorXd q, Eigen::VectorXd lower, Eigen::VectorXd upper);
    /// Uniform bounds [lower, upper] on every member.
    ForceDensityVector(Eigen::VectorXd q, double lower, double upper);
    /// Unbounded.
    explicit ForceDensityVector(Eigen::VectorXd q);

    const Eigen::VectorXd& values() const { return q_; }
    const Eigen::VectorXd& lower() const { return lower_; }
    const Eigen::VectorXd& upper() const { return upper_; }
    Eigen::Index size() const { return q_.size(); }
    double operator[](Eigen::Index i) const { return q_[i]; }

private:
    Eigen::VectorXd q_;
    Eigen::VectorXd lower_;
    Eigen::VectorXd upper_;
};

/// Q = C^T diag(q) C together with its free/fixed partition blocks.
struct ForceDensityMatrix {
    Eigen::MatrixXd full;
    Eigen::MatrixXd free;  // |free| x |free|
    Eigen::MatrixXd link;  // |free| x |fixed|
    Eigen::MatrixXd fix;   // |fixed| x |fixed|
};

struct EquilibriumGeometry {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd lengths;
    /// Nodal forces at fixed nodes (applied loads plus support reactions),
    /// ordered as GroundStructure::fixed_nodes().
    Eigen::VectorXd reactions_x;
    Eigen::VectorXd reactions_y;
};

/// Condition-number ceiling shared by the equilibrium and stiffness solves.
inline constexpr double kMaxCondition = 1e12;

ForceDensityMatrix assemble(const GroundStructure& g, const Eigen::VectorXd& q);

/// Solves Q_free x_free = -Q_link x_fix (and the y analog); the free nodes
/// carry no load. Throws SingularEquilibrium when Q_free is singular or its
/// reciprocal condition estimate drops below 1/kMaxCondition.
EquilibriumGeometry solve_free_coordinates(const GroundStructure& g, const Eigen::VectorXd& q);
EquilibriumGeometry solve_free_coordinates(const GroundStructure& g, const ForceDensityVector& q);

/// Member lengths from full coordinate vectors.
Eigen::VectorXd member_lengths(const GroundStructure& g, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y);

struct AffineReport {
    /// max |alpha x_free(g) - x_free(scale(g, alpha, 1))| relative to max |alpha x_free(g)|
    double x_discrepancy = 0.0;
    /// same for the y direction with scale(g, 1, alpha)
    double y_discrepancy = 0.0;
};

AffineReport check_affine_scaling(const GroundStructure& g, const Eigen::VectorXd& q,
                                  double alpha);

} // namespace fdtruss

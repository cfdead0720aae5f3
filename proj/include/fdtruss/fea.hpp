#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fdtruss/fdm.hpp"
#include "fdtruss/ground.hpp"

namespace fdtruss {

/// Members with area below this fraction of the largest area are left out of
/// the stiffness matrix; their axial force and recomputed force density are 0.
inline constexpr double kAreaFloor = 1e-12;

/// Reduced linear-elastic system over the unconstrained displacement
/// components of the nodes that carry at least one analyzed member.
struct StiffnessSystem {
    Eigen::MatrixXd K;
    Eigen::VectorXd f;
    Eigen::VectorXd u;
    /// Global dof index (2*node + component) of each reduced row.
    std::vector<Eigen::Index> dofs;
};

/// A fully realized structure: geometry from the equilibrium solve, areas from
/// the force densities, and the member forces of a linear analysis under the
/// applied loads.
struct TrussDesign {
    EquilibriumGeometry geometry;
    /// Generating force densities (the auxiliary design variables).
    Eigen::VectorXd q;
    Eigen::VectorXd areas;
    double sigma_bar = 1.0;
    double E = 1.0;
    /// Equilibrium-consistent force densities N~_i / L_i.
    Eigen::VectorXd q_tilde;
    Eigen::VectorXd N_tilde;
    /// Full nodal displacement vector, interleaved (ux0, uy0, ux1, ...).
    Eigen::VectorXd displacements;
    std::vector<bool> analyzed;

    /// Axial stress N~_i / A_i, zero for members below the area floor.
    Eigen::VectorXd stresses() const;
    double volume() const;
};

/// Assembles and solves the stiffness system for given geometry and areas.
/// Supports constrain their flagged components; loaded nodes move freely.
/// Throws SingularStiffness if the reduced matrix is not positive definite or
/// its condition estimate exceeds kMaxCondition.
StiffnessSystem solve_stiffness(const GroundStructure& g, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y, const Eigen::VectorXd& areas,
                                double E, std::vector<bool>& analyzed);

/// Analysis of a structure whose geometry and areas are already known.
TrussDesign analyze(const GroundStructure& g, EquilibriumGeometry geometry, Eigen::VectorXd q,
                    Eigen::VectorXd areas, double sigma_bar, double E);

/// Geometry from q, areas A_i = L_i |q_i| / sigma_bar, then a stiffness solve
/// giving N~ and q~ = N~ / L.
TrussDesign realize_design(const GroundStructure& g, const Eigen::VectorXd& q, double sigma_bar,
                           double E);

/// Stress-ratio resizing A_i <- |N~_i| / sigma_bar at fixed geometry, repeated
/// until the relative area change of every non-vanishing member is below tol.
/// Vanishing members keep a tiny area so the layout stays stable. The returned
/// design carries q_i = sign(N~_i) sigma_bar A_i / L_i.
TrussDesign fully_stressed_sizing(const GroundStructure& g, TrussDesign d, int max_iters = 5000,
                                  double tol = 1e-7);

/// External work f^T u of the applied loads.
double compliance(const TrussDesign& d, const GroundStructure& g);

/// sum N~_i^2 L_i / (E A_i) over analyzed members; equals compliance().
double member_energy_compliance(const TrussDesign& d);

} // namespace fdtruss

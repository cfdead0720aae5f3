#include "fdtruss/fea.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdtruss/errors.hpp"

namespace fdtruss {

Eigen::VectorXd TrussDesign::stresses() const {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(areas.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (analyzed[static_cast<std::size_t>(i)]) {
            s[i] = N_tilde[i] / areas[i];
        }
    }
    return s;
}

double TrussDesign::volume() const { return areas.dot(geometry.lengths); }

StiffnessSystem solve_stiffness(const GroundStructure& g, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y, const Eigen::VectorXd& areas,
                                double E, std::vector<bool>& analyzed) {
    const auto members = g.members();
    const std::size_t n = g.node_count();
    const double amax = areas.size() > 0 ? areas.cwiseAbs().maxCoeff() : 0.0;

    analyzed.assign(members.size(), false);
    std::vector<bool> touched(n, false);
    for (std::size_t k = 0; k < members.size(); ++k) {
        const double a = areas[static_cast<Eigen::Index>(k)];
        if (amax > 0.0 && a >= kAreaFloor * amax && a > 0.0) {
            analyzed[k] = true;
            touched[members[k].end_a.value] = true;
            touched[members[k].end_b.value] = true;
        }
    }

    std::vector<bool> constrained(2 * n, false);
    for (const auto& s : g.supports()) {
        constrained[2 * s.node.value] = s.fix_x;
        constrained[2 * s.node.value + 1] = s.fix_y;
    }
    const auto px = g.px();
    const auto py = g.py();

    StiffnessSystem sys;
    std::vector<Eigen::Index> row_of(2 * n, -1);
    for (std::size_t node = 0; node < n; ++node) {
        for (std::size_t c = 0; c < 2; ++c) {
            const std::size_t dof = 2 * node + c;
            if (constrained[dof]) {
                continue;
            }
            const double load = c == 0 ? px[node] : py[node];
            if (!touched[node]) {
                if (load != 0.0) {
                    throw SingularStiffness("loaded node " + std::to_string(node) +
                                            " has no analyzed member");
                }
                continue;
            }
            row_of[dof] = static_cast<Eigen::Index>(sys.dofs.size());
            sys.dofs.push_back(static_cast<Eigen::Index>(dof));
        }
    }

    const auto nd = static_cast<Eigen::Index>(sys.dofs.size());
    sys.K = Eigen::MatrixXd::Zero(nd, nd);
    sys.f = Eigen::VectorXd::Zero(nd);
    for (Eigen::Index r = 0; r < nd; ++r) {
        const auto dof = static_cast<std::size_t>(sys.dofs[static_cast<std::size_t>(r)]);
        sys.f[r] = dof % 2 == 0 ? px[dof / 2] : py[dof / 2];
    }

    for (std::size_t k = 0; k < members.size(); ++k) {
        if (!analyzed[k]) {
            continue;
        }
        const auto a = members[k].end_a.value;
        const auto b = members[k].end_b.value;
        const double dx = x[static_cast<Eigen::Index>(b)] - x[static_cast<Eigen::Index>(a)];
        const double dy = y[static_cast<Eigen::Index>(b)] - y[static_cast<Eigen::Index>(a)];
        const double len = std::sqrt(dx * dx + dy * dy);
        const double c = dx / len;
        const double s = dy / len;
        const double ke = E * areas[static_cast<Eigen::Index>(k)] / len;
        const double dir[4] = {-c, -s, c, s};
        const std::size_t dofs[4] = {2 * a, 2 * a + 1, 2 * b, 2 * b + 1};
        for (int i = 0; i < 4; ++i) {
            const auto ri = row_of[dofs[i]];
            if (ri < 0) {
                continue;
            }
            for (int j = 0; j < 4; ++j) {
                const auto rj = row_of[dofs[j]];
                if (rj >= 0) {
                    sys.K(ri, rj) += ke * dir[i] * dir[j];
                }
            }
        }
    }

    if (nd == 0) {
        sys.u.resize(0);
        return sys;
    }
    // Condition is judged on the Jacobi-equilibrated matrix, so that area
    // contrast between members alone does not count as singularity.
    const Eigen::VectorXd diag = sys.K.diagonal();
    if ((diag.array() <= 0.0).any()) {
        throw SingularStiffness("stiffness matrix has a free dof without stiffness");
    }
    const Eigen::VectorXd scale = diag.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd Ks = scale.asDiagonal() * sys.K * scale.asDiagonal();
    Eigen::LLT<Eigen::MatrixXd> llt(Ks);
    if (llt.info() != Eigen::Success) {
        throw SingularStiffness("stiffness matrix is not positive definite");
    }
    const double rcond = llt.rcond();
    if (!(rcond * kMaxCondition >= 1.0)) {
        throw SingularStiffness("stiffness matrix is ill-conditioned (rcond " +
                                std::to_string(rcond) + ")");
    }
    sys.u = scale.asDiagonal() * llt.solve(scale.asDiagonal() * sys.f);
    return sys;
}

TrussDesign analyze(const GroundStructure& g, EquilibriumGeometry geometry, Eigen::VectorXd q,
                    Eigen::VectorXd areas, double sigma_bar, double E) {
    TrussDesign d;
    d.sigma_bar = sigma_bar;
    d.E = E;
    d.q = std::move(q);
    d.areas = std::move(areas);
    d.geometry = std::move(geometry);

    const auto& x = d.geometry.x;
    const auto& y = d.geometry.y;
    auto sys = solve_stiffness(g, x, y, d.areas, E, d.analyzed);

    const auto n = static_cast<Eigen::Index>(g.node_count());
    d.displacements = Eigen::VectorXd::Zero(2 * n);
    for (std::size_t r = 0; r < sys.dofs.size(); ++r) {
        d.displacements[sys.dofs[r]] = sys.u[static_cast<Eigen::Index>(r)];
    }

    const auto members = g.members();
    const auto m = static_cast<Eigen::Index>(members.size());
    d.N_tilde = Eigen::VectorXd::Zero(m);
    d.q_tilde = Eigen::VectorXd::Zero(m);
    const auto& u = d.displacements;
    for (Eigen::Index k = 0; k < m; ++k) {
        if (!d.analyzed[static_cast<std::size_t>(k)]) {
            continue;
        }
        const auto a = static_cast<Eigen::Index>(members[static_cast<std::size_t>(k)].end_a.value);
        const auto b = static_cast<Eigen::Index>(members[static_cast<std::size_t>(k)].end_b.value);
        const double len = d.geometry.lengths[k];
        const double c = (x[b] - x[a]) / len;
        const double s = (y[b] - y[a]) / len;
        const double elong = c * (u[2 * b] - u[2 * a]) + s * (u[2 * b + 1] - u[2 * a + 1]);
        d.N_tilde[k] = E * d.areas[k] / len * elong;
        d.q_tilde[k] = d.N_tilde[k] / len;
    }
    return d;
}

TrussDesign realize_design(const GroundStructure& g, const Eigen::VectorXd& q, double sigma_bar,
                           double E) {
    auto geom = solve_free_coordinates(g, q);
    Eigen::VectorXd areas = geom.lengths.cwiseProduct(q.cwiseAbs()) / sigma_bar;
    return analyze(g, std::move(geom), q, std::move(areas), sigma_bar, E);
}

TrussDesign fully_stressed_sizing(const GroundStructure& g, TrussDesign d, int max_iters,
                                  double tol) {
    constexpr double kMinArea = 1e-9;
    constexpr double kVanishing = 1e-7;
    const auto& L = d.geometry.lengths;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd next = d.N_tilde.cwiseAbs() / d.sigma_bar;
        const double top = next.maxCoeff();
        if (!(top > 0.0)) break;
        next = next.cwiseMax(kMinArea * top);
        double change = 0.0;
        for (Eigen::Index i = 0; i < next.size(); ++i) {
            if (next[i] >= kVanishing * top) {
                change = std::max(change, std::abs(next[i] - d.areas[i]) / next[i]);
            }
        }
        Eigen::VectorXd q = next.cwiseProduct(L.cwiseInverse()) * d.sigma_bar;
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            if (d.N_tilde[i] < 0.0) q[i] = -q[i];
        }
        d = analyze(g, std::move(d.geometry), std::move(q), std::move(next), d.sigma_bar, d.E);
        if (change < tol) break;
    }
    return d;
}

double compliance(const TrussDesign& d, const GroundStructure& g) {
    const auto px = g.px();
    const auto py = g.py();
    double work = 0.0;
    for (std::size_t i = 0; i < px.size(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        work += px[i] * d.displacements[2 * idx] + py[i] * d.displacements[2 * idx + 1];
    }
    return work;
}

double member_energy_compliance(const TrussDesign& d) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < d.areas.size(); ++k) {
        if (d.analyzed[static_cast<std::size_t>(k)]) {
            total += d.N_tilde[k] * d.N_tilde[k] * d.geometry.lengths[k] / (d.E * d.areas[k]);
        }
    }
    return total;
}

} // namespace fdtruss

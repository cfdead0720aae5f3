#include "fdtruss/fdm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fdtruss/errors.hpp"

namespace fdtruss {

ForceDensityVector::ForceDensityVector(Eigen::VectorXd q, Eigen::VectorXd lower,
                                       Eigen::VectorXd upper)
    : q_(std::move(q)), lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != q_.size() || upper_.size() != q_.size()) {
        throw ConfigError("force density bounds have the wrong length");
    }
    if ((lower_.array() > upper_.array()).any()) {
        throw ConfigError("force density lower bound exceeds upper bound");
    }
    q_ = q_.cwiseMax(lower_).cwiseMin(upper_);
}

ForceDensityVector::ForceDensityVector(Eigen::VectorXd q, double lower, double upper)
    : ForceDensityVector(q, Eigen::VectorXd::Constant(q.size(), lower),
                         Eigen::VectorXd::Constant(q.size(), upper)) {}

ForceDensityVector::ForceDensityVector(Eigen::VectorXd q)
    : ForceDensityVector(q, -std::numeric_limits<double>::infinity(),
                         std::numeric_limits<double>::infinity()) {}

ForceDensityMatrix assemble(const GroundStructure& g, const Eigen::VectorXd& q) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    const auto members = g.members();
    if (q.size() != static_cast<Eigen::Index>(members.size())) {
        throw ConfigError("force density vector length " + std::to_string(q.size()) +
                          " does not match member count " + std::to_string(members.size()));
    }

    ForceDensityMatrix out;
    out.full = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto a = static_cast<Eigen::Index>(members[k].end_a.value);
        const auto b = static_cast<Eigen::Index>(members[k].end_b.value);
        const double qk = q[static_cast<Eigen::Index>(k)];
        out.full(a, a) += qk;
        out.full(b, b) += qk;
        out.full(a, b) -= qk;
        out.full(b, a) -= qk;
    }

    const auto free = g.free_nodes();
    const auto fixed = g.fixed_nodes();
    const auto nf = static_cast<Eigen::Index>(free.size());
    const auto nc = static_cast<Eigen::Index>(fixed.size());
    out.free.resize(nf, nf);
    out.link.resize(nf, nc);
    out.fix.resize(nc, nc);
    for (Eigen::Index i = 0; i < nf; ++i) {
        const auto r = static_cast<Eigen::Index>(free[i].value);
        for (Eigen::Index j = 0; j < nf; ++j) {
            out.free(i, j) = out.full(r, static_cast<Eigen::Index>(free[j].value));
        }
        for (Eigen::Index j = 0; j < nc; ++j) {
            out.link(i, j) = out.full(r, static_cast<Eigen::Index>(fixed[j].value));
        }
    }
    for (Eigen::Index i = 0; i < nc; ++i) {
        const auto r = static_cast<Eigen::Index>(fixed[i].value);
        for (Eigen::Index j = 0; j < nc; ++j) {
            out.fix(i, j) = out.full(r, static_cast<Eigen::Index>(fixed[j].value));
        }
    }
    return out;
}

Eigen::VectorXd member_lengths(const GroundStructure& g, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y) {
    const auto members = g.members();
    Eigen::VectorXd len(static_cast<Eigen::Index>(members.size()));
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto a = static_cast<Eigen::Index>(members[k].end_a.value);
        const auto b = static_cast<Eigen::Index>(members[k].end_b.value);
        const double dx = x[b] - x[a];
        const double dy = y[b] - y[a];
        len[static_cast<Eigen::Index>(k)] = std::sqrt(dx * dx + dy * dy);
    }
    return len;
}

EquilibriumGeometry solve_free_coordinates(const GroundStructure& g, const Eigen::VectorXd& q) {
    const auto Q = assemble(g, q);
    const auto free = g.free_nodes();
    const auto fixed = g.fixed_nodes();
    const auto nc = static_cast<Eigen::Index>(fixed.size());

    Eigen::VectorXd x_fix(nc);
    Eigen::VectorXd y_fix(nc);
    for (Eigen::Index j = 0; j < nc; ++j) {
        const auto p = g.node(fixed[j]);
        x_fix[j] = p.x;
        y_fix[j] = p.y;
    }

    Eigen::VectorXd x_free;
    Eigen::VectorXd y_free;
    if (!free.empty()) {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(Q.free);
        const double rcond = lu.rcond();
        if (!(rcond * kMaxCondition >= 1.0)) {
            throw SingularEquilibrium("force density matrix of free nodes is singular (rcond " +
                                      std::to_string(rcond) + ")");
        }
        x_free = lu.solve(-Q.link * x_fix);
        y_free = lu.solve(-Q.link * y_fix);
    }

    EquilibriumGeometry out;
    const auto n = static_cast<Eigen::Index>(g.node_count());
    out.x.resize(n);
    out.y.resize(n);
    for (std::size_t i = 0; i < free.size(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        out.x[static_cast<Eigen::Index>(free[i].value)] = x_free[idx];
        out.y[static_cast<Eigen::Index>(free[i].value)] = y_free[idx];
    }
    for (Eigen::Index j = 0; j < nc; ++j) {
        out.x[static_cast<Eigen::Index>(fixed[j].value)] = x_fix[j];
        out.y[static_cast<Eigen::Index>(fixed[j].value)] = y_fix[j];
    }
    out.reactions_x = Q.fix * x_fix;
    out.reactions_y = Q.fix * y_fix;
    if (!free.empty()) {
        out.reactions_x += Q.link.transpose() * x_free;
        out.reactions_y += Q.link.transpose() * y_free;
    }
    out.lengths = member_lengths(g, out.x, out.y);
    return out;
}

EquilibriumGeometry solve_free_coordinates(const GroundStructure& g, const ForceDensityVector& q) {
    return solve_free_coordinates(g, q.values());
}

namespace {

double relative_gap(const GroundStructure& g, const Eigen::VectorXd& expected,
                    const Eigen::VectorXd& actual) {
    double gap = 0.0;
    double scale = 0.0;
    for (auto id : g.free_nodes()) {
        const auto i = static_cast<Eigen::Index>(id.value);
        gap = std::max(gap, std::abs(expected[i] - actual[i]));
        scale = std::max(scale, std::abs(expected[i]));
    }
    return scale > 0.0 ? gap / scale : gap;
}

} // namespace

AffineReport check_affine_scaling(const GroundStructure& g, const Eigen::VectorXd& q,
                                  double alpha) {
    const auto base = solve_free_coordinates(g, q);
    const auto sx = solve_free_coordinates(scale_structure(g, alpha, 1.0), q);
    const auto sy = solve_free_coordinates(scale_structure(g, 1.0, alpha), q);
    return {relative_gap(g, alpha * base.x, sx.x), relative_gap(g, alpha * base.y, sy.y)};
}

} // namespace fdtruss

#include "fdtruss/energy.hpp"

#include <cmath>

#include "fdtruss/errors.hpp"

namespace fdtruss {

namespace {

template <class Fn>
void for_each_member_delta(const GroundStructure& g, const EquilibriumGeometry& geom, Fn&& fn) {
    const auto members = g.members();
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto a = static_cast<Eigen::Index>(members[k].end_a.value);
        const auto b = static_cast<Eigen::Index>(members[k].end_b.value);
        fn(static_cast<Eigen::Index>(k), geom.x[b] - geom.x[a], geom.y[b] - geom.y[a]);
    }
}

} // namespace

ObjectiveValues split_objectives(const GroundStructure& g, const EquilibriumGeometry& geom,
                                 const Eigen::VectorXd& q_eval, double sigma_bar, double E) {
    if (q_eval.size() != static_cast<Eigen::Index>(g.member_count())) {
        throw ConfigError("force density vector length does not match member count");
    }
    ObjectiveValues out;
    const double coef = sigma_bar / E;
    for_each_member_delta(g, geom, [&](Eigen::Index k, double dx, double dy) {
        const double aq = std::abs(q_eval[k]);
        out.Fx += coef * dx * dx * aq;
        out.Fy += coef * dy * dy * aq;
    });
    out.F = out.Fx + out.Fy;
    out.F_star = out.F;
    return out;
}

double weighted_sum(const GroundStructure& g, const EquilibriumGeometry& geom,
                    const Eigen::VectorXd& q_eval, double mu_x, double mu_y, double sigma_bar,
                    double E, double c) {
    if (mu_x < 0.0 || mu_y < 0.0) {
        throw ConfigError("weight coefficients must be nonnegative");
    }
    if (!(c > 0.0)) {
        throw ConfigError("smoothing constant must be positive");
    }
    double total = 0.0;
    const double coef = sigma_bar / E;
    for_each_member_delta(g, geom, [&](Eigen::Index k, double dx, double dy) {
        const double qk = q_eval[k];
        total += coef * (mu_x * dx * dx + mu_y * dy * dy) * std::sqrt(qk * qk + c);
    });
    return total;
}

ObjectiveValues design_objectives(const GroundStructure& g, const TrussDesign& d) {
    return split_objectives(g, d.geometry, d.q_tilde, d.sigma_bar, d.E);
}

std::pair<TrussDesign, VolumeNormalization> normalize_volume(const GroundStructure& g,
                                                             const TrussDesign& d,
                                                             double V_target) {
    const double v0 = d.volume();
    if (!(v0 > 0.0) || !std::isfinite(v0)) {
        throw ZeroVolume("design has no structural volume to normalize");
    }
    if (!(V_target > 0.0)) {
        throw ConfigError("target volume must be positive");
    }
    const double s = V_target / v0;
    VolumeNormalization norm{V_target, d.sigma_bar / s, s};
    auto scaled = analyze(g, d.geometry, d.q, d.areas * s, norm.sigma_bar_adjusted, d.E);
    return {std::move(scaled), norm};
}

std::vector<bool> retained_members(const Eigen::VectorXd& q_tilde) {
    std::vector<bool> keep(static_cast<std::size_t>(q_tilde.size()), false);
    if (q_tilde.size() == 0) {
        return keep;
    }
    const double cut = kTopologyThreshold * q_tilde.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < q_tilde.size(); ++i) {
        keep[static_cast<std::size_t>(i)] = std::abs(q_tilde[i]) >= cut && q_tilde[i] != 0.0;
    }
    return keep;
}

} // namespace fdtruss

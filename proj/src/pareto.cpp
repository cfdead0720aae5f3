#include "fdtruss/pareto.hpp"

#include <algorithm>
#include <cmath>

#include "fdtruss/errors.hpp"

namespace fdtruss {

namespace {

constexpr double kDuplicateTol = 1e-12;

} // namespace

std::vector<ParetoPoint> clean_front(std::vector<ParetoPoint> points) {
    std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
        return a.S[0] < b.S[0] || (a.S[0] == b.S[0] && a.S[1] < b.S[1]);
    });
    std::vector<ParetoPoint> out;
    for (auto& p : points) {
        if (!out.empty()) {
            const auto& prev = out.back().S;
            const bool duplicate = std::abs(prev[0] - p.S[0]) <= kDuplicateTol &&
                                   std::abs(prev[1] - p.S[1]) <= kDuplicateTol;
            // Sorted by Fx, so anything not strictly below the last Fy is dominated.
            if (duplicate || p.S[1] >= prev[1]) continue;
        }
        out.push_back(std::move(p));
    }
    return out;
}

RatioEstimate estimate_ratios(std::vector<ParetoPoint> points) {
    RatioEstimate est;
    est.points = clean_front(std::move(points));
    auto& pts = est.points;
    if (pts.size() < 3) {
        throw TooFewPoints("slope estimation needs at least three nondominated points");
    }
    for (auto& p : pts) {
        p.beta.reset();
        p.mu_ratio.reset();
        p.r_est.reset();
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
        pts[i].beta = (pts[i].S[1] - pts[i - 1].S[1]) / (pts[i].S[0] - pts[i - 1].S[0]);
        if (i >= 2 && std::abs(*pts[i].beta) > std::abs(*pts[i - 1].beta)) {
            est.nonconvex = true;
        }
    }
    const std::size_t last = pts.size() - 1;
    for (std::size_t i = 0; i <= last; ++i) {
        double ratio;
        if (i == 0) {
            ratio = std::abs(*pts[1].beta);
        } else if (i == last) {
            ratio = std::abs(*pts[last].beta);
        } else {
            ratio = std::sqrt(std::abs(*pts[i].beta) * std::abs(*pts[i + 1].beta));
        }
        pts[i].mu_ratio = ratio;
        pts[i].r_est = std::sqrt(ratio);
    }
    return est;
}

const ParetoPoint& solution_for_ratio(std::span<const ParetoPoint> points, double r) {
    if (points.empty()) throw TooFewPoints("no points to choose from");
    const ParetoPoint* best = nullptr;
    double best_gap = 0.0;
    for (const auto& p : points) {
        if (!p.r_est) continue;
        const double gap = std::abs(*p.r_est - r);
        if (!best || gap < best_gap || (gap == best_gap && p.S[0] < best->S[0])) {
            best = &p;
            best_gap = gap;
        }
    }
    if (!best) throw TooFewPoints("no point carries an estimated ratio");
    return *best;
}

RealizedPoint realize_at_ratio(const GroundStructure& g, const Eigen::VectorXd& genome, double r,
                               double V_target, double sigma_bar, double E) {
    if (!(r > 0.0)) throw ConfigError("aspect ratio must be positive");
    const auto scaled = scale_structure(g, r, 1.0);
    auto raw = fully_stressed_sizing(scaled, realize_design(scaled, genome, sigma_bar, E));
    auto [design, norm] = normalize_volume(scaled, raw, V_target);
    RealizedPoint out;
    out.compliance = compliance(design, scaled);
    out.design = std::move(design);
    out.normalization = norm;
    return out;
}

double hypervolume(std::span<const Objectives> points, const Objectives& ref) {
    std::vector<Objectives> pts;
    for (const auto& p : points) {
        if (p[0] < ref[0] && p[1] < ref[1]) pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double ceiling = ref[1];
    for (const auto& p : pts) {
        if (p[1] < ceiling) {
            area += (ref[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    return area;
}

} // namespace fdtruss

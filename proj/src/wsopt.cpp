#include "fdtruss/wsopt.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "fdtruss/errors.hpp"
#include "fdtruss/moga.hpp"

namespace fdtruss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
// Resized densities never drop below this fraction of the largest one.
// Member stiffness is E|q|/sigma, so the floor bounds the stiffness contrast;
// it sits below the readout threshold so floored members still read as removed.
constexpr double kResizeFloor = 0.1 * kTopologyThreshold;

void validate(const WSConfig& cfg) {
    if (!(cfg.c > 0.0)) throw ConfigError("smoothing constant c must be positive");
    if (!(cfg.tol_rel > 0.0)) throw ConfigError("tol_rel must be positive");
    if (!(cfg.fd_step > 0.0)) throw ConfigError("fd_step must be positive");
    if (cfg.mu_x < 0.0 || cfg.mu_y < 0.0) throw ConfigError("weights must be nonnegative");
    if (!(cfg.q_lower < cfg.q_upper)) throw ConfigError("empty force density bounds");
    if (cfg.max_iters < 0 || cfg.starts < 1) throw ConfigError("invalid iteration settings");
}

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const WSConfig& cfg) {
    return x.cwiseMax(cfg.q_lower).cwiseMin(cfg.q_upper);
}

class Minimizer {
public:
    Minimizer(const GroundStructure& g, const WSConfig& cfg, double sigma_bar, double E)
        : g_(g), cfg_(cfg), sigma_bar_(sigma_bar), E_(E) {}

    WSResult run(const Eigen::VectorXd& start) {
        res_.q = clamp(start, cfg_);
        res_.F_star = eval(res_.q);
        if (!std::isfinite(res_.F_star)) {
            throw StartInfeasible("weighted-sum start point is infeasible");
        }
        res_.history.push_back(res_.F_star);

        if (cfg_.resize && cfg_.mu_x > 0.0 && cfg_.mu_y > 0.0) {
            weighted_ = scale_structure(g_, std::sqrt(cfg_.mu_x), std::sqrt(cfg_.mu_y));
        }
        for (int round = 0; round < std::max(1, cfg_.max_rounds); ++round) {
            quasi_newton();
            if (!weighted_ || !resize()) {
                break;
            }
        }
        if (weighted_ && best_q_.size() > 0) {
            const double merit = stiffness_merit(res_.q);
            if (!(merit <= best_merit_)) {
                accept(best_q_, eval(best_q_));
            }
        }
        if (cfg_.smoothing == SmoothingTarget::recomputed) {
            rescale_to_stress_level();
        }
        auto d = realize_design(g_, res_.q, sigma_bar_, E_);
        res_.objectives = design_objectives(g_, d);
        res_.objectives.mu_x = cfg_.mu_x;
        res_.objectives.mu_y = cfg_.mu_y;
        res_.objectives.c = cfg_.c;
        res_.objectives.F_star = res_.F_star;
        return res_;
    }

private:
    double eval(const Eigen::VectorXd& q) {
        ++res_.evaluations;
        return weighted_objective(g_, q, cfg_, sigma_bar_, E_);
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& q) {
        int n = 0;
        auto grad = weighted_gradient(g_, q, cfg_, sigma_bar_, E_, &n);
        res_.evaluations += n;
        return grad;
    }

    void accept(Eigen::VectorXd q, double f) {
        res_.q = std::move(q);
        res_.F_star = f;
        res_.history.push_back(f);
    }

    void quasi_newton() {
        const auto m = res_.q.size();
        Eigen::VectorXd grad = gradient(res_.q);
        Eigen::MatrixXd H = Eigen::MatrixXd::Identity(m, m);
        bool identity = true;
        int iters = 0;
        res_.status = WSStatus::iteration_limit;

        while (iters < cfg_.max_iters) {
            const Eigen::VectorXd& x = res_.q;
            const double fx = res_.F_star;
            if (!grad.allFinite()) {
                res_.status = WSStatus::no_progress;
                break;
            }
            const Eigen::VectorXd projected = x - clamp(x - grad, cfg_);
            if (projected.lpNorm<Eigen::Infinity>() <= cfg_.tol_grad * std::max(1.0, std::abs(fx))) {
                res_.status = WSStatus::converged;
                break;
            }

            Eigen::VectorXd gfree = grad;
            std::vector<bool> active(static_cast<std::size_t>(m), false);
            for (Eigen::Index i = 0; i < m; ++i) {
                if ((x[i] <= cfg_.q_lower && grad[i] > 0.0) ||
                    (x[i] >= cfg_.q_upper && grad[i] < 0.0)) {
                    active[static_cast<std::size_t>(i)] = true;
                    gfree[i] = 0.0;
                }
            }
            Eigen::VectorXd dir = -(H * gfree);
            for (Eigen::Index i = 0; i < m; ++i) {
                if (active[static_cast<std::size_t>(i)]) dir[i] = 0.0;
            }
            if (grad.dot(dir) >= 0.0) {
                H.setIdentity();
                identity = true;
                dir = -gfree;
            }
            if (identity) {
                // Unscaled steepest descent: cap the first trial step.
                const double cap = 0.1 * std::max(1.0, x.lpNorm<Eigen::Infinity>());
                const double len = dir.lpNorm<Eigen::Infinity>();
                if (len > cap) dir *= cap / len;
            }

            double alpha = 1.0;
            bool found = false;
            Eigen::VectorXd xn;
            double fn = kInf;
            for (int k = 0; k < kMaxBacktracks; ++k, alpha *= 0.5) {
                xn = clamp(x + alpha * dir, cfg_);
                fn = eval(xn);
                if (std::isfinite(fn) && fn <= fx + kArmijo * grad.dot(xn - x)) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                if (!identity) {
                    H.setIdentity();
                    identity = true;
                    continue;
                }
                res_.status = WSStatus::no_progress;
                break;
            }

            Eigen::VectorXd gn = gradient(xn);
            const Eigen::VectorXd s = xn - x;
            const Eigen::VectorXd y = gn - grad;
            const double sy = s.dot(y);
            if (sy > 1e-12 * s.norm() * y.norm()) {
                if (identity) {
                    H *= sy / y.squaredNorm();
                }
                const double rho = 1.0 / sy;
                const Eigen::VectorXd Hy = H * y;
                H += rho * rho * (sy + y.dot(Hy)) * (s * s.transpose()) -
                     rho * (Hy * s.transpose() + s * Hy.transpose());
                identity = false;
            }

            const double rel = (fx - fn) / std::max(std::abs(fx), 1e-300);
            accept(std::move(xn), fn);
            grad = std::move(gn);
            ++iters;
            ++res_.iterations;
            if (rel < cfg_.tol_rel) {
                res_.status = WSStatus::converged;
                break;
            }
        }
    }

    // Volume-normalized compliance C*V on the structure stretched by sqrt(mu),
    // where the weighted objective is the plain energy sum.
    double stiffness_merit(const Eigen::VectorXd& q) const {
        try {
            const auto d = realize_design(*weighted_, q, sigma_bar_, E_);
            return compliance(d, *weighted_) * d.volume();
        } catch (const Error&) {
            return kInf;
        }
    }

    // q <- q~ keeps the geometry (q~ equilibrates the free nodes at the current
    // coordinates) and resizes areas by the stress ratio. Accepted while C*V
    // drops by more than tol_rel; F* may rise slightly when the geometry moves.
    bool resize() {
        double merit = stiffness_merit(res_.q);
        if (!std::isfinite(merit)) return false;
        if (merit < best_merit_) {
            best_merit_ = merit;
            best_q_ = res_.q;
        }
        const double start = best_merit_;
        for (int step = 0; step < 200; ++step) {
            TrussDesign d;
            try {
                d = realize_design(*weighted_, res_.q, sigma_bar_, E_);
            } catch (const Error&) {
                break;
            }
            const double top = d.q_tilde.cwiseAbs().maxCoeff();
            if (!(top > 0.0)) break;
            Eigen::VectorXd next = d.q_tilde;
            for (Eigen::Index i = 0; i < next.size(); ++i) {
                if (std::abs(next[i]) < kResizeFloor * top) {
                    next[i] = kResizeFloor * top;
                }
            }
            const double peak = next.lpNorm<Eigen::Infinity>();
            const double bound = std::min(std::abs(cfg_.q_lower), std::abs(cfg_.q_upper));
            if (peak > bound) next *= bound / peak;
            next = clamp(next, cfg_);
            const double mn = stiffness_merit(next);
            const double fn = eval(next);
            if (!(mn < merit) || !std::isfinite(fn)) break;
            const double rel = (merit - mn) / merit;
            accept(std::move(next), fn);
            merit = mn;
            if (merit < best_merit_) {
                best_merit_ = merit;
                best_q_ = res_.q;
            }
            if (rel < cfg_.tol_rel) break;
        }
        return best_merit_ < start * (1.0 - cfg_.tol_rel);
    }

    // F* on q~ is invariant under a uniform scaling of q; pick the scale at
    // which the realized stress level equals sigma_bar.
    void rescale_to_stress_level() {
        TrussDesign d;
        try {
            d = realize_design(g_, res_.q, sigma_bar_, E_);
        } catch (const Error&) {
            return;
        }
        const auto& L = d.geometry.lengths;
        const double num = (d.q_tilde.cwiseAbs().array() * L.array().square()).sum();
        const double den = (res_.q.cwiseAbs().array() * L.array().square()).sum();
        if (!(num > 0.0) || !(den > 0.0)) return;
        Eigen::VectorXd scaled = res_.q * (num / den);
        if ((scaled.array() < cfg_.q_lower).any() || (scaled.array() > cfg_.q_upper).any()) return;
        const double f = eval(scaled);
        if (std::isfinite(f)) {
            res_.q = std::move(scaled);
            res_.F_star = f;
        }
    }

    const GroundStructure& g_;
    const WSConfig& cfg_;
    double sigma_bar_;
    double E_;
    WSResult res_;
    std::optional<GroundStructure> weighted_;
    Eigen::VectorXd best_q_;
    double best_merit_ = kInf;
};

} // namespace

double weighted_objective(const GroundStructure& g, const Eigen::VectorXd& q,
                          const WSConfig& cfg, double sigma_bar, double E) {
    try {
        if (cfg.smoothing == SmoothingTarget::raw) {
            auto geom = solve_free_coordinates(g, q);
            return weighted_sum(g, geom, q, cfg.mu_x, cfg.mu_y, sigma_bar, E, cfg.c);
        }
        auto d = realize_design(g, q, sigma_bar, E);
        const double f =
            weighted_sum(g, d.geometry, d.q_tilde, cfg.mu_x, cfg.mu_y, sigma_bar, E, cfg.c);
        return std::isfinite(f) ? f : kInf;
    } catch (const SingularEquilibrium&) {
        return kInf;
    } catch (const SingularStiffness&) {
        return kInf;
    }
}

Eigen::VectorXd weighted_gradient(const GroundStructure& g, const Eigen::VectorXd& q,
                                  const WSConfig& cfg, double sigma_bar, double E,
                                  int* evaluations) {
    const auto m = q.size();
    Eigen::VectorXd grad(m);
    Eigen::VectorXd probe = q;
    int count = 0;
    double f0 = std::numeric_limits<double>::quiet_NaN();
    auto center = [&] {
        if (std::isnan(f0)) {
            f0 = weighted_objective(g, q, cfg, sigma_bar, E);
            ++count;
        }
        return f0;
    };

    for (Eigen::Index i = 0; i < m; ++i) {
        const double h = cfg.fd_step * std::max(1.0, std::abs(q[i]));
        const bool up_ok = q[i] + h <= cfg.q_upper;
        const bool down_ok = q[i] - h >= cfg.q_lower;
        double fp = kInf;
        double fm = kInf;
        if (up_ok) {
            probe[i] = q[i] + h;
            fp = weighted_objective(g, probe, cfg, sigma_bar, E);
            ++count;
        }
        if (down_ok) {
            probe[i] = q[i] - h;
            fm = weighted_objective(g, probe, cfg, sigma_bar, E);
            ++count;
        }
        probe[i] = q[i];
        if (std::isfinite(fp) && std::isfinite(fm)) {
            grad[i] = (fp - fm) / (2.0 * h);
        } else if (std::isfinite(fp)) {
            grad[i] = (fp - center()) / h;
        } else if (std::isfinite(fm)) {
            grad[i] = (center() - fm) / h;
        } else {
            grad[i] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    if (evaluations) *evaluations = count;
    return grad;
}

WSResult minimize_from(const GroundStructure& g, const Eigen::VectorXd& start,
                       const WSConfig& cfg, double sigma_bar, double E) {
    validate(cfg);
    if (start.size() != static_cast<Eigen::Index>(g.member_count())) {
        throw ConfigError("start vector length does not match member count");
    }
    return Minimizer(g, cfg, sigma_bar, E).run(start);
}

WSResult minimize(const GroundStructure& g, const WSConfig& cfg, double sigma_bar, double E) {
    validate(cfg);
    const Eigen::VectorXd base = cfg.start ? *cfg.start : initial_force_densities(g, E);
    std::optional<WSResult> best;
    int evaluations = 0;

    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXd delta(base.size());
    for (int s = 0; s < cfg.starts; ++s) {
        if (s % 2 == 1) {
            for (Eigen::Index i = 0; i < delta.size(); ++i) {
                delta[i] = cfg.start_halfwidth * unit(rng);
            }
        }
        const Eigen::VectorXd start = s == 0       ? base
                                      : s % 2 == 1 ? Eigen::VectorXd(base + delta)
                                                   : Eigen::VectorXd(base - delta);
        try {
            auto res = minimize_from(g, start, cfg, sigma_bar, E);
            evaluations += res.evaluations;
            if (!best || res.F_star < best->F_star) best = std::move(res);
        } catch (const StartInfeasible&) {
            continue;
        }
    }
    if (!best) throw StartInfeasible("every weighted-sum start point is infeasible");
    best->evaluations = evaluations;
    return std::move(*best);
}

namespace {

MethodResult finish(const GroundStructure& scaled, WSResult opt, double V_target,
                    double sigma_bar, double E) {
    auto raw = fully_stressed_sizing(scaled, realize_design(scaled, opt.q, sigma_bar, E));
    auto [design, norm] = normalize_volume(scaled, raw, V_target);
    MethodResult out;
    out.compliance = compliance(design, scaled);
    out.design = std::move(design);
    out.optimum = std::move(opt);
    return out;
}

void require_ratio(double r) {
    if (!(r > 0.0)) throw ConfigError("aspect ratio must be positive");
}

} // namespace

MethodResult scaling_method(const GroundStructure& g, double r, double V_target,
                            double sigma_bar, double E, WSConfig cfg) {
    require_ratio(r);
    const auto scaled = scale_structure(g, r, 1.0);
    cfg.mu_x = 1.0;
    cfg.mu_y = 1.0;
    auto opt = minimize(scaled, cfg, sigma_bar, E);
    return finish(scaled, std::move(opt), V_target, sigma_bar, E);
}

MethodResult weighted_method(const GroundStructure& g, double r, double V_target,
                             double sigma_bar, double E, WSConfig cfg) {
    require_ratio(r);
    cfg.mu_x = r * r;
    cfg.mu_y = 1.0;
    auto opt = minimize(g, cfg, sigma_bar, E);
    return finish(scale_structure(g, r, 1.0), std::move(opt), V_target, sigma_bar, E);
}

std::vector<Eigen::VectorXd> weighted_sum_seeds(const GroundStructure& g,
                                                const std::vector<double>& ratios,
                                                double sigma_bar, double E, WSConfig cfg) {
    std::vector<Eigen::VectorXd> seeds;
    for (double r : ratios) {
        require_ratio(r);
        cfg.mu_x = r * r;
        cfg.mu_y = 1.0;
        seeds.push_back(minimize(g, cfg, sigma_bar, E).q);
    }
    return seeds;
}

} // namespace fdtruss

#include "fdtruss/moga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "fdtruss/energy.hpp"
#include "fdtruss/errors.hpp"
#include "fdtruss/fea.hpp"

namespace fdtruss {

namespace {

constexpr double kRangeFloor = 1e-12;

double uniform01(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

bool dominates(const Objectives& a, const Objectives& b) {
    return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

void validate(const GAConfig& c) {
    if (c.population_size < 2) throw ConfigError("population size must be at least 2");
    if (c.generations < 0) throw ConfigError("generation count must be nonnegative");
    if (c.p_crossover < 0.0 || c.p_crossover > 1.0)
        throw ConfigError("crossover probability must lie in [0, 1]");
    if (c.p_mutation < 0.0 || c.p_mutation > 1.0)
        throw ConfigError("mutation probability must lie in (0, 1]");
    if (!(c.init_halfwidth > 0.0)) throw ConfigError("initial half-width must be positive");
    if (!(c.q_lower < c.q_upper)) throw ConfigError("empty force density bounds");
    if (!(c.eta_crossover >= 0.0) || !(c.eta_mutation >= 0.0))
        throw ConfigError("distribution indices must be nonnegative");
}

void evaluate_all(std::vector<Individual>& pop, std::size_t begin, const GroundStructure& g,
                  double sigma_bar, double E, bool single_thread) {
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            pop[i].objectives = evaluate(pop[i].genome, g, sigma_bar, E);
        }
    };
    const std::size_t count = pop.size() - begin;
    const std::size_t threads =
        single_thread ? 1 : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (threads == 1 || count < 2 * threads) {
        work(begin, pop.size());
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t lo = begin; lo < pop.size(); lo += chunk) {
        pool.emplace_back(work, lo, std::min(pop.size(), lo + chunk));
    }
}

std::vector<std::optional<Objectives>> objectives_of(std::span<const Individual> pop) {
    std::vector<std::optional<Objectives>> out;
    out.reserve(pop.size());
    for (const auto& ind : pop) out.push_back(ind.objectives);
    return out;
}

} // namespace

Eigen::VectorXd initial_force_densities(const GroundStructure& g, double E) {
    EquilibriumGeometry geom;
    const auto xs = g.x_coords();
    const auto ys = g.y_coords();
    geom.x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    geom.y = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    geom.lengths = member_lengths(g, geom.x, geom.y);
    const auto m = static_cast<Eigen::Index>(g.member_count());
    auto d = analyze(g, geom, Eigen::VectorXd::Ones(m), Eigen::VectorXd::Ones(m), 1.0, E);
    if (!std::all_of(d.analyzed.begin(), d.analyzed.end(), [](bool b) { return b; })) {
        throw SingularStiffness("ground structure has degenerate members");
    }
    return d.q_tilde;
}

std::optional<Objectives> evaluate(const Eigen::VectorXd& genome, const GroundStructure& g,
                                   double sigma_bar, double E) {
    try {
        const auto d = realize_design(g, genome, sigma_bar, E);
        const auto obj = design_objectives(g, d);
        if (!std::isfinite(obj.Fx) || !std::isfinite(obj.Fy)) {
            return std::nullopt;
        }
        return Objectives{obj.Fx, obj.Fy};
    } catch (const SingularEquilibrium&) {
        return std::nullopt;
    } catch (const SingularStiffness&) {
        return std::nullopt;
    }
}

std::vector<int> nondominated_sort(std::span<const std::optional<Objectives>> points) {
    std::vector<int> rank(points.size(), 0);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i]) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return *points[a] < *points[b] || (*points[a] == *points[b] && a < b);
    });

    // In lexicographic order a front's last member has the smallest second
    // objective seen so far, so it alone decides whether a later point joins.
    std::vector<Objectives> last;
    for (auto i : order) {
        const auto& p = *points[i];
        std::size_t k = 0;
        while (k < last.size() && dominates(last[k], p)) ++k;
        if (k == last.size()) {
            last.push_back(p);
        } else {
            last[k] = p;
        }
        rank[i] = static_cast<int>(k);
    }
    const int infeasible_rank = static_cast<int>(last.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i]) rank[i] = infeasible_rank;
    }
    return rank;
}

std::vector<Objectives> reference_points(int divisions) {
    if (divisions < 1) throw ConfigError("reference lattice needs at least one division");
    std::vector<Objectives> refs;
    for (int i = 0; i <= divisions; ++i) {
        const double w = static_cast<double>(i) / divisions;
        refs.push_back({w, 1.0 - w});
    }
    return refs;
}

void sbx_crossover(Eigen::VectorXd& a, Eigen::VectorXd& b, double eta, double lower,
                   double upper, std::mt19937_64& rng) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (uniform01(rng) > 0.5) continue;
        if (std::abs(a[i] - b[i]) <= 1e-14) continue;

        const double x1 = std::min(a[i], b[i]);
        const double x2 = std::max(a[i], b[i]);
        const double u = uniform01(rng);
        auto spread = [&](double beta) {
            const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
            if (u <= 1.0 / alpha) return std::pow(u * alpha, 1.0 / (eta + 1.0));
            return std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
        };
        const double bq1 = spread(1.0 + 2.0 * (x1 - lower) / (x2 - x1));
        const double c1 = std::clamp(0.5 * (x1 + x2 - bq1 * (x2 - x1)), lower, upper);
        const double bq2 = spread(1.0 + 2.0 * (upper - x2) / (x2 - x1));
        const double c2 = std::clamp(0.5 * (x1 + x2 + bq2 * (x2 - x1)), lower, upper);

        if (uniform01(rng) <= 0.5) {
            a[i] = c2;
            b[i] = c1;
        } else {
            a[i] = c1;
            b[i] = c2;
        }
    }
}

void polynomial_mutation(Eigen::VectorXd& x, double eta, double p, double lower, double upper,
                         std::mt19937_64& rng) {
    const double span = upper - lower;
    const double power = 1.0 / (eta + 1.0);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (uniform01(rng) > p) continue;
        const double d1 = (x[i] - lower) / span;
        const double d2 = (upper - x[i]) / span;
        const double u = uniform01(rng);
        double dq;
        if (u < 0.5) {
            const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
            dq = std::pow(val, power) - 1.0;
        } else {
            const double val =
                2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
            dq = 1.0 - std::pow(val, power);
        }
        x[i] = std::clamp(x[i] + dq * span, lower, upper);
    }
}

std::vector<Individual> select_survivors(std::vector<Individual> pool, std::size_t count,
                                         std::span<const Objectives> refs, std::mt19937_64& rng,
                                         NicheSpace space) {
    if (pool.size() <= count) return pool;

    auto ranks = nondominated_sort(objectives_of(pool));
    // Exact copies of an objective pair already in the pool queue behind every
    // distinct feasible point, ahead of infeasible ones.
    {
        int feasible_max = -1;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (pool[i].objectives) feasible_max = std::max(feasible_max, ranks[i]);
        }
        std::vector<std::size_t> order(pool.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
            if (!pool[a].objectives || !pool[b].objectives) {
                return pool[a].objectives.has_value() && !pool[b].objectives.has_value();
            }
            return *pool[a].objectives < *pool[b].objectives;
        });
        for (std::size_t k = 1; k < order.size(); ++k) {
            const auto& prev = pool[order[k - 1]].objectives;
            const auto& cur = pool[order[k]].objectives;
            if (cur && prev && *cur == *prev) ranks[order[k]] = feasible_max + 1;
        }
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (!pool[i].objectives) ranks[i] = feasible_max + 2;
        }
    }
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i].rank = ranks[i];
    const int max_rank = *std::max_element(ranks.begin(), ranks.end());

    std::vector<std::size_t> chosen;
    std::vector<std::size_t> last;
    for (int r = 0; r <= max_rank && chosen.size() < count; ++r) {
        std::vector<std::size_t> front;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (ranks[i] == r) front.push_back(i);
        }
        if (chosen.size() + front.size() <= count) {
            chosen.insert(chosen.end(), front.begin(), front.end());
        } else {
            last = std::move(front);
            break;
        }
    }

    auto collect = [&](const std::vector<std::size_t>& idx) {
        std::vector<Individual> out;
        out.reserve(count);
        for (auto i : idx) out.push_back(std::move(pool[i]));
        return out;
    };
    if (chosen.size() == count) return collect(chosen);

    std::size_t remaining = count - chosen.size();
    if (!pool[last.front()].objectives) {
        // Only infeasible candidates are left to fill with.
        std::shuffle(last.begin(), last.end(), rng);
        chosen.insert(chosen.end(), last.begin(), last.begin() + static_cast<long>(remaining));
        return collect(chosen);
    }

    // Normalize with the ideal and worst points of the candidate set.
    std::vector<std::size_t> considered = chosen;
    considered.insert(considered.end(), last.begin(), last.end());
    Objectives ideal{std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()};
    Objectives worst{-std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity()};
    auto coords = [space](const Objectives& o) {
        if (space == NicheSpace::linear) return o;
        constexpr double tiny = std::numeric_limits<double>::min();
        return Objectives{std::log(std::max(o[0], tiny)), std::log(std::max(o[1], tiny))};
    };
    for (auto i : considered) {
        const auto o = coords(*pool[i].objectives);
        for (int k = 0; k < 2; ++k) {
            ideal[k] = std::min(ideal[k], o[k]);
            worst[k] = std::max(worst[k], o[k]);
        }
    }
    const Objectives range{std::max(worst[0] - ideal[0], kRangeFloor),
                           std::max(worst[1] - ideal[1], kRangeFloor)};

    std::vector<double> distance(pool.size(), 0.0);
    for (auto i : considered) {
        const auto o = coords(*pool[i].objectives);
        const double f0 = (o[0] - ideal[0]) / range[0];
        const double f1 = (o[1] - ideal[1]) / range[1];
        double best = std::numeric_limits<double>::infinity();
        int best_ref = 0;
        for (std::size_t j = 0; j < refs.size(); ++j) {
            const double w0 = refs[j][0];
            const double w1 = refs[j][1];
            const double t = (f0 * w0 + f1 * w1) / (w0 * w0 + w1 * w1);
            const double d0 = f0 - t * w0;
            const double d1 = f1 - t * w1;
            const double d = std::sqrt(d0 * d0 + d1 * d1);
            if (d < best) {
                best = d;
                best_ref = static_cast<int>(j);
            }
        }
        pool[i].niche = best_ref;
        distance[i] = best;
    }

    std::vector<int> niche_count(refs.size(), 0);
    for (auto i : chosen) ++niche_count[static_cast<std::size_t>(pool[i].niche)];

    std::vector<bool> available(refs.size(), true);
    std::vector<bool> taken(pool.size(), false);
    // The best value of each objective must survive; niching alone can drop it
    // when the split front is larger than the free slots.
    for (int k = 0; k < 2 && remaining > 0; ++k) {
        Objectives best_seen{std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity()};
        for (auto i : chosen) {
            best_seen[k] = std::min(best_seen[k], (*pool[i].objectives)[k]);
        }
        const auto it = std::min_element(last.begin(), last.end(), [&](auto a, auto b) {
            const auto& oa = *pool[a].objectives;
            const auto& ob = *pool[b].objectives;
            return oa[k] < ob[k] || (oa[k] == ob[k] && oa[1 - k] < ob[1 - k]);
        });
        if (taken[*it] || !((*pool[*it].objectives)[k] < best_seen[k])) continue;
        taken[*it] = true;
        chosen.push_back(*it);
        ++niche_count[static_cast<std::size_t>(pool[*it].niche)];
        --remaining;
    }
    while (remaining > 0) {
        int min_count = std::numeric_limits<int>::max();
        for (std::size_t j = 0; j < refs.size(); ++j) {
            if (available[j]) min_count = std::min(min_count, niche_count[j]);
        }
        std::vector<std::size_t> candidates;
        for (std::size_t j = 0; j < refs.size(); ++j) {
            if (available[j] && niche_count[j] == min_count) candidates.push_back(j);
        }
        const std::size_t j = candidates[std::uniform_int_distribution<std::size_t>(
            0, candidates.size() - 1)(rng)];

        std::vector<std::size_t> members;
        for (auto i : last) {
            if (!taken[i] && pool[i].niche == static_cast<int>(j)) members.push_back(i);
        }
        if (members.empty()) {
            available[j] = false;
            continue;
        }
        std::size_t pick;
        if (niche_count[j] == 0) {
            pick = *std::min_element(members.begin(), members.end(), [&](auto a, auto b) {
                return distance[a] < distance[b];
            });
        } else {
            pick = members[std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng)];
        }
        taken[pick] = true;
        chosen.push_back(pick);
        ++niche_count[j];
        --remaining;
    }
    return collect(chosen);
}

FrontArchive run(const GroundStructure& g, const GAConfig& config, double sigma_bar, double E) {
    validate(config);
    const auto m = static_cast<Eigen::Index>(g.member_count());
    const double p_mut = config.p_mutation > 0.0 ? config.p_mutation : 1.0 / static_cast<double>(m);
    const Eigen::VectorXd center =
        config.init_center ? *config.init_center : initial_force_densities(g, E);
    if (center.size() != m) throw ConfigError("initial center has the wrong length");
    for (const auto& s : config.seed_individuals) {
        if (s.size() != m) throw ConfigError("seed individual has the wrong length");
    }

    std::mt19937_64 rng(config.rng_seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const auto n = static_cast<std::size_t>(config.population_size);
    const auto refs = reference_points(config.population_size - 1);

    std::vector<Individual> pop;
    pop.reserve(2 * n + config.seed_individuals.size());
    for (std::size_t k = 0; k < n; ++k) {
        Individual ind;
        ind.genome.resize(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            ind.genome[i] = center[i] + config.init_halfwidth * unit(rng);
        }
        ind.genome = ind.genome.cwiseMax(config.q_lower).cwiseMin(config.q_upper);
        pop.push_back(std::move(ind));
    }
    for (const auto& s : config.seed_individuals) {
        pop.push_back(Individual{s, std::nullopt, 0, -1});
    }
    evaluate_all(pop, 0, g, sigma_bar, E, config.single_thread);
    {
        const auto ranks = nondominated_sort(objectives_of(pop));
        for (std::size_t i = 0; i < pop.size(); ++i) pop[i].rank = ranks[i];
    }
    if (config.on_generation) config.on_generation(0, pop);

    for (int gen = 1; gen <= config.generations; ++gen) {
        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);

        const std::size_t parents_end = pop.size();
        for (std::size_t k = 0; k < n; k += 2) {
            Individual a{pop[order[k % order.size()]].genome, std::nullopt, 0, -1};
            Individual b{pop[order[(k + 1) % order.size()]].genome, std::nullopt, 0, -1};
            if (uniform01(rng) <= config.p_crossover) {
                sbx_crossover(a.genome, b.genome, config.eta_crossover, config.q_lower,
                              config.q_upper, rng);
            }
            polynomial_mutation(a.genome, config.eta_mutation, p_mut, config.q_lower,
                                config.q_upper, rng);
            pop.push_back(std::move(a));
            if (k + 1 < n) {
                polynomial_mutation(b.genome, config.eta_mutation, p_mut, config.q_lower,
                                    config.q_upper, rng);
                pop.push_back(std::move(b));
            }
        }
        evaluate_all(pop, parents_end, g, sigma_bar, E, config.single_thread);
        pop = select_survivors(std::move(pop), n, refs, rng, config.niche_space);
        if (config.on_generation) config.on_generation(gen, pop);
    }

    FrontArchive out;
    const auto ranks = nondominated_sort(objectives_of(pop));
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pop[i].rank = ranks[i];
        if (ranks[i] == 0 && pop[i].objectives) {
            out.points.push_back(ParetoPoint{*pop[i].objectives, pop[i].genome, {}, {}, {}});
        }
    }
    out.population = std::move(pop);
    return out;
}

} // namespace fdtruss

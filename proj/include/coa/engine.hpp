#pragma once

/// @file engine.hpp
/// The cuckoo optimization engine.
///
/// One generation runs, in order:
///   assign_eggs -> compute_elr (per cuckoo) -> lay_eggs -> cull_eggs
///   -> mature_and_cap -> select_goal_point -> migrate -> record -> check_convergence
///
/// The engine minimizes cost and ranks habitats by profit = -cost.
///
/// Random draws come from one generator seeded by CoaParams::seed, consumed in
/// this fixed order:
///   init:     per cuckoo, per coordinate, one uniform real
///   per generation:
///     assign_eggs: one integer per cuckoo
///     lay_eggs:    per cuckoo, per egg, per coordinate, one uniform real
///     goal point:  one integer for the first k-means centroid
///     migrate:     per cuckoo, per coordinate, one uniform real

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clustering.hpp"
#include "errors.hpp"
#include "objective.hpp"
#include "rng.hpp"

namespace coa {

/// Run parameters. Defaults are the reference Rastrigin settings.
struct CoaParams {
    std::size_t initial_population = 5;
    int min_eggs = 2;
    int max_eggs = 4;
    std::size_t max_cuckoos = 10;
    double radius_coeff = 5.0;
    double motion_coeff = 9.0;
    std::size_t num_clusters = 2;
    double discovery_ratio = 0.10;
    double variance_cutoff = 1e-13;
    std::size_t max_iterations = 100;
    Bounds bounds{-30.0, 30.0};
    std::uint64_t seed = 0;

    void validate() const {
        if (initial_population == 0) throw ConfigError("initial_population must be >= 1");
        if (min_eggs < 1) throw ConfigError("min_eggs must be >= 1");
        if (max_eggs < min_eggs) throw ConfigError("max_eggs must be >= min_eggs");
        if (max_cuckoos == 0) throw ConfigError("max_cuckoos must be >= 1");
        if (!(radius_coeff > 0.0) || !std::isfinite(radius_coeff))
            throw ConfigError("radius_coeff must be positive");
        if (!(motion_coeff > 0.0) || !std::isfinite(motion_coeff))
            throw ConfigError("motion_coeff must be positive");
        if (num_clusters == 0) throw ConfigError("num_clusters must be >= 1");
        if (!(discovery_ratio >= 0.0 && discovery_ratio < 1.0))
            throw ConfigError("discovery_ratio must lie in [0, 1)");
        if (!(variance_cutoff > 0.0)) throw ConfigError("variance_cutoff must be positive");
        if (max_iterations == 0) throw ConfigError("max_iterations must be >= 1");
        bounds.validate();
    }
};

struct Habitat {
    std::vector<double> position;
    double cost = std::numeric_limits<double>::infinity();

    [[nodiscard]] double profit() const noexcept { return -cost; }
};

struct Cuckoo {
    Habitat habitat;
    int num_eggs = 0;
    double elr = 0.0;
};

struct Population {
    std::vector<Cuckoo> cuckoos;
    std::size_t generation = 0;

    [[nodiscard]] std::size_t size() const noexcept { return cuckoos.size(); }
    [[nodiscard]] bool empty() const noexcept { return cuckoos.empty(); }
};

enum class RunStatus { converged, budget_exhausted };

inline const char* to_string(RunStatus s) noexcept {
    return s == RunStatus::converged ? "converged" : "budget";
}

struct TraceRecord {
    std::size_t iteration = 0;
    double best_cost_so_far = 0.0;
    double current_best_cost = 0.0;
    double mean_cost = 0.0;
    double position_variance = 0.0;
    std::size_t population_size = 0;

    bool operator==(const TraceRecord&) const = default;
};

struct Trace {
    std::vector<TraceRecord> records;
    RunStatus status = RunStatus::budget_exhausted;
    Habitat best;
    std::uint64_t seed = 0;
    std::size_t evaluations = 0;

    [[nodiscard]] double final_best_cost() const {
        if (records.empty()) throw InvalidInput("trace has no records");
        return records.back().best_cost_so_far;
    }
};

namespace detail {

inline Habitat evaluate(const ObjectiveSpec& spec, std::vector<double> position) {
    Habitat h{std::move(position), 0.0};
    h.cost = spec.cost(h.position);
    if (!std::isfinite(h.cost)) throw InvariantViolation("objective returned a non-finite cost");
    return h;
}

inline bool lower_cost(const Habitat& a, const Habitat& b) noexcept { return a.cost < b.cost; }

} // namespace detail

inline Population init_population(const ObjectiveSpec& spec, const CoaParams& params, Rng& rng) {
    params.validate();
    if (spec.dimension == 0) throw ConfigError("objective dimension must be positive");
    Population pop;
    pop.cuckoos.reserve(params.initial_population);
    for (std::size_t i = 0; i < params.initial_population; ++i) {
        std::vector<double> x(spec.dimension);
        for (double& v : x) v = uniform_real(rng, params.bounds.lower, params.bounds.upper);
        pop.cuckoos.push_back(Cuckoo{detail::evaluate(spec, std::move(x)), 0, 0.0});
    }
    return pop;
}

inline Population assign_eggs(Population pop, const CoaParams& params, Rng& rng) {
    if (pop.empty()) throw InvalidInput("assign_eggs: empty population");
    for (auto& c : pop.cuckoos)
        c.num_eggs = static_cast<int>(uniform_int(rng, params.min_eggs, params.max_eggs));
    return pop;
}

inline std::int64_t total_eggs(const Population& pop) noexcept {
    std::int64_t total = 0;
    for (const auto& c : pop.cuckoos) total += c.num_eggs;
    return total;
}

/// Egg laying radius: radius_coeff * (num_eggs / total_eggs) * (upper - lower).
inline double compute_elr(std::int64_t num_eggs, std::int64_t total_eggs, const CoaParams& params) {
    if (total_eggs <= 0) throw InvalidInput("compute_elr: total egg count must be positive");
    if (num_eggs < 0 || num_eggs > total_eggs)
        throw InvalidInput("compute_elr: egg count outside [0, total]");
    return params.radius_coeff *
           (static_cast<double>(num_eggs) / static_cast<double>(total_eggs)) *
           params.bounds.width();
}

/// Eggs land at parent + offset, each offset coordinate uniform in
/// [-elr, +elr], then clamped into the objective's bounds.
inline std::vector<Habitat> lay_eggs(const Cuckoo& cuckoo, const ObjectiveSpec& spec, Rng& rng) {
    if (cuckoo.elr < 0.0) throw InvalidInput("lay_eggs: negative egg laying radius");
    std::vector<Habitat> eggs;
    eggs.reserve(static_cast<std::size_t>(std::max(cuckoo.num_eggs, 0)));
    for (int e = 0; e < cuckoo.num_eggs; ++e) {
        std::vector<double> x = cuckoo.habitat.position;
        for (double& v : x) v = spec.bounds.clamp(v + uniform_real(rng, -cuckoo.elr, cuckoo.elr));
        eggs.push_back(detail::evaluate(spec, std::move(x)));
    }
    return eggs;
}

/// Number of eggs the hosts discover among `count`: ceil(ratio * count).
/// A product within 1e-9 (relative) of an integer counts as that integer, so
/// binary rounding of e.g. 0.1 * 30 never removes an extra egg.
inline std::size_t discovered_count(std::size_t count, double ratio) noexcept {
    const double raw = ratio * static_cast<double>(count);
    const double nearest = std::round(raw);
    const double removed =
        std::abs(raw - nearest) <= 1e-9 * std::max(1.0, raw) ? nearest : std::ceil(raw);
    return std::min(count, static_cast<std::size_t>(removed));
}

/// Sorts eggs by ascending cost (stable) and drops the discovered, costliest ones.
inline std::vector<Habitat> cull_eggs(std::vector<Habitat> eggs, const CoaParams& params) {
    std::stable_sort(eggs.begin(), eggs.end(), detail::lower_cost);
    eggs.resize(eggs.size() - discovered_count(eggs.size(), params.discovery_ratio));
    return eggs;
}

/// Surviving eggs join the population as cuckoos without eggs. The merged set
/// is stably sorted by cost and, above max_cuckoos, truncated to the best,
/// which always keeps the global best.
inline Population mature_and_cap(Population pop, std::vector<Habitat> eggs, const CoaParams& params) {
    pop.cuckoos.reserve(pop.size() + eggs.size());
    for (auto& e : eggs) pop.cuckoos.push_back(Cuckoo{std::move(e), 0, 0.0});
    if (pop.empty()) throw InvariantViolation("mature_and_cap: no cuckoos and no eggs");
    std::stable_sort(pop.cuckoos.begin(), pop.cuckoos.end(),
                     [](const Cuckoo& a, const Cuckoo& b) { return a.habitat.cost < b.habitat.cost; });
    if (pop.size() > params.max_cuckoos) pop.cuckoos.resize(params.max_cuckoos);
    return pop;
}

/// Detailed outcome of goal selection; select_goal_point returns only the habitat.
struct GoalChoice {
    Habitat goal;
    std::size_t cluster = 0;
    ClusterResult clusters;
};

inline GoalChoice choose_goal(const Population& pop, const CoaParams& params, Rng& rng) {
    if (pop.empty()) throw InvalidInput("select_goal_point: empty population");
    std::vector<Point> positions;
    std::vector<double> profits;
    positions.reserve(pop.size());
    profits.reserve(pop.size());
    for (const auto& c : pop.cuckoos) {
        positions.push_back(c.habitat.position);
        profits.push_back(c.habitat.profit());
    }
    const std::size_t k = std::min(params.num_clusters, pop.size());
    GoalChoice choice;
    choice.clusters = kmeans(positions, k, rng);
    choice.clusters.cluster_mean_profit = score_clusters(choice.clusters, profits);

    const auto& means = choice.clusters.cluster_mean_profit;
    choice.cluster = static_cast<std::size_t>(
        std::max_element(means.begin(), means.end()) - means.begin());

    const Cuckoo* best = nullptr;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (choice.clusters.assignments[i] != choice.cluster) continue;
        if (best == nullptr || pop.cuckoos[i].habitat.cost < best->habitat.cost)
            best = &pop.cuckoos[i];
    }
    if (best == nullptr) throw InvariantViolation("select_goal_point: chosen cluster is empty");
    choice.goal = best->habitat;
    return choice;
}

/// Goal point: the lowest-cost member of the cluster with the greatest mean profit.
inline Habitat select_goal_point(const Population& pop, const ObjectiveSpec& /*spec*/,
                                 const CoaParams& params, Rng& rng) {
    return choose_goal(pop, params, rng).goal;
}

/// Moves every cuckoo by x += F * (goal - x), drawing F from `factor` once per
/// coordinate, clamps into bounds, and re-evaluates.
template <class FactorSource>
Population migrate_with(Population pop, const Habitat& goal, const ObjectiveSpec& spec,
                        FactorSource&& factor) {
    if (goal.position.size() != spec.dimension) throw InvalidInput("migrate: goal dimension mismatch");
    for (auto& c : pop.cuckoos) {
        std::vector<double> x = std::move(c.habitat.position);
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double f = factor();
            x[d] = spec.bounds.clamp(x[d] + f * (goal.position[d] - x[d]));
        }
        c.habitat = detail::evaluate(spec, std::move(x));
    }
    ++pop.generation;
    return pop;
}

/// Migration with F uniform in [0, motion_coeff] per coordinate.
inline Population migrate(Population pop, const Habitat& goal, const ObjectiveSpec& spec,
                          const CoaParams& params, Rng& rng) {
    return migrate_with(std::move(pop), goal, spec,
                        [&] { return uniform_real(rng, 0.0, params.motion_coeff); });
}

/// Sum over coordinates of the sample variance (n - 1) across cuckoos; 0 for one cuckoo.
inline double position_variance(const Population& pop) {
    const std::size_t n = pop.size();
    if (n < 2) return 0.0;
    const std::size_t dim = pop.cuckoos.front().habitat.position.size();
    double total = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        double mean = 0.0;
        for (const auto& c : pop.cuckoos) mean += c.habitat.position[d];
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (const auto& c : pop.cuckoos) {
            const double t = c.habitat.position[d] - mean;
            ss += t * t;
        }
        total += ss / static_cast<double>(n - 1);
    }
    return total;
}

inline bool check_convergence(const Population& pop, const CoaParams& params) {
    if (pop.empty()) throw InvalidInput("check_convergence: empty population");
    return position_variance(pop) < params.variance_cutoff;
}

enum class Phase { initialized, eggs_laid, eggs_culled, matured, migrated };

/// State handed to a RunObserver after each phase of a generation.
struct PhaseView {
    Phase phase;
    std::size_t iteration;
    const Population& population;
    std::span<const Habitat> eggs;
    std::int64_t total_eggs;
};

using RunObserver = std::function<void(const PhaseView&)>;

/// Runs the optimizer to convergence or budget exhaustion.
///
/// The search box is params.bounds; the objective's own bounds are replaced
/// by it for the duration of the run.
inline Trace run(const ObjectiveSpec& objective, const CoaParams& params,
                 const RunObserver& observer = {}) {
    params.validate();
    if (!objective.evaluator) throw ConfigError("objective has no evaluator");
    ObjectiveSpec spec = objective;
    spec.bounds = params.bounds;

    Rng rng = make_rng(params.seed);
    Trace trace;
    trace.seed = params.seed;

    auto notify = [&](Phase phase, std::size_t it, const Population& pop,
                      std::span<const Habitat> eggs, std::int64_t total) {
        if (observer) observer(PhaseView{phase, it, pop, eggs, total});
    };
    auto consider = [&](const Habitat& h) {
        if (h.cost < trace.best.cost) trace.best = h;
    };

    Population pop = init_population(spec, params, rng);
    trace.evaluations += pop.size();
    for (const auto& c : pop.cuckoos) consider(c.habitat);
    notify(Phase::initialized, 0, pop, {}, 0);

    for (std::size_t it = 1; it <= params.max_iterations; ++it) {
        pop = assign_eggs(std::move(pop), params, rng);
        const std::int64_t total = total_eggs(pop);
        for (auto& c : pop.cuckoos) c.elr = compute_elr(c.num_eggs, total, params);

        std::vector<Habitat> eggs;
        eggs.reserve(static_cast<std::size_t>(total));
        for (const auto& c : pop.cuckoos) {
            auto laid = lay_eggs(c, spec, rng);
            for (auto& e : laid) eggs.push_back(std::move(e));
        }
        trace.evaluations += eggs.size();
        for (const auto& e : eggs) consider(e);
        notify(Phase::eggs_laid, it, pop, eggs, total);

        eggs = cull_eggs(std::move(eggs), params);
        notify(Phase::eggs_culled, it, pop, eggs, total);

        pop = mature_and_cap(std::move(pop), std::move(eggs), params);
        notify(Phase::matured, it, pop, {}, total);

        const Habitat goal = select_goal_point(pop, spec, params, rng);
        pop = migrate(std::move(pop), goal, spec, params, rng);
        trace.evaluations += pop.size();
        for (const auto& c : pop.cuckoos) consider(c.habitat);
        notify(Phase::migrated, it, pop, {}, total);

        TraceRecord rec;
        rec.iteration = it;
        rec.best_cost_so_far = trace.best.cost;
        rec.current_best_cost = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (const auto& c : pop.cuckoos) {
            rec.current_best_cost = std::min(rec.current_best_cost, c.habitat.cost);
            sum += c.habitat.cost;
        }
        rec.mean_cost = sum / static_cast<double>(pop.size());
        rec.position_variance = position_variance(pop);
        rec.population_size = pop.size();
        trace.records.push_back(rec);

        if (check_convergence(pop, params)) {
            trace.status = RunStatus::converged;
            break;
        }
    }
    return trace;
}

} // namespace coa

#pragma once

/// @file harness.hpp
/// Experiment runner: seeded replicates, checkpoint tables, iterations to
/// target, and dimension sweeps with replicate statistics.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "engine.hpp"
#include "errors.hpp"
#include "objective.hpp"

namespace coa {

inline const std::vector<std::size_t> kDefaultCheckpoints{20, 40, 60, 80, 100};

struct ExperimentConfig {
    std::string objective = "rastrigin";
    std::vector<std::size_t> dimensions{2};
    std::size_t replicates = 1;
    /// Explicit per-replicate seeds; when empty, base_seed + i is used.
    std::vector<std::uint64_t> seeds;
    std::uint64_t base_seed = 1;
    CoaParams params;
    std::vector<std::size_t> checkpoints = kDefaultCheckpoints;
    double target_tolerance = 1e-6;
    /// Worker threads for replicates; output is identical for any value.
    std::size_t jobs = 1;

    void validate() const {
        params.validate();
        if (dimensions.empty()) throw ConfigError("no dimensions given");
        for (auto d : dimensions)
            if (d == 0) throw ConfigError("dimensions must be positive");
        if (replicates == 0) throw ConfigError("replicates must be >= 1");
        if (!seeds.empty() && seeds.size() != replicates)
            throw ConfigError("seed list length must equal replicates");
        if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
            throw ConfigError("checkpoints must be sorted ascending");
        for (auto c : checkpoints)
            if (c == 0 || c > params.max_iterations)
                throw ConfigError("checkpoint " + std::to_string(c) + " outside [1, max_iterations]");
        if (!(target_tolerance > 0.0)) throw ConfigError("target tolerance must be positive");
        if (jobs == 0) throw ConfigError("jobs must be >= 1");
    }

    [[nodiscard]] std::vector<std::uint64_t> replicate_seeds() const {
        if (!seeds.empty()) return seeds;
        std::vector<std::uint64_t> out(replicates);
        for (std::size_t i = 0; i < replicates; ++i) out[i] = base_seed + i;
        return out;
    }
};

struct ReplicateStats {
    std::size_t dimension = 0;
    double mean_final_best_cost = 0.0;
    double variance_final_best_cost = 0.0;
    std::vector<double> final_best_costs;
};

/// Mean and sample (n - 1) variance via Welford's update; one value gives variance 0.
inline ReplicateStats summarize_replicates(std::size_t dimension, std::vector<double> finals) {
    if (finals.empty()) throw InvalidInput("summarize_replicates: no values");
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    for (double v : finals) {
        ++n;
        const double delta = v - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (v - mean);
    }
    ReplicateStats s;
    s.dimension = dimension;
    s.mean_final_best_cost = mean;
    s.variance_final_best_cost = n > 1 ? std::max(0.0, m2 / static_cast<double>(n - 1)) : 0.0;
    s.final_best_costs = std::move(finals);
    return s;
}

struct ReplicateRun {
    std::uint64_t seed = 0;
    std::optional<Trace> trace; // empty when the run failed
    std::string error;
};

struct ReplicateResult {
    ReplicateStats stats;
    std::vector<ReplicateRun> runs; // in seed order

    [[nodiscard]] std::vector<Trace> traces() const {
        std::vector<Trace> out;
        for (const auto& r : runs)
            if (r.trace) out.push_back(*r.trace);
        return out;
    }
    [[nodiscard]] std::size_t failures() const {
        return static_cast<std::size_t>(
            std::count_if(runs.begin(), runs.end(), [](const auto& r) { return !r.trace; }));
    }
};

namespace detail {

// Runs task(i) for i in [0, n) on up to `jobs` threads. Each task writes only
// its own slot, so results do not depend on scheduling.
template <class Task>
void for_each_index(std::size_t n, std::size_t jobs, Task&& task) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) task(i);
        });
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

/// Median of the values, or std::nullopt for an empty input.
inline std::optional<double> median(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    return detail::median_of(std::move(values));
}

/// Runs `replicates` seeded engine runs at one dimension. A run that throws is
/// kept as a failure marker with its message; statistics cover the rest.
/// Throws std::runtime_error when every replicate fails.
inline ReplicateResult run_replicates(const ExperimentConfig& config, std::size_t dimension) {
    config.validate();
    const auto spec = make_objective(config.objective, dimension, config.params.bounds);
    const auto seeds = config.replicate_seeds();

    ReplicateResult result;
    result.runs.resize(seeds.size());
    detail::for_each_index(seeds.size(), config.jobs, [&](std::size_t i) {
        auto& slot = result.runs[i];
        slot.seed = seeds[i];
        CoaParams params = config.params;
        params.seed = seeds[i];
        try {
            slot.trace = run(spec, params);
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    });

    std::vector<double> finals;
    for (const auto& r : result.runs)
        if (r.trace) finals.push_back(r.trace->final_best_cost());
    if (finals.empty())
        throw std::runtime_error("all replicates failed at dimension " + std::to_string(dimension) +
                                 ": " + result.runs.front().error);
    result.stats = summarize_replicates(dimension, std::move(finals));
    return result;
}

/// Best-so-far cost of a trace at a 1-based iteration. A trace stopped early by
/// convergence carries its final value forward; a budget-limited trace shorter
/// than `iteration` is an error.
inline double best_at(const Trace& trace, std::size_t iteration) {
    if (trace.records.empty()) throw InvalidInput("trace has no records");
    if (iteration == 0) throw InvalidInput("checkpoints are 1-based");
    if (iteration <= trace.records.size()) return trace.records[iteration - 1].best_cost_so_far;
    if (trace.status != RunStatus::converged)
        throw InvalidInput("checkpoint " + std::to_string(iteration) + " beyond trace length");
    return trace.records.back().best_cost_so_far;
}

struct CheckpointValue {
    std::size_t iteration = 0;
    double median_best_cost = 0.0;
};

/// Median across traces of the best-so-far cost at each checkpoint.
inline std::vector<CheckpointValue> checkpoint_table(const std::vector<Trace>& traces,
                                                     const std::vector<std::size_t>& checkpoints) {
    if (traces.empty()) throw InvalidInput("checkpoint_table: no traces");
    std::vector<CheckpointValue> out;
    out.reserve(checkpoints.size());
    for (auto cp : checkpoints) {
        std::vector<double> values;
        values.reserve(traces.size());
        for (const auto& t : traces) values.push_back(best_at(t, cp));
        out.push_back({cp, detail::median_of(std::move(values))});
    }
    return out;
}

/// First 1-based iteration whose best-so-far cost is <= tolerance.
inline std::optional<std::size_t> iterations_to_target(const Trace& trace, double tolerance) {
    if (!(tolerance > 0.0)) throw InvalidInput("iterations_to_target: tolerance must be positive");
    for (const auto& r : trace.records)
        if (r.best_cost_so_far <= tolerance) return r.iteration;
    return std::nullopt;
}

/// Median of iteration counts where "not reached" sorts above every count; the
/// median is absent when it lands on (or averages with) a not-reached entry.
inline std::optional<double> median_iterations(const std::vector<std::optional<std::size_t>>& its) {
    if (its.empty()) return std::nullopt;
    std::vector<double> v;
    v.reserve(its.size());
    for (const auto& i : its)
        v.push_back(i ? static_cast<double>(*i) : std::numeric_limits<double>::infinity());
    const double m = detail::median_of(std::move(v));
    if (!std::isfinite(m)) return std::nullopt;
    return m;
}

struct SweepRow {
    std::size_t dimension = 0;
    std::optional<double> median_iterations_to_target;
    std::size_t not_reached = 0;
    std::size_t failures = 0;
    ReplicateStats stats;
    std::vector<CheckpointValue> checkpoints;
    std::vector<std::string> errors;
};

/// One row per configured dimension, in configuration order.
inline std::vector<SweepRow> dimension_sweep(const ExperimentConfig& config) {
    config.validate();
    std::vector<SweepRow> rows;
    rows.reserve(config.dimensions.size());
    for (auto dim : config.dimensions) {
        const auto rep = run_replicates(config, dim);
        const auto traces = rep.traces();
        SweepRow row;
        row.dimension = dim;
        row.stats = rep.stats;
        row.failures = rep.failures();
        for (const auto& r : rep.runs)
            if (!r.trace) row.errors.push_back("seed " + std::to_string(r.seed) + ": " + r.error);
        std::vector<std::optional<std::size_t>> its;
        for (const auto& t : traces) {
            its.push_back(iterations_to_target(t, config.target_tolerance));
            if (!its.back()) ++row.not_reached;
        }
        row.median_iterations_to_target = median_iterations(its);
        row.checkpoints = checkpoint_table(traces, config.checkpoints);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace coa

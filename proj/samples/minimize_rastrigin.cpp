// Minimizes the 2-D Rastrigin function with the default parameters and
// prints the best-so-far cost at every tenth generation.

#include <cstdio>

#include <coa/engine.hpp>
#include <coa/objective.hpp>

int main() {
    coa::CoaParams params;
    params.seed = 42;
    const auto objective = coa::make_objective("rastrigin", 2, params.bounds);
    const coa::Trace trace = coa::run(objective, params);

    for (const auto& r : trace.records)
        if (r.iteration % 10 == 0)
            std::printf("iter %3zu  best %.6g  population %zu\n", r.iteration, r.best_cost_so_far,
                        r.population_size);
    std::printf("best cost %.6g at (%.6g, %.6g), %s after %zu generations\n", trace.best.cost,
                trace.best.position[0], trace.best.position[1], coa::to_string(trace.status),
                trace.records.size());
}

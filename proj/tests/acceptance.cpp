// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <coa/cli.hpp>
#include <coa/clustering.hpp>
#include <coa/engine.hpp>
#include <coa/harness.hpp>

#include "cli_support.hpp"
#include "oracles.hpp"

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        if (!detail.empty()) detail += "; ";
        detail += what;
        pass = false;
    }
};

std::string num(double v) { return coa::csv::format_double(v); }

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<coa::Trace> rastrigin_traces(std::size_t dim, std::size_t replicates, std::size_t iterations) {
    coa::ExperimentConfig cfg;
    cfg.objective = "rastrigin";
    cfg.dimensions = {dim};
    cfg.replicates = replicates;
    cfg.base_seed = 1;
    cfg.params.max_iterations = iterations;
    cfg.checkpoints = {};
    cfg.jobs = jobs();
    return coa::run_replicates(cfg, dim).traces();
}

Outcome ac1() {
    Outcome o;
    const auto row = coa::checkpoint_table(rastrigin_traces(2, 25, 100), {40, 100});
    o.detail = "median@40=" + num(row[0].median_best_cost) + " (<=1e-6), median@100=" +
               num(row[1].median_best_cost) + " (<=1e-8)";
    o.pass = row[0].median_best_cost <= 1e-6 && row[1].median_best_cost <= 1e-8;
    return o;
}

Outcome ac2() {
    Outcome o;
    const auto row = coa::checkpoint_table(rastrigin_traces(3, 25, 100), {40});
    o.detail = "median@40=" + num(row[0].median_best_cost) + " (<=1e-6)";
    o.pass = row[0].median_best_cost <= 1e-6;
    return o;
}

coa::ExperimentConfig sweep_config(std::size_t iterations) {
    coa::ExperimentConfig cfg;
    cfg.objective = "rastrigin";
    cfg.dimensions = {2, 3, 5, 10};
    cfg.replicates = 20;
    cfg.base_seed = 1;
    cfg.params.max_iterations = iterations;
    cfg.checkpoints = {};
    cfg.target_tolerance = 1e-6;
    cfg.jobs = jobs();
    return cfg;
}

Outcome ac3() {
    Outcome o;
    const auto rows = coa::dimension_sweep(sweep_config(100));
    std::vector<double> medians;
    std::string listing;
    for (const auto& r : rows) {
        listing += (listing.empty() ? "" : ", ") + std::string("d=") + std::to_string(r.dimension) + ":" +
                   (r.median_iterations_to_target ? num(*r.median_iterations_to_target) : "NA");
        if (!r.median_iterations_to_target || *r.median_iterations_to_target > 100.0) {
            o.pass = false;
            continue;
        }
        medians.push_back(*r.median_iterations_to_target);
    }
    int inversions = 0;
    for (std::size_t i = 1; i < medians.size(); ++i) inversions += medians[i] < medians[i - 1];
    if (inversions > 1) o.pass = false;
    o.detail = "median iterations to 1e-6: " + listing + " (finite, <=100, at most one inversion)";
    return o;
}

Outcome ac4() {
    Outcome o;
    const std::size_t dim = 1000, seeds = 20;
    const auto spec = coa::make_objective("rastrigin", dim);
    std::vector<int> improved(seeds, 0);
    std::vector<std::string> problems(seeds);
    coa::detail::for_each_index(seeds, jobs(), [&](std::size_t i) {
        coa::CoaParams p;
        p.max_iterations = 200;
        p.seed = i + 1;
        std::string& bad = problems[i];
        const auto check_box = [&](const std::vector<double>& x) {
            for (double v : x)
                if (!(v >= p.bounds.lower && v <= p.bounds.upper)) bad = "position out of bounds";
        };
        double initial_best = 0.0;
        const auto observer = [&](const coa::PhaseView& v) {
            for (const auto& c : v.population.cuckoos) {
                check_box(c.habitat.position);
                if (c.habitat.cost != spec.cost(c.habitat.position)) bad = "stale cost";
            }
            for (const auto& e : v.eggs) check_box(e.position);
            if (v.population.size() > p.max_cuckoos && v.phase != coa::Phase::initialized) bad = "cap exceeded";
            if (v.phase == coa::Phase::initialized) {
                initial_best = std::numeric_limits<double>::infinity();
                for (const auto& c : v.population.cuckoos) initial_best = std::min(initial_best, c.habitat.cost);
            }
        };
        const auto trace = coa::run(spec, p, observer);
        if (trace.records.empty() || trace.records.size() > 200) bad = "bad trace length";
        for (std::size_t r = 1; r < trace.records.size(); ++r)
            if (trace.records[r].best_cost_so_far > trace.records[r - 1].best_cost_so_far)
                bad = "best-so-far increased";
        improved[i] = trace.final_best_cost() < initial_best;
    });
    int count = 0;
    for (std::size_t i = 0; i < seeds; ++i) {
        count += improved[i];
        o.require(problems[i].empty(), "seed " + std::to_string(i + 1) + ": " + problems[i]);
    }
    if (count < 18) o.pass = false;
    o.detail = "d=1000, 200 iterations: improved in " + std::to_string(count) + "/20 runs (>=18)" +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome ac5() {
    Outcome o;
    const auto rows = coa::dimension_sweep(sweep_config(20));
    std::string listing;
    for (const auto& r : rows) {
        const auto& s = r.stats;
        listing += (listing.empty() ? "" : ", ") + std::string("d=") + std::to_string(r.dimension) +
                   " mean=" + num(s.mean_final_best_cost) + " var=" + num(s.variance_final_best_cost);
        if (!(s.mean_final_best_cost <= 1e-2) || !std::isfinite(s.variance_final_best_cost)) o.pass = false;
    }
    o.detail = listing + " (mean <=1e-2)";
    return o;
}

Outcome ac6() {
    Outcome o;
    // Bounds containment after every phase, and ELR arithmetic.
    for (std::size_t dim : {1, 2, 5}) {
        const auto spec = coa::make_objective("rastrigin", dim);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            coa::CoaParams p;
            p.seed = seed;
            p.max_iterations = 50;
            bool inside = true, elr_ok = true;
            const auto in_box = [&](const std::vector<double>& x) {
                return std::all_of(x.begin(), x.end(), [&](double v) { return p.bounds.contains(v); });
            };
            coa::run(spec, p, [&](const coa::PhaseView& v) {
                for (const auto& c : v.population.cuckoos) inside &= in_box(c.habitat.position);
                for (const auto& e : v.eggs) inside &= in_box(e.position);
                if (v.phase != coa::Phase::eggs_laid) return;
                for (const auto& c : v.population.cuckoos) {
                    const double want = p.radius_coeff * (double(c.num_eggs) / double(v.total_eggs)) *
                                        (p.bounds.upper - p.bounds.lower);
                    elr_ok &= std::abs(c.elr - want) <= 1e-12 * std::abs(want);
                }
            });
            o.require(inside, "bounds violated, dim " + std::to_string(dim) + " seed " + std::to_string(seed));
            o.require(elr_ok, "ELR mismatch, dim " + std::to_string(dim) + " seed " + std::to_string(seed));
        }
    }
    // Cull survivor counts.
    coa::CoaParams p;
    coa::Rng rng(3);
    for (std::size_t n = 0; n <= 100; ++n) {
        std::vector<coa::Habitat> eggs(n);
        for (auto& e : eggs) e.cost = coa::uniform01(rng);
        o.require(coa::cull_eggs(eggs, p).size() == n - coa::oracle::discovered(n, 10),
                  "cull count wrong at n=" + std::to_string(n));
    }
    // Elitism and bitwise determinism.
    const auto spec = coa::make_objective("rastrigin", 3);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        coa::CoaParams q;
        q.seed = seed;
        const auto a = coa::run(spec, q);
        for (std::size_t r = 1; r < a.records.size(); ++r)
            o.require(a.records[r].best_cost_so_far <= a.records[r - 1].best_cost_so_far,
                      "best-so-far increased, seed " + std::to_string(seed));
        if (seed <= 10) o.require(coa::run(spec, q).records == a.records, "nondeterministic seed " + std::to_string(seed));
    }
    // k-means against the brute-force partition.
    std::mt19937 gen(5);
    for (std::size_t n = 1; n <= 8; ++n)
        for (std::size_t k = 1; k <= std::min<std::size_t>(n, 3); ++k)
            for (int rep = 0; rep < 20; ++rep) {
                std::vector<std::size_t> truth;
                const auto pts = coa::oracle::separated_instance(gen, k, n, 2, truth);
                const auto best = coa::oracle::best_partition(pts, k);
                coa::Rng krng(rep + 1000 * n);
                o.require(coa::oracle::same_partition(coa::kmeans(pts, k, krng).assignments, best),
                          "kmeans missed optimum n=" + std::to_string(n) + " k=" + std::to_string(k));
            }
    // Goal point is a fixed point of migration.
    {
        coa::Population pop;
        const auto s2 = coa::make_objective("rastrigin", 2);
        const coa::Habitat goal = coa::detail::evaluate(s2, {1.5, -2.0});
        for (int i = 0; i < 4; ++i) pop.cuckoos.push_back(coa::Cuckoo{goal, 0, 0.0});
        coa::Rng mrng(9);
        const auto moved = coa::migrate(pop, goal, s2, coa::CoaParams{}, mrng);
        for (const auto& c : moved.cuckoos) o.require(c.habitat.position == goal.position, "goal moved");
    }
    // Integer-grid identity.
    const auto r3 = coa::make_objective("rastrigin", 3);
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b)
            for (int c = -3; c <= 3; ++c) {
                const std::vector<double> x{double(a), double(b), double(c)};
                o.require(std::abs(r3.cost(x) - double(a * a + b * b + c * c)) <= 1e-9, "grid identity");
            }
    if (o.pass) o.detail = "all property checks hold";
    return o;
}

Outcome ac7() {
    using coa::testing::invoke;
    using coa::testing::read_text;
    using coa::testing::TempDir;
    Outcome o;
    TempDir dir;
    const std::string out = dir.str();

    const std::vector<std::pair<std::vector<std::string>, int>> matrix{
        {{"run", "--dim", "1", "--iters", "3", "--seed", "1", "--out", out}, 0},
        {{"run", "--dim", "0"}, 2},
        {{"run", "--objective", "nope", "--seed", "1"}, 2},
        {{"fly"}, 2},
        {{"sweep", "--dims", "", "--seed", "1"}, 2},
        {{"report", "--in", (dir.path / "missing").string()}, 1},
    };
    for (const auto& [args, code] : matrix) {
        std::string joined;
        for (const auto& a : args) joined += a + " ";
        o.require(invoke(args).code == code, "exit code for '" + joined + "'");
    }

    std::ostringstream sink;
    const auto env = [](const std::string&) -> std::optional<std::string> { return "5"; };
    const auto cfg = dir.path / "c.json";
    std::ofstream(cfg) << R"({"pop": 8, "seed": 9, "discovery": 0.2})";
    const auto layered = coa::cli::resolve({"run", cfg, {{"pop", "6"}}}, env, sink);
    o.require(layered.params.initial_population == 6, "flag does not override config");
    o.require(layered.params.seed == 9 && layered.params.discovery_ratio == 0.2, "config does not override default");
    o.require(coa::cli::resolve({"run", std::nullopt, {}}, env, sink).params.seed == 5, "COA_SEED ignored");

    TempDir one, many;
    const std::vector<std::string> sweep{"sweep", "--dims", "2,3", "--replicates", "6", "--seed", "4", "--iters", "40"};
    auto a = sweep, b = sweep;
    a.insert(a.end(), {"--jobs", "1", "--out", one.str()});
    b.insert(b.end(), {"--jobs", "4", "--out", many.str()});
    o.require(invoke(a).code == 0 && invoke(b).code == 0, "sweep failed");
    for (const char* f : {"sweep.csv", "checkpoints.csv"})
        o.require(read_text(one.path / f) == read_text(many.path / f), std::string("--jobs changed ") + f);

    const auto report = invoke({"report", "--in", one.str()});
    o.require(report.code == 0, "report failed");
    for (const char* f : {"sweep.csv", "checkpoints.csv"})
        for (const auto& row : coa::csv::read_file(one.path / f).rows)
            for (const auto& field : row) {
                o.require(report.out.find(field) != std::string::npos, "report lost value " + field);
                if (field != "NA" && field.find_first_not_of("0123456789") != std::string::npos)
                    o.require(num(std::stod(field)) == field, "value does not round-trip: " + field);
            }
    if (o.pass) o.detail = "exit codes, precedence, CSV round-trip and --jobs equivalence hold";
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 2-D Rastrigin convergence", ac1},
        {"AC2 3-D Rastrigin convergence", ac2},
        {"AC3 low-dimension sweep", ac3},
        {"AC4 d=1000 property run", ac4},
        {"AC5 replicate statistics", ac5},
        {"AC6 property suite", ac6},
        {"AC7 CLI contract", ac7},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}

#pragma once

/// @file cli.hpp
/// Command-line front end: `run`, `sweep` and `report`.
///
/// Settings are layered: built-in defaults, then a flat JSON config file
/// (--config; keys are the long flag names without the leading dashes), then
/// flags. The seed additionally falls back to the COA_SEED environment
/// variable, and if that is unset a seed is generated and printed.
///
/// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "csv.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "objective.hpp"

namespace coa::cli {

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kUsageError = 2 };

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
}

inline const std::vector<std::string> kTraceHeader{
    "iteration",         "best_cost_so_far", "current_best_cost",
    "mean_cost",         "position_variance", "population_size"};
inline const std::vector<std::string> kSweepHeader{
    "dimension",  "median_iters_to_target", "mean_final_best", "variance_final_best",
    "replicates", "not_reached_count"};

struct Settings {
    std::string objective = "rastrigin";
    std::size_t dim = 2;
    std::vector<std::size_t> dims;
    std::optional<std::uint64_t> seed;
    CoaParams params;
    std::filesystem::path out = ".";
    std::filesystem::path in;
    std::size_t replicates = 1;
    double tolerance = 1e-6;
    std::optional<std::vector<std::size_t>> checkpoints;
    std::size_t jobs = 1;
    bool verbose = false;
};

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& raw) {
    const std::string text = trim(raw);
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end)
        throw ConfigError(key + ": expected a non-negative integer, got '" + raw + "'");
    return v;
}

inline std::size_t parse_positive(const std::string& key, const std::string& raw) {
    const auto v = parse_uint(key, raw);
    if (v == 0) throw ConfigError(key + ": must be positive");
    return static_cast<std::size_t>(v);
}

inline double parse_real(const std::string& key, const std::string& raw) {
    const std::string text = trim(raw);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end || !std::isfinite(v))
        throw ConfigError(key + ": expected a finite number, got '" + raw + "'");
    return v;
}

inline std::vector<std::size_t> parse_list(const std::string& key, const std::string& raw) {
    std::vector<std::size_t> out;
    std::string item;
    std::istringstream in(raw);
    while (std::getline(in, item, ',')) out.push_back(parse_positive(key, item));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string t = trim(raw);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

using Setter = std::function<void(Settings&, const std::string&)>;

// Every settable key. Flags are "--" + key; config-file keys are the key itself.
inline const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"objective", [](Settings& s, const std::string& v) { s.objective = trim(v); }},
        {"dim", [](Settings& s, const std::string& v) { s.dim = parse_positive("dim", v); }},
        {"dims", [](Settings& s, const std::string& v) { s.dims = parse_list("dims", v); }},
        {"iters",
         [](Settings& s, const std::string& v) { s.params.max_iterations = parse_positive("iters", v); }},
        {"seed", [](Settings& s, const std::string& v) { s.seed = parse_uint("seed", v); }},
        {"pop",
         [](Settings& s, const std::string& v) { s.params.initial_population = parse_positive("pop", v); }},
        {"min-eggs",
         [](Settings& s, const std::string& v) {
             s.params.min_eggs = static_cast<int>(parse_positive("min-eggs", v));
         }},
        {"max-eggs",
         [](Settings& s, const std::string& v) {
             s.params.max_eggs = static_cast<int>(parse_positive("max-eggs", v));
         }},
        {"max-cuckoos",
         [](Settings& s, const std::string& v) { s.params.max_cuckoos = parse_positive("max-cuckoos", v); }},
        {"radius-coeff",
         [](Settings& s, const std::string& v) { s.params.radius_coeff = parse_real("radius-coeff", v); }},
        {"motion-coeff",
         [](Settings& s, const std::string& v) { s.params.motion_coeff = parse_real("motion-coeff", v); }},
        {"clusters",
         [](Settings& s, const std::string& v) { s.params.num_clusters = parse_positive("clusters", v); }},
        {"discovery",
         [](Settings& s, const std::string& v) { s.params.discovery_ratio = parse_real("discovery", v); }},
        {"var-cutoff",
         [](Settings& s, const std::string& v) { s.params.variance_cutoff = parse_real("var-cutoff", v); }},
        {"lower", [](Settings& s, const std::string& v) { s.params.bounds.lower = parse_real("lower", v); }},
        {"upper", [](Settings& s, const std::string& v) { s.params.bounds.upper = parse_real("upper", v); }},
        {"out", [](Settings& s, const std::string& v) { s.out = trim(v); }},
        {"in", [](Settings& s, const std::string& v) { s.in = trim(v); }},
        {"replicates",
         [](Settings& s, const std::string& v) { s.replicates = parse_positive("replicates", v); }},
        {"tolerance", [](Settings& s, const std::string& v) { s.tolerance = parse_real("tolerance", v); }},
        {"checkpoints",
         [](Settings& s, const std::string& v) { s.checkpoints = parse_list("checkpoints", v); }},
        {"jobs", [](Settings& s, const std::string& v) { s.jobs = parse_positive("jobs", v); }},
        {"verbose", [](Settings& s, const std::string& v) { s.verbose = parse_bool("verbose", v); }},
    };
    return table;
}

inline void apply(Settings& s, const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown setting '" + key + "'");
    it->second(s, value);
}

// Flattens a JSON scalar or array of scalars to the flag text form.
inline std::string json_to_text(const std::string& key, const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    if (v.is_array()) {
        std::string s;
        for (const auto& e : v) {
            if (!(e.is_number() || e.is_string())) break;
            if (!s.empty()) s += ',';
            s += e.is_string() ? e.get<std::string>() : e.dump();
        }
        if (!v.empty() && !s.empty()) return s;
    }
    throw ConfigError("config key '" + key + "': unsupported value " + v.dump());
}

inline std::map<std::string, std::string> read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
    std::map<std::string, std::string> values;
    for (const auto& [key, value] : doc.items()) {
        if (key == "config") throw ConfigError("config files cannot nest");
        values[key] = json_to_text(key, value);
    }
    return values;
}

inline std::vector<std::size_t> resolve_checkpoints(const Settings& s) {
    if (s.checkpoints) return *s.checkpoints;
    std::vector<std::size_t> cps;
    for (auto c : kDefaultCheckpoints)
        if (c <= s.params.max_iterations) cps.push_back(c);
    return cps;
}

inline csv::Table trace_table(const Trace& trace) {
    csv::Table t{kTraceHeader, {}};
    for (const auto& r : trace.records)
        t.rows.push_back({std::to_string(r.iteration), csv::format_double(r.best_cost_so_far),
                          csv::format_double(r.current_best_cost), csv::format_double(r.mean_cost),
                          csv::format_double(r.position_variance), std::to_string(r.population_size)});
    return t;
}

inline void print_aligned(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (width.size() <= i) width.push_back(0);
            width[i] = std::max(width[i], r[i].size());
        }
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            line += r[i];
            if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
        }
        out << line << '\n';
    }
}

} // namespace detail

/// Parsed command line before layering: the subcommand plus raw flag text.
struct Invocation {
    std::string subcommand;
    std::optional<std::filesystem::path> config;
    std::map<std::string, std::string> flags;
};

/// Builds final settings: defaults < config file < flags < (seed only) COA_SEED < generated.
inline Settings resolve(const Invocation& inv, const EnvLookup& env, std::ostream& err) {
    Settings s;
    if (inv.config)
        for (const auto& [k, v] : detail::read_config(*inv.config)) detail::apply(s, k, v);
    for (const auto& [k, v] : inv.flags) detail::apply(s, k, v);
    if (!s.seed && inv.subcommand != "report") {
        if (auto v = env("COA_SEED")) {
            s.seed = detail::parse_uint("COA_SEED", *v);
        } else {
            s.seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) | std::random_device{}();
            err << "coa: no seed given, generated seed=" << *s.seed << '\n';
        }
    }
    if (s.seed) s.params.seed = *s.seed;
    return s;
}

inline int cmd_run(const Settings& s, std::ostream& out, std::ostream& err) {
    s.params.validate();
    const auto spec = make_objective(s.objective, s.dim, s.params.bounds);
    RunObserver observer;
    if (s.verbose)
        observer = [&err](const PhaseView& v) {
            if (v.phase != Phase::migrated) return;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : v.population.cuckoos) best = std::min(best, c.habitat.cost);
            err << "iter " << v.iteration << " population_best=" << csv::format_double(best)
                << " size=" << v.population.size() << '\n';
        };
    const Trace trace = run(spec, s.params, observer);
    std::filesystem::create_directories(s.out);
    csv::write_file(s.out / "trace.csv", detail::trace_table(trace));
    out << "best=" << csv::format_double(trace.best.cost) << " at=" << csv::format_position(trace.best.position)
        << " status=" << to_string(trace.status) << " iters=" << trace.records.size() << '\n';
    return kOk;
}

inline ExperimentConfig experiment_config(const Settings& s) {
    if (s.dims.empty()) throw ConfigError("sweep needs --dims");
    ExperimentConfig cfg;
    cfg.objective = s.objective;
    cfg.dimensions = s.dims;
    cfg.replicates = s.replicates;
    cfg.base_seed = s.params.seed;
    cfg.params = s.params;
    cfg.checkpoints = detail::resolve_checkpoints(s);
    cfg.target_tolerance = s.tolerance;
    cfg.jobs = s.jobs;
    cfg.validate();
    make_objective(cfg.objective, cfg.dimensions.front(), cfg.params.bounds);
    return cfg;
}

inline int cmd_sweep(const Settings& s, std::ostream& out, std::ostream& err) {
    const ExperimentConfig cfg = experiment_config(s);
    const auto rows = dimension_sweep(cfg);

    csv::Table sweep{kSweepHeader, {}};
    csv::Table checkpoints{{"dimension"}, {}};
    for (auto c : cfg.checkpoints) checkpoints.header.push_back("iter_" + std::to_string(c));
    bool failed = false;
    for (const auto& row : rows) {
        sweep.rows.push_back({std::to_string(row.dimension),
                              row.median_iterations_to_target
                                  ? csv::format_double(*row.median_iterations_to_target)
                                  : std::string("NA"),
                              csv::format_double(row.stats.mean_final_best_cost),
                              csv::format_double(row.stats.variance_final_best_cost),
                              std::to_string(row.stats.final_best_costs.size()),
                              std::to_string(row.not_reached)});
        std::vector<std::string> cp{std::to_string(row.dimension)};
        for (const auto& c : row.checkpoints) cp.push_back(csv::format_double(c.median_best_cost));
        checkpoints.rows.push_back(std::move(cp));
        for (const auto& e : row.errors) {
            err << "coa: replicate failed at dimension " << row.dimension << ", " << e << '\n';
            failed = true;
        }
        if (s.verbose)
            err << "dimension " << row.dimension << " done, mean_final_best="
                << csv::format_double(row.stats.mean_final_best_cost) << '\n';
    }
    std::filesystem::create_directories(s.out);
    csv::write_file(s.out / "sweep.csv", sweep);
    csv::write_file(s.out / "checkpoints.csv", checkpoints);
    out << "wrote " << (s.out / "sweep.csv").string() << " and " << (s.out / "checkpoints.csv").string()
        << " (" << rows.size() << " dimensions, " << cfg.replicates << " replicates)\n";
    return failed ? kRuntimeFailure : kOk;
}

/// Prints stored sweep results as plain-text tables. Never writes.
inline int cmd_report(const Settings& s, std::ostream& out) {
    if (s.in.empty()) throw ConfigError("report needs --in <dir>");
    const auto cps = csv::read_file(s.in / "checkpoints.csv");
    if (cps.header.empty() || cps.header.front() != "dimension")
        throw IoError("unexpected header in " + (s.in / "checkpoints.csv").string());
    for (std::size_t i = 1; i < cps.header.size(); ++i)
        if (cps.header[i].rfind("iter_", 0) != 0)
            throw IoError("unexpected header in " + (s.in / "checkpoints.csv").string());
    const auto sweep = csv::read_file(s.in / "sweep.csv", kSweepHeader);

    out << "Best-so-far cost at iteration checkpoints (median over replicates)\n";
    std::vector<std::vector<std::string>> t1{cps.header};
    for (const auto& r : cps.rows) t1.push_back(r);
    detail::print_aligned(out, t1);

    std::vector<std::vector<std::string>> t2(4), t3(3);
    t2[0] = {"dimension"};
    t2[1] = {"iterations_to_target"};
    t2[2] = {"replicates"};
    t2[3] = {"not_reached"};
    t3[0] = {"dimension"};
    t3[1] = {"mean"};
    t3[2] = {"variance"};
    for (const auto& r : sweep.rows) {
        t2[0].push_back(r[0]);
        t2[1].push_back(r[1]);
        t2[2].push_back(r[4]);
        t2[3].push_back(r[5]);
        t3[0].push_back(r[0]);
        t3[1].push_back(r[2]);
        t3[2].push_back(r[3]);
    }
    out << "\nIterations to reach the target cost (median over replicates)\n";
    detail::print_aligned(out, t2);
    out << "\nFinal best cost over replicates\n";
    detail::print_aligned(out, t3);
    return kOk;
}

/// Entry point shared by the executable and the tests. `args` excludes the program name.
inline int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                const EnvLookup& env = process_env) {
    CLI::App app{"Cuckoo optimization algorithm: runs, dimension sweeps and reports", "coa"};
    app.require_subcommand(1, 1);

    Invocation inv;
    std::string config_path;
    bool verbose = false;
    std::map<std::string, std::string> raw;

    auto add_engine_flags = [&](CLI::App* sub) {
        static const std::pair<const char*, const char*> engine_flags[]{
            {"objective", "rastrigin or sphere"},
            {"iters", "iteration budget (100)"},
            {"seed", "RNG seed; falls back to COA_SEED, then a generated seed"},
            {"pop", "initial cuckoos (5)"},
            {"min-eggs", "fewest eggs per cuckoo (2)"},
            {"max-eggs", "most eggs per cuckoo (4)"},
            {"max-cuckoos", "population cap (10)"},
            {"radius-coeff", "egg laying radius coefficient (5)"},
            {"motion-coeff", "migration coefficient (9)"},
            {"clusters", "k-means groups (2)"},
            {"discovery", "fraction of eggs destroyed (0.1)"},
            {"var-cutoff", "position variance stop (1e-13)"},
            {"lower", "lower bound per coordinate (-30)"},
            {"upper", "upper bound per coordinate (30)"},
            {"out", "output directory (.)"},
        };
        for (const auto& [key, help] : engine_flags) sub->add_option(std::string("--") + key, raw[key], help);
        sub->add_option("--config", config_path, "JSON file of default settings");
        sub->add_flag("--verbose", verbose, "progress on standard error");
    };

    auto* run_cmd = app.add_subcommand("run", "single optimization run, writes trace.csv");
    add_engine_flags(run_cmd);
    run_cmd->add_option("--dim", raw["dim"], "problem dimension");

    auto* sweep_cmd = app.add_subcommand("sweep", "replicated runs over dimensions, writes sweep.csv and checkpoints.csv");
    add_engine_flags(sweep_cmd);
    sweep_cmd->add_option("--dims", raw["dims"], "comma-separated dimensions, e.g. 2,3,5,10");
    sweep_cmd->add_option("--replicates", raw["replicates"], "runs per dimension, seeds base..base+n-1 (1)");
    sweep_cmd->add_option("--tolerance", raw["tolerance"], "cost counted as reaching the optimum (1e-6)");
    sweep_cmd->add_option("--checkpoints", raw["checkpoints"], "iterations reported in checkpoints.csv");
    sweep_cmd->add_option("--jobs", raw["jobs"], "worker threads (1)");

    auto* report_cmd = app.add_subcommand("report", "print tables from a sweep output directory");
    report_cmd->add_option("--in", raw["in"], "directory holding sweep.csv and checkpoints.csv");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "coa: " << e.what() << '\n';
        return kUsageError;
    }

    CLI::App* active = app.get_subcommands().front();
    inv.subcommand = active->get_name();
    for (const auto& [key, value] : raw) {
        const auto* opt = active->get_option_no_throw("--" + key);
        if (opt != nullptr && opt->count() > 0) inv.flags[key] = value;
    }
    if (verbose) inv.flags["verbose"] = "true";
    if (!config_path.empty()) inv.config = config_path;

    Settings settings;
    try {
        settings = resolve(inv, env, err);
    } catch (const std::invalid_argument& e) {
        err << "coa: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (inv.subcommand == "run") return cmd_run(settings, out, err);
        if (inv.subcommand == "sweep") return cmd_sweep(settings, out, err);
        return cmd_report(settings, out);
    } catch (const ConfigError& e) {
        err << "coa: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "coa: " << e.what() << '\n';
        return kRuntimeFailure;
    }
}

} // namespace coa::cli

#pragma once

/// @file objective.hpp
/// Benchmark cost functions and the cost/profit adapter.
///
/// The engine maximizes profit; every benchmark here is a cost to minimize,
/// so profit is defined as the negated cost throughout.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "errors.hpp"

namespace coa {

/// Box bounds applied uniformly to every coordinate.
struct Bounds {
    double lower = -30.0;
    double upper = 30.0;

    [[nodiscard]] double width() const noexcept { return upper - lower; }
    [[nodiscard]] double clamp(double x) const noexcept {
        return x < lower ? lower : (x > upper ? upper : x);
    }
    [[nodiscard]] bool contains(double x) const noexcept { return x >= lower && x <= upper; }

    void validate() const {
        if (!std::isfinite(lower) || !std::isfinite(upper))
            throw ConfigError("bounds must be finite");
        if (!(lower < upper)) throw ConfigError("bounds: lower must be < upper");
    }
};

using Evaluator = std::function<double(std::span<const double>)>;

struct ObjectiveSpec {
    std::string name;
    std::size_t dimension = 0;
    Bounds bounds;
    std::optional<double> known_optimum_cost;
    Evaluator evaluator;

    [[nodiscard]] double cost(std::span<const double> x) const {
        if (x.size() != dimension)
            throw InvalidInput("objective '" + name + "': expected dimension " +
                               std::to_string(dimension) + ", got " + std::to_string(x.size()));
        return evaluator(x);
    }
};

namespace detail {
inline void check_point(std::span<const double> x, const char* who) {
    if (x.empty()) throw InvalidInput(std::string(who) + ": empty vector");
    for (double v : x)
        if (!std::isfinite(v)) throw InvalidInput(std::string(who) + ": non-finite coordinate");
}
} // namespace detail

/// 10 n + sum(x_i^2 - 10 cos(2 pi x_i)); global minimum 0 at the origin.
///
/// Evaluated through the identity 10 (1 - cos 2t) = 20 sin^2 t, which avoids
/// the cancellation of 10 n against the cosine terms near the optimum.
inline double rastrigin(std::span<const double> x) {
    detail::check_point(x, "rastrigin");
    double sum = 0.0;
    for (double v : x) {
        const double s = std::sin(std::numbers::pi * v);
        sum += v * v + 20.0 * s * s;
    }
    return sum;
}

inline double sphere(std::span<const double> x) {
    detail::check_point(x, "sphere");
    double sum = 0.0;
    for (double v : x) sum += v * v;
    return sum;
}

inline double profit_of(const ObjectiveSpec& spec, std::span<const double> x) {
    return -spec.cost(x);
}

/// Looks up a benchmark by name ("rastrigin", "sphere").
/// Throws ConfigError for an unknown name or a zero dimension.
inline ObjectiveSpec make_objective(const std::string& name, std::size_t dimension,
                                    Bounds bounds = {}) {
    if (dimension == 0) throw ConfigError("dimension must be positive");
    bounds.validate();
    ObjectiveSpec spec{name, dimension, bounds, 0.0, {}};
    if (name == "rastrigin")
        spec.evaluator = [](std::span<const double> x) { return rastrigin(x); };
    else if (name == "sphere")
        spec.evaluator = [](std::span<const double> x) { return sphere(x); };
    else
        throw ConfigError("unknown objective '" + name + "'");
    return spec;
}

} // namespace coa

#pragma once

/// @file clustering.hpp
/// Lloyd's k-means over cuckoo positions, and per-cluster profit scoring.
///
/// Centroids start at k distinct input points: one drawn uniformly, then
/// repeatedly the point farthest from every centroid chosen so far (ties to
/// the lowest index). Each round assigns
/// every point to its nearest centroid (Euclidean, ties to the lowest index)
/// and then moves each centroid to the mean of its members. A cluster that
/// ends up empty is re-seeded with the point farthest from its own centroid.
/// Iteration stops once an assignment round changes nothing, or after
/// max_iter rounds.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace coa {

using Point = std::vector<double>;

inline constexpr std::size_t kDefaultKmeansIterations = 50;

struct ClusterResult {
    std::vector<std::size_t> assignments;
    std::vector<Point> centroids;
    /// Filled by score_clusters; empty straight out of kmeans.
    std::vector<double> cluster_mean_profit;
    std::size_t iterations = 0;
    bool converged = false;

    [[nodiscard]] std::size_t k() const noexcept { return centroids.size(); }
};

struct KmeansOptions {
    std::size_t max_iter = kDefaultKmeansIterations;
    /// Called after every assign/update round with the within-cluster squared error.
    std::function<void(std::size_t round, double sse)> on_round;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        d += t * t;
    }
    return d;
}

/// Sum over points of the squared distance to their assigned centroid.
inline double within_cluster_sse(const std::vector<Point>& points,
                                 const std::vector<std::size_t>& assignments,
                                 const std::vector<Point>& centroids) {
    double sse = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        sse += squared_distance(points[i], centroids[assignments[i]]);
    return sse;
}

namespace detail {

inline std::size_t nearest_centroid(const Point& p, const std::vector<Point>& centroids) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// Recomputes centroids as member means; empty clusters take the point
// currently farthest from its own centroid.
inline void update_centroids(const std::vector<Point>& points,
                             const std::vector<std::size_t>& assignments,
                             std::vector<Point>& centroids) {
    const std::size_t k = centroids.size();
    const std::size_t dim = points.front().size();
    std::vector<Point> sums(k, Point(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& s = sums[assignments[i]];
        for (std::size_t d = 0; d < dim; ++d) s[d] += points[i][d];
        ++counts[assignments[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        for (std::size_t d = 0; d < dim; ++d)
            centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] != 0) continue;
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double d = squared_distance(points[i], centroids[assignments[i]]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        centroids[c] = points[far];
    }
}

} // namespace detail

inline ClusterResult kmeans(const std::vector<Point>& points, std::size_t k, Rng& rng,
                            const KmeansOptions& options = {}) {
    if (points.empty()) throw InvalidInput("kmeans: no points");
    if (k == 0) throw InvalidInput("kmeans: k must be positive");
    if (k > points.size()) throw InvalidInput("kmeans: k exceeds number of points");
    if (options.max_iter == 0) throw InvalidInput("kmeans: max_iter must be positive");
    const std::size_t dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim) throw InvalidInput("kmeans: points differ in dimension");

    ClusterResult result;
    result.centroids.reserve(k);
    std::vector<bool> chosen(points.size(), false);
    std::size_t pick = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(points.size() - 1)));
    std::vector<double> gap(points.size(), std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < k; ++c) {
        chosen[pick] = true;
        result.centroids.push_back(points[pick]);
        std::size_t next = points.size();
        for (std::size_t i = 0; i < points.size(); ++i) {
            gap[i] = std::min(gap[i], squared_distance(points[i], points[pick]));
            if (!chosen[i] && (next == points.size() || gap[i] > gap[next])) next = i;
        }
        pick = next;
    }

    result.assignments.assign(points.size(), 0);
    for (std::size_t round = 1; round <= options.max_iter; ++round) {
        bool changed = false;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const std::size_t c = detail::nearest_centroid(points[i], result.centroids);
            if (round == 1 || c != result.assignments[i]) changed = true;
            result.assignments[i] = c;
        }
        result.iterations = round;
        if (!changed) {
            result.converged = true;
            break;
        }
        detail::update_centroids(points, result.assignments, result.centroids);
        if (options.on_round)
            options.on_round(round, within_cluster_sse(points, result.assignments, result.centroids));
    }
    return result;
}

/// Mean profit of each cluster's members. Empty clusters score -infinity so
/// they can never be chosen as the best group.
inline std::vector<double> score_clusters(const ClusterResult& result,
                                          std::span<const double> profits) {
    if (profits.size() != result.assignments.size())
        throw InvalidInput("score_clusters: profits not aligned with points");
    const std::size_t k = result.k();
    std::vector<double> sums(k, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < profits.size(); ++i) {
        const std::size_t c = result.assignments[i];
        if (c >= k) throw InvalidInput("score_clusters: assignment out of range");
        sums[c] += profits[i];
        ++counts[c];
    }
    std::vector<double> means(k, -std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] > 0) means[c] = sums[c] / static_cast<double>(counts[c]);
    return means;
}

} // namespace coa

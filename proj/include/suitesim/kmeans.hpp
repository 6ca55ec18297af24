#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "suitesim/error.hpp"
#include "suitesim/rng.hpp"

namespace suitesim {

using Points = std::vector<std::vector<double>>;

/// Fitted k-means model over the union of instances. Invariants after
/// fitting: every cluster owns at least one point (when the data admits it)
/// and each point is assigned to its nearest centroid, ties to the lowest
/// cluster index.
struct ClusteringModel {
    std::size_t k = 0;
    Points centroids;
    std::vector<std::size_t> assignments;
    double inertia = 0.0;
    std::uint64_t seed = 0;
    /// Inertia after each Lloyd assignment step of the winning run;
    /// non-increasing by construction. Kept for diagnostics and tests.
    std::vector<double> inertia_trace;
};

enum class KSelectionMethod { silhouette, elbow_distortion };

inline std::string to_string(KSelectionMethod m) {
    return m == KSelectionMethod::silhouette ? "silhouette" : "elbow-distortion";
}

inline KSelectionMethod k_selection_method_from_string(const std::string& name) {
    if (name == "silhouette") return KSelectionMethod::silhouette;
    if (name == "elbow-distortion") return KSelectionMethod::elbow_distortion;
    throw ValidationError("unknown k selection method '" + name +
                          "' (expected silhouette or elbow-distortion)");
}

struct KSelectionReport {
    KSelectionMethod method = KSelectionMethod::silhouette;
    std::vector<std::size_t> candidate_ks;
    std::vector<double> scores;  // mean silhouette or distortion, per candidate
    std::size_t chosen_k = 0;
};

/// Frozen fitting parameters. The source data's clustering tool defaults are
/// library-version-dependent; these explicit values keep runs reproducible.
struct KMeansOptions {
    std::size_t n_init = 10;
    std::size_t max_iter = 300;
    double tol = 1e-4;  // max centroid movement (Euclidean) to declare convergence
};

namespace detail {

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

inline std::size_t nearest_centroid(const std::vector<double>& point, const Points& centroids) {
    std::size_t best = 0;
    double best_dist = squared_distance(point, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = squared_distance(point, centroids[c]);
        if (d < best_dist) {
            best_dist = d;
            best = c;
        }
    }
    return best;
}

/// k-means++ seeding: first center uniform, then D^2 sampling.
inline Points kmeanspp_init(const Points& points, std::size_t k, RngStream& rng) {
    Points centroids;
    centroids.reserve(k);
    centroids.push_back(points[rng.uniform_index(points.size())]);
    std::vector<double> min_dist(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        min_dist[i] = squared_distance(points[i], centroids.back());
    }
    while (centroids.size() < k) {
        double total = 0.0;
        for (double d : min_dist) total += d;
        std::size_t next = 0;
        if (total > 0.0) {
            const double r = rng.uniform_double() * total;
            double acc = 0.0;
            next = points.size() - 1;
            for (std::size_t i = 0; i < points.size(); ++i) {
                acc += min_dist[i];
                if (r < acc) {
                    next = i;
                    break;
                }
            }
        } else {
            // every point coincides with a chosen center; fall back to uniform
            next = rng.uniform_index(points.size());
        }
        centroids.push_back(points[next]);
        for (std::size_t i = 0; i < points.size(); ++i) {
            min_dist[i] = std::min(min_dist[i], squared_distance(points[i], centroids.back()));
        }
    }
    return centroids;
}

/// Lloyd iterations from given centroids until convergence. Empty clusters are
/// reseeded at the point farthest from its assigned centroid (ties to the
/// lowest point index).
inline ClusteringModel lloyd(const Points& points, Points centroids, const KMeansOptions& options) {
    const std::size_t k = centroids.size();
    const std::size_t n = points.size();
    ClusteringModel model;
    model.k = k;
    model.assignments.assign(n, 0);

    std::vector<std::size_t> counts(k, 0);
    for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
        // assignment step
        for (std::size_t i = 0; i < n; ++i) model.assignments[i] = nearest_centroid(points[i], centroids);

        // empty-cluster repair: reseed at the worst-served point, then reassign
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t a : model.assignments) ++counts[a];
        bool repaired = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t worst = n;
            double worst_dist = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[model.assignments[i]] <= 1) continue;  // do not orphan another cluster
                const double d = squared_distance(points[i], centroids[model.assignments[i]]);
                if (worst == n || d > worst_dist) {
                    worst = i;
                    worst_dist = d;
                }
            }
            if (worst == n || worst_dist == 0.0) continue;  // duplicates exhausted; leave empty
            --counts[model.assignments[worst]];
            centroids[c] = points[worst];
            model.assignments[worst] = c;
            counts[c] = 1;
            repaired = true;
        }
        if (repaired) {
            for (std::size_t i = 0; i < n; ++i) model.assignments[i] = nearest_centroid(points[i], centroids);
            std::fill(counts.begin(), counts.end(), 0);
            for (std::size_t a : model.assignments) ++counts[a];
        }

        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            inertia += squared_distance(points[i], centroids[model.assignments[i]]);
        }
        model.inertia_trace.push_back(inertia);

        // update step
        Points next(k, std::vector<double>(points[0].size(), 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            auto& acc = next[model.assignments[i]];
            for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += points[i][d];
        }
        double movement = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                next[c] = centroids[c];  // irreparable empty cluster keeps its position
                continue;
            }
            for (double& v : next[c]) v /= static_cast<double>(counts[c]);
            movement = std::max(movement, std::sqrt(squared_distance(next[c], centroids[c])));
        }
        centroids = std::move(next);
        if (movement < options.tol) break;
    }

    // final assignment so the nearest-centroid invariant holds at return
    for (std::size_t i = 0; i < n; ++i) model.assignments[i] = nearest_centroid(points[i], centroids);
    model.centroids = std::move(centroids);
    model.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        model.inertia += squared_distance(points[i], model.centroids[model.assignments[i]]);
    }
    model.inertia_trace.push_back(model.inertia);
    return model;
}

inline void check_points(const Points& points) {
    require(!points.empty(), "k-means requires at least one point");
    for (const auto& p : points) {
        require(p.size() == points[0].size(), "k-means points must all have the same dimension");
    }
}

}  // namespace detail

/// Lloyd iterations from k-means++ seeding; best of n_init restarts by
/// inertia. Each restart draws from its own stream derived from
/// (seed, restart index), so the result is independent of evaluation order.
inline ClusteringModel kmeans_fit(const Points& points, std::size_t k, std::uint64_t seed,
                                  const KMeansOptions& options = {}) {
    detail::check_points(points);
    require(k >= 1, "k must be >= 1");
    require(k <= points.size(), "k (" + std::to_string(k) + ") exceeds number of points (" +
                                    std::to_string(points.size()) + ")");

    std::optional<ClusteringModel> best;
    for (std::size_t restart = 0; restart < options.n_init; ++restart) {
        RngStream rng(derive_seed(seed, restart));
        ClusteringModel model =
            detail::lloyd(points, detail::kmeanspp_init(points, k, rng), options);
        if (!best || model.inertia < best->inertia) best = std::move(model);
    }
    best->seed = seed;
    return std::move(*best);
}

/// Places points (typically held-out instances) into an existing model's
/// clusters: nearest centroid, Euclidean distance, ties to the lowest index.
inline std::vector<std::size_t> assign(const Points& points, const ClusteringModel& model) {
    std::vector<std::size_t> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        require(p.size() == model.centroids[0].size(),
                "assign: point dimension does not match centroid dimension");
        out.push_back(detail::nearest_centroid(p, model.centroids));
    }
    return out;
}

/// Mean squared Euclidean distance of points to their nearest centroid.
/// Equals inertia / point count on the training points.
inline double distortion(const Points& points, const ClusteringModel& model) {
    detail::check_points(points);
    require(points[0].size() == model.centroids[0].size(),
            "distortion: point dimension does not match centroid dimension");
    double total = 0.0;
    for (const auto& p : points) {
        total += detail::squared_distance(p, model.centroids[detail::nearest_centroid(p, model.centroids)]);
    }
    return total / static_cast<double>(points.size());
}

/// Mean silhouette score over all points: (b - a) / max(a, b) with a the mean
/// distance to the point's own cluster and b the smallest mean distance to
/// another cluster. Points in singleton clusters contribute 0.
inline double silhouette(const Points& points, const std::vector<std::size_t>& assignments) {
    detail::check_points(points);
    require(points.size() == assignments.size(), "silhouette: one assignment per point required");

    std::size_t k = 0;
    for (std::size_t a : assignments) k = std::max(k, a + 1);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : assignments) ++counts[a];
    std::size_t populated = 0;
    for (std::size_t c : counts) populated += (c > 0) ? 1 : 0;
    require(populated >= 2, "silhouette undefined for k=1");

    const std::size_t n = points.size();
    double total = 0.0;
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = assignments[i];
        if (counts[own] == 1) continue;  // singleton contributes 0
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sums[assignments[j]] += std::sqrt(detail::squared_distance(points[i], points[j]));
        }
        const double a = sums[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own || counts[c] == 0) continue;
            b = std::min(b, sums[c] / static_cast<double>(counts[c]));
        }
        total += (b - a) / std::max(a, b);
    }
    return total / static_cast<double>(n);
}

/// Scans k in [k_min, k_max] and picks the cluster count. The silhouette
/// method takes the k with the highest mean silhouette; the elbow method takes
/// the interior k maximizing the discrete second difference of the distortion
/// curve. Ties go to the smallest k.
///
/// Each candidate k is fitted with kmeans_fit and additionally with a
/// warm start from the previous k's centroids plus its worst-served point
/// (the better of the two by inertia wins). The warm start guarantees the
/// distortion curve is non-increasing in k, which the elbow method needs.
inline std::pair<ClusteringModel, KSelectionReport> select_k(const Points& points, std::size_t k_min,
                                                             std::size_t k_max, KSelectionMethod method,
                                                             std::uint64_t seed,
                                                             const KMeansOptions& options = {}) {
    detail::check_points(points);
    require(k_min >= 2, "k must be >= 2");
    require(k_min < k_max, "k range invalid: k_min must be < k_max");
    require(k_max <= points.size(), "k range invalid: k_max exceeds number of points");
    if (method == KSelectionMethod::elbow_distortion) {
        require(k_max - k_min >= 2, "elbow method needs at least three candidate k values");
    }

    KSelectionReport report;
    report.method = method;

    std::vector<ClusteringModel> models;
    models.reserve(k_max - k_min + 1);
    for (std::size_t k = k_min; k <= k_max; ++k) {
        ClusteringModel model = kmeans_fit(points, k, seed, options);
        if (!models.empty()) {
            // nested refinement: previous centroids plus the worst-served point
            const ClusteringModel& prev = models.back();
            std::size_t worst = 0;
            double worst_dist = -1.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                const double d =
                    detail::squared_distance(points[i], prev.centroids[prev.assignments[i]]);
                if (d > worst_dist) {
                    worst_dist = d;
                    worst = i;
                }
            }
            Points warm = prev.centroids;
            warm.push_back(points[worst]);
            ClusteringModel refined = detail::lloyd(points, std::move(warm), options);
            refined.seed = seed;
            if (refined.inertia < model.inertia) model = std::move(refined);
        }
        report.candidate_ks.push_back(k);
        models.push_back(std::move(model));
    }

    std::size_t chosen_index = 0;
    if (method == KSelectionMethod::silhouette) {
        for (const ClusteringModel& m : models) {
            report.scores.push_back(silhouette(points, m.assignments));
        }
        for (std::size_t i = 1; i < report.scores.size(); ++i) {
            if (report.scores[i] > report.scores[chosen_index]) chosen_index = i;
        }
    } else {
        for (const ClusteringModel& m : models) {
            report.scores.push_back(distortion(points, m));
        }
        // knee = maximum discrete second difference over interior candidates
        double best_curvature = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < report.scores.size(); ++i) {
            const double curvature =
                report.scores[i - 1] - 2.0 * report.scores[i] + report.scores[i + 1];
            if (curvature > best_curvature) {
                best_curvature = curvature;
                chosen_index = i;
            }
        }
    }
    report.chosen_k = report.candidate_ks[chosen_index];
    return {std::move(models[chosen_index]), std::move(report)};
}

}  // namespace suitesim

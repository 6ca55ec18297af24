#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "suitesim/error.hpp"

namespace suitesim {

/// Suite-level meta-representation: row s holds the fraction of suite s's
/// instances falling into each of the k clusters. Rows are probability
/// vectors (entries >= 0, sum 1).
struct CoverageMatrix {
    std::vector<std::string> suite_ids;
    std::size_t k = 0;
    std::vector<std::vector<double>> rows;
};

/// Pairwise cosine similarity between coverage rows. Symmetric, diagonal
/// pinned to exactly 1.
struct SimilarityMatrix {
    std::vector<std::string> suite_ids;
    std::vector<std::vector<double>> values;
};

/// Agglomerative merge tree over suites. Leaves are numbered 0..m-1 in
/// suite order; merge i creates node m+i. Merge distances are non-decreasing
/// (average linkage).
struct DendrogramMerge {
    std::size_t left = 0;
    std::size_t right = 0;
    double distance = 0.0;
    std::size_t size = 0;  // leaf count of the merged node
};

struct Dendrogram {
    std::vector<std::string> leaf_ids;
    std::vector<DendrogramMerge> merges;
};

/// Builds the coverage matrix from per-record suite labels and cluster
/// assignments. Suite order is first appearance.
inline CoverageMatrix coverage_matrix(const std::vector<std::string>& suite_labels,
                                      const std::vector<std::size_t>& assignments, std::size_t k) {
    require(!suite_labels.empty(), "coverage_matrix: no records");
    require(suite_labels.size() == assignments.size(),
            "coverage_matrix: labels and assignments must have equal length");
    require(k >= 1, "coverage_matrix: k must be >= 1");

    CoverageMatrix cov;
    cov.k = k;
    std::vector<std::size_t> suite_of(suite_labels.size());
    for (std::size_t i = 0; i < suite_labels.size(); ++i) {
        const auto it = std::find(cov.suite_ids.begin(), cov.suite_ids.end(), suite_labels[i]);
        if (it == cov.suite_ids.end()) {
            suite_of[i] = cov.suite_ids.size();
            cov.suite_ids.push_back(suite_labels[i]);
        } else {
            suite_of[i] = static_cast<std::size_t>(it - cov.suite_ids.begin());
        }
    }
    cov.rows.assign(cov.suite_ids.size(), std::vector<double>(k, 0.0));
    std::vector<double> totals(cov.suite_ids.size(), 0.0);
    for (std::size_t i = 0; i < suite_labels.size(); ++i) {
        require(assignments[i] < k, "coverage_matrix: assignment " + std::to_string(assignments[i]) +
                                        " out of range for k=" + std::to_string(k));
        cov.rows[suite_of[i]][assignments[i]] += 1.0;
        totals[suite_of[i]] += 1.0;
    }
    for (std::size_t s = 0; s < cov.rows.size(); ++s) {
        for (double& v : cov.rows[s]) v /= totals[s];
    }
    return cov;
}

/// dot(u, v) / (|u| |v|). In [0, 1] for nonnegative inputs.
inline double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
    require(u.size() == v.size(), "cosine similarity requires vectors of equal length");
    require(!u.empty(), "cosine similarity undefined for empty vectors");
    double dot = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    require(uu > 0.0 && vv > 0.0, "cosine similarity undefined for zero vector");
    return dot / (std::sqrt(uu) * std::sqrt(vv));
}

inline SimilarityMatrix similarity_matrix(const CoverageMatrix& cov) {
    require(cov.suite_ids.size() >= 2, "need at least 2 suites");
    const std::size_t m = cov.suite_ids.size();
    SimilarityMatrix sim;
    sim.suite_ids = cov.suite_ids;
    sim.values.assign(m, std::vector<double>(m, 1.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double value = cosine_similarity(cov.rows[i], cov.rows[j]);
            sim.values[i][j] = value;
            sim.values[j][i] = value;
        }
    }
    return sim;
}

/// Agglomerative clustering of suites with distance 1 - similarity and
/// average linkage. Ties break on the lowest (then second-lowest) node index.
inline Dendrogram agglomerate(const SimilarityMatrix& sim) {
    const std::size_t m = sim.suite_ids.size();
    require(m >= 2, "need at least 2 suites");

    Dendrogram dendro;
    dendro.leaf_ids = sim.suite_ids;

    // active node id -> (distance row indexed by active position)
    std::vector<std::size_t> node_ids(m);
    std::vector<std::size_t> node_sizes(m, 1);
    std::vector<std::vector<double>> dist(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        node_ids[i] = i;
        for (std::size_t j = 0; j < m; ++j) dist[i][j] = 1.0 - sim.values[i][j];
    }

    for (std::size_t merge = 0; merge + 1 < m; ++merge) {
        std::size_t a = 0, b = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < dist.size(); ++i) {
            for (std::size_t j = i + 1; j < dist.size(); ++j) {
                const double d = dist[i][j];
                const bool better =
                    d < best ||
                    (d == best && std::min(node_ids[i], node_ids[j]) < std::min(node_ids[a], node_ids[b])) ||
                    (d == best && std::min(node_ids[i], node_ids[j]) == std::min(node_ids[a], node_ids[b]) &&
                     std::max(node_ids[i], node_ids[j]) < std::max(node_ids[a], node_ids[b]));
                if (better) {
                    best = d;
                    a = i;
                    b = j;
                }
            }
        }

        DendrogramMerge record;
        record.left = std::min(node_ids[a], node_ids[b]);
        record.right = std::max(node_ids[a], node_ids[b]);
        record.distance = best;
        record.size = node_sizes[a] + node_sizes[b];
        dendro.merges.push_back(record);

        // average linkage update into position a, drop position b
        const double wa = static_cast<double>(node_sizes[a]);
        const double wb = static_cast<double>(node_sizes[b]);
        for (std::size_t j = 0; j < dist.size(); ++j) {
            if (j == a || j == b) continue;
            const double d = (wa * dist[a][j] + wb * dist[b][j]) / (wa + wb);
            dist[a][j] = d;
            dist[j][a] = d;
        }
        node_ids[a] = m + merge;
        node_sizes[a] = record.size;
        for (auto& row : dist) row.erase(row.begin() + static_cast<std::ptrdiff_t>(b));
        dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(b));
        node_ids.erase(node_ids.begin() + static_cast<std::ptrdiff_t>(b));
        node_sizes.erase(node_sizes.begin() + static_cast<std::ptrdiff_t>(b));
    }
    return dendro;
}

/// Left-to-right leaf traversal of the merge tree; the ordering used to
/// reorganize heatmap rows so similar suites sit together.
inline std::vector<std::string> leaf_order(const Dendrogram& dendro) {
    const std::size_t m = dendro.leaf_ids.size();
    require(dendro.merges.size() + 1 == m, "leaf_order: malformed dendrogram");

    std::vector<std::string> order;
    order.reserve(m);
    // iterative traversal from the root, expanding left before right
    std::vector<std::size_t> stack{m + dendro.merges.size() - 1};
    if (m == 1) stack = {0};
    while (!stack.empty()) {
        const std::size_t node = stack.back();
        stack.pop_back();
        if (node < m) {
            order.push_back(dendro.leaf_ids[node]);
            continue;
        }
        const DendrogramMerge& rec = dendro.merges[node - m];
        stack.push_back(rec.right);  // popped after left
        stack.push_back(rec.left);
    }
    return order;
}

}  // namespace suitesim

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "suitesim/corpus.hpp"
#include "suitesim/error.hpp"
#include "suitesim/rng.hpp"

namespace suitesim {

/// Frozen equivalents of the usual library defaults: 100 trees, n-of-n
/// bootstrap, every feature a split candidate, unlimited depth.
struct ForestConfig {
    std::size_t tree_count = 100;
    bool bootstrap = true;
    double split_candidate_fraction = 1.0;  // in (0, 1]
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    std::optional<std::size_t> max_depth;
    std::uint64_t seed = 0;

    void validate() const {
        require(tree_count >= 1, "forest: tree_count must be >= 1");
        require(split_candidate_fraction > 0.0 && split_candidate_fraction <= 1.0,
                "forest: split_candidate_fraction must be in (0, 1]");
        require(min_samples_split >= 2, "forest: min_samples_split must be >= 2");
        require(min_samples_leaf >= 1, "forest: min_samples_leaf must be >= 1");
        if (max_depth) require(*max_depth >= 1, "forest: max_depth must be >= 1");
    }
};

/// CART regression tree stored as a flat node array, root at index 0.
/// Leaves hold the mean of the training targets routed to them.
struct RegressionTree {
    struct Node {
        std::int32_t feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        double value = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        bool is_leaf() const { return feature < 0; }
    };
    std::vector<Node> nodes;

    double predict_one(const std::vector<double>& features) const {
        std::size_t at = 0;
        while (!nodes[at].is_leaf()) {
            const Node& node = nodes[at];
            at = static_cast<std::size_t>(
                features[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                   : node.right);
        }
        return nodes[at].value;
    }
};

struct ForestModel {
    std::vector<RegressionTree> trees;
    ForestConfig config;
    std::string train_suite;
    std::size_t feature_count = 0;
};

/// Train-suite x test-suite grid of median absolute errors. The diagonal is
/// resubstitution on the train suite itself, repeated explicitly in
/// train_mdae so the layout mirrors the mdae.csv artifact.
struct EvaluationMatrix {
    std::vector<std::string> train_suites;
    std::vector<std::string> test_suites;
    std::vector<std::vector<double>> mdae_values;
    std::vector<double> train_mdae;
};

namespace detail {

struct TreeBuilder {
    const std::vector<std::vector<double>>& features;
    const std::vector<double>& targets;
    const ForestConfig& config;
    RngStream& rng;
    RegressionTree tree;

    std::size_t feature_dim() const { return features[0].size(); }

    /// Candidate feature indices for one node, ascending so gain ties resolve
    /// to the lowest feature index.
    std::vector<std::size_t> sample_candidates() {
        const std::size_t n = feature_dim();
        const auto count = static_cast<std::size_t>(
            std::max<double>(1.0, std::ceil(config.split_candidate_fraction * static_cast<double>(n))));
        if (count >= n) {
            std::vector<std::size_t> all(n);
            for (std::size_t i = 0; i < n; ++i) all[i] = i;
            return all;
        }
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + rng.uniform_index(n - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(count);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    std::int32_t grow(std::vector<std::size_t>& rows, std::size_t depth) {
        double sum = 0.0;
        for (std::size_t r : rows) sum += targets[r];
        const double mean = sum / static_cast<double>(rows.size());
        double sse = 0.0;
        for (std::size_t r : rows) {
            const double d = targets[r] - mean;
            sse += d * d;
        }

        const bool at_depth_limit = config.max_depth && depth >= *config.max_depth;
        if (rows.size() < config.min_samples_split || sse <= 0.0 || at_depth_limit) {
            return make_leaf(mean);
        }

        // best (feature, threshold) by total child SSE; ties to the lower
        // feature index, then the lower threshold
        double best_sse = std::numeric_limits<double>::infinity();
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;
        std::vector<std::pair<double, double>> column(rows.size());  // (value, target)
        for (const std::size_t f : sample_candidates()) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                column[i] = {features[rows[i]][f], targets[rows[i]]};
            }
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            double left_sum = 0.0, left_sq = 0.0;
            double right_sum = 0.0, right_sq = 0.0;
            for (const auto& [value, target] : column) {
                right_sum += target;
                right_sq += target * target;
            }
            const auto total = static_cast<double>(rows.size());
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                const double target = column[i].second;
                left_sum += target;
                left_sq += target * target;
                right_sum -= target;
                right_sq -= target * target;
                if (column[i].first == column[i + 1].first) continue;  // not a distinct boundary
                const double left_count = static_cast<double>(i + 1);
                const double right_count = total - left_count;
                if (left_count < static_cast<double>(config.min_samples_leaf) ||
                    right_count < static_cast<double>(config.min_samples_leaf)) {
                    continue;
                }
                const double child_sse = (left_sq - left_sum * left_sum / left_count) +
                                         (right_sq - right_sum * right_sum / right_count);
                if (child_sse < best_sse) {
                    best_sse = child_sse;
                    best_feature = f;
                    best_threshold = (column[i].first + column[i + 1].first) / 2.0;
                    found = true;
                }
            }
        }
        if (!found) return make_leaf(mean);  // duplicated feature vectors or leaf constraint

        std::vector<std::size_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (std::size_t r : rows) {
            (features[r][best_feature] <= best_threshold ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const auto index = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back({static_cast<std::int32_t>(best_feature), best_threshold, 0.0, -1, -1});
        const std::int32_t left = grow(left_rows, depth + 1);
        const std::int32_t right = grow(right_rows, depth + 1);
        tree.nodes[static_cast<std::size_t>(index)].left = left;
        tree.nodes[static_cast<std::size_t>(index)].right = right;
        return index;
    }

    std::int32_t make_leaf(double value) {
        tree.nodes.push_back({-1, 0.0, value, -1, -1});
        return static_cast<std::int32_t>(tree.nodes.size() - 1);
    }
};

}  // namespace detail

/// Grows one CART regression tree by greedy variance reduction.
inline RegressionTree fit_tree(const std::vector<std::vector<double>>& features,
                               const std::vector<double>& targets, const ForestConfig& config,
                               RngStream& rng) {
    config.validate();
    require(!features.empty(), "fit_tree: empty input");
    require(features.size() == targets.size(), "fit_tree: one target per sample required");
    for (const auto& row : features) {
        require(row.size() == features[0].size(), "fit_tree: ragged feature matrix");
    }
    detail::TreeBuilder builder{features, targets, config, rng, {}};
    std::vector<std::size_t> rows(features.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    builder.grow(rows, 0);
    return std::move(builder.tree);
}

/// Trains config.tree_count trees, each on its own bootstrap resample and RNG
/// stream derived from (seed, tree index). Bit-identical results for a fixed
/// seed regardless of thread count.
inline ForestModel fit_forest(const std::vector<std::vector<double>>& features,
                              const std::vector<double>& targets, const ForestConfig& config,
                              const std::string& train_label = {}, std::size_t threads = 1) {
    config.validate();
    require(features.size() >= 2, "fit_forest: need at least 2 samples");
    require(features.size() == targets.size(), "fit_forest: one target per sample required");

    ForestModel model;
    model.config = config;
    model.train_suite = train_label;
    model.feature_count = features[0].size();
    model.trees.resize(config.tree_count);

    const auto fit_one = [&](std::size_t t) {
        RngStream rng(derive_seed(config.seed, t));
        if (config.bootstrap) {
            std::vector<std::vector<double>> boot_features;
            std::vector<double> boot_targets;
            boot_features.reserve(features.size());
            boot_targets.reserve(features.size());
            for (std::size_t i = 0; i < features.size(); ++i) {
                const std::size_t pick = rng.uniform_index(features.size());
                boot_features.push_back(features[pick]);
                boot_targets.push_back(targets[pick]);
            }
            model.trees[t] = fit_tree(boot_features, boot_targets, config, rng);
        } else {
            model.trees[t] = fit_tree(features, targets, config, rng);
        }
    };

    if (threads <= 1 || config.tree_count == 1) {
        for (std::size_t t = 0; t < config.tree_count; ++t) fit_one(t);
    } else {
        const std::size_t worker_count = std::min(threads, config.tree_count);
        std::vector<std::thread> workers;
        workers.reserve(worker_count);
        for (std::size_t w = 0; w < worker_count; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t t = w; t < config.tree_count; t += worker_count) fit_one(t);
            });
        }
        for (auto& worker : workers) worker.join();
    }
    return model;
}

/// Trains on a LabeledCorpus holding exactly one suite.
inline ForestModel fit_forest(const LabeledCorpus& labeled, const ForestConfig& config,
                              std::size_t threads = 1) {
    require(labeled.corpus.suite_ids.size() == 1,
            "fit_forest: labeled corpus must be restricted to one suite");
    return fit_forest(labeled.corpus.feature_matrix(), labeled.targets, config,
                      labeled.corpus.suite_ids[0], threads);
}

/// Per-sample mean of the per-tree predictions.
inline std::vector<double> predict(const ForestModel& model,
                                   const std::vector<std::vector<double>>& features) {
    std::vector<double> out;
    out.reserve(features.size());
    for (const auto& row : features) {
        require(row.size() == model.feature_count, "predict: feature width mismatch");
        double sum = 0.0;
        for (const auto& tree : model.trees) sum += tree.predict_one(row);
        out.push_back(sum / static_cast<double>(model.trees.size()));
    }
    return out;
}

/// Median absolute error; even counts average the two middle order statistics.
inline double mdae(const std::vector<double>& predicted, const std::vector<double>& actual) {
    require(!predicted.empty(), "mdae: empty vectors");
    require(predicted.size() == actual.size(), "mdae: length mismatch");
    std::vector<double> abs_errors(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        abs_errors[i] = std::abs(predicted[i] - actual[i]);
    }
    std::sort(abs_errors.begin(), abs_errors.end());
    const std::size_t n = abs_errors.size();
    if (n % 2 == 1) return abs_errors[n / 2];
    return (abs_errors[n / 2 - 1] + abs_errors[n / 2]) / 2.0;
}

/// Fits one forest per train suite and evaluates it on every suite. Cell
/// [i][j] is the MDAE of suite i's model on suite j; the diagonal doubles as
/// the explicit train_mdae column.
inline EvaluationMatrix cross_suite_evaluate(const LabeledCorpus& labeled, const ForestConfig& config,
                                             std::size_t threads = 1) {
    config.validate();
    const auto& suites = labeled.corpus.suite_ids;
    require(suites.size() >= 2, "cross-suite evaluation needs at least 2 suites");

    std::vector<std::vector<std::vector<double>>> suite_features(suites.size());
    std::vector<std::vector<double>> suite_targets(suites.size());
    for (std::size_t s = 0; s < suites.size(); ++s) {
        const LabeledCorpus slice = labeled.restrict_to_suite(suites[s]);
        require(slice.targets.size() >= 2,
                "suite '" + suites[s] + "' has fewer than 2 labeled records");
        suite_features[s] = slice.corpus.feature_matrix();
        suite_targets[s] = slice.targets;
    }

    EvaluationMatrix eval;
    eval.train_suites = suites;
    eval.test_suites = suites;
    eval.mdae_values.assign(suites.size(), std::vector<double>(suites.size(), 0.0));
    eval.train_mdae.resize(suites.size());
    for (std::size_t i = 0; i < suites.size(); ++i) {
        const ForestModel model =
            fit_forest(suite_features[i], suite_targets[i], config, suites[i], threads);
        for (std::size_t j = 0; j < suites.size(); ++j) {
            eval.mdae_values[i][j] = mdae(predict(model, suite_features[j]), suite_targets[j]);
        }
        eval.train_mdae[i] = eval.mdae_values[i][i];
    }
    return eval;
}

}  // namespace suitesim

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "suitesim/corpus.hpp"
#include "suitesim/coverage.hpp"
#include "suitesim/error.hpp"
#include "suitesim/forest.hpp"
#include "suitesim/kmeans.hpp"
#include "suitesim/rng.hpp"

namespace suitesim {

/// Per-cluster affine target rule: target = weights . x + offset + noise.
struct TargetRule {
    std::vector<double> weights;
    double offset = 0.0;
    double noise_scale = 0.0;
};

struct SuiteMixture {
    std::string label;
    std::vector<double> weights;  // over clusters, nonnegative, sum 1
    std::size_t instance_count = 0;
};

/// Desk-scale generator for corpora with planted cluster structure, used to
/// exercise the full pipeline where the original benchmark data is not
/// available.
struct SyntheticSpec {
    std::vector<std::vector<double>> cluster_centers;
    double cluster_spread = 1.0;
    std::vector<SuiteMixture> suites;
    std::vector<TargetRule> target_rules;  // one per cluster
    std::uint64_t seed = 0;
    std::string algorithm = "synthetic";

    void validate() const {
        require(!cluster_centers.empty(), "synthetic spec: no clusters");
        require(!suites.empty(), "synthetic spec: no suites");
        require(cluster_spread > 0.0, "synthetic spec: cluster_spread must be > 0");
        require(target_rules.size() == cluster_centers.size(),
                "synthetic spec: one target rule per cluster required");
        const std::size_t dim = cluster_centers[0].size();
        for (const auto& center : cluster_centers) {
            require(center.size() == dim, "synthetic spec: cluster centers must share a dimension");
        }
        for (const auto& rule : target_rules) {
            require(rule.weights.size() == dim, "synthetic spec: target weights must match dimension");
            require(rule.noise_scale >= 0.0, "synthetic spec: noise_scale must be >= 0");
        }
        for (const auto& suite : suites) {
            require(!suite.label.empty(), "synthetic spec: empty suite label");
            require(suite.instance_count >= 1, "synthetic spec: instance_count must be >= 1");
            require(suite.weights.size() == cluster_centers.size(),
                    "synthetic spec: mixture weights must have one entry per cluster");
            double total = 0.0;
            for (double w : suite.weights) {
                require(w >= 0.0, "synthetic spec: mixture weights must be nonnegative");
                total += w;
            }
            require(std::abs(total - 1.0) < 1e-9, "synthetic spec: mixture weights must sum to 1");
        }
    }
};

struct SyntheticCorpus {
    LabeledCorpus labeled;
    std::vector<std::size_t> true_clusters;  // generator ground truth per record
};

/// Draws each instance from an isotropic Gaussian around its sampled cluster
/// center; the target follows that cluster's affine rule plus Gaussian noise.
/// Each suite uses its own stream derived from (seed, suite index).
inline SyntheticCorpus synth_corpus(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t dim = spec.cluster_centers[0].size();

    SyntheticCorpus out;
    Corpus& corpus = out.labeled.corpus;
    for (std::size_t d = 0; d < dim; ++d) corpus.feature_names.push_back("f" + std::to_string(d + 1));
    out.labeled.algorithm = spec.algorithm;
    out.labeled.transform = TargetTransform::raw;

    for (std::size_t s = 0; s < spec.suites.size(); ++s) {
        const SuiteMixture& suite = spec.suites[s];
        RngStream rng(derive_seed(spec.seed, s));
        corpus.suite_ids.push_back(suite.label);
        for (std::size_t j = 0; j < suite.instance_count; ++j) {
            const std::size_t cluster = rng.categorical(suite.weights);
            InstanceRecord record;
            record.suite_id = suite.label;
            char id[32];
            std::snprintf(id, sizeof(id), "i%04zu", j);
            record.instance_id = id;
            record.features.resize(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                record.features[d] = spec.cluster_centers[cluster][d] + spec.cluster_spread * rng.normal();
            }
            const TargetRule& rule = spec.target_rules[cluster];
            double target = rule.offset;
            for (std::size_t d = 0; d < dim; ++d) target += rule.weights[d] * record.features[d];
            if (rule.noise_scale > 0.0) target += rule.noise_scale * rng.normal();
            out.labeled.source_rows.push_back(corpus.records.size());
            corpus.records.push_back(std::move(record));
            out.labeled.targets.push_back(target);
            out.true_clusters.push_back(cluster);
        }
    }
    return out;
}

/// SELECTOR-style suite construction: instances become graph vertices with an
/// edge where feature cosine similarity >= threshold; each of run_count
/// independently seeded greedy maximal-independent-set passes yields one
/// suite. Returns record indices per run, ascending.
inline std::vector<std::vector<std::size_t>> mis_select_suites(const Corpus& corpus,
                                                               double similarity_threshold,
                                                               std::size_t run_count,
                                                               std::uint64_t seed) {
    require(!corpus.records.empty(), "mis_select_suites: empty corpus");
    require(similarity_threshold > 0.0 && similarity_threshold < 1.0,
            "mis_select_suites: threshold must be in (0, 1)");
    require(run_count >= 1, "mis_select_suites: run_count must be >= 1");

    const std::size_t n = corpus.records.size();
    std::vector<std::vector<std::size_t>> adjacency(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& u = corpus.records[i].features;
            const auto& v = corpus.records[j].features;
            double dot = 0.0, uu = 0.0, vv = 0.0;
            for (std::size_t d = 0; d < u.size(); ++d) {
                dot += u[d] * v[d];
                uu += u[d] * u[d];
                vv += v[d] * v[d];
            }
            // zero-norm vectors have no defined similarity, hence no edge
            if (uu == 0.0 || vv == 0.0) continue;
            if (dot / (std::sqrt(uu) * std::sqrt(vv)) >= similarity_threshold) {
                adjacency[i].push_back(j);
                adjacency[j].push_back(i);
            }
        }
    }

    std::vector<std::vector<std::size_t>> suites;
    suites.reserve(run_count);
    std::vector<char> blocked(n);
    for (std::size_t run = 0; run < run_count; ++run) {
        RngStream rng(derive_seed(seed, run));
        std::fill(blocked.begin(), blocked.end(), 0);
        std::vector<std::size_t> selected;
        for (const std::size_t v : rng.permutation(n)) {
            if (blocked[v]) continue;
            selected.push_back(v);
            blocked[v] = 1;
            for (const std::size_t u : adjacency[v]) blocked[u] = 1;
        }
        std::sort(selected.begin(), selected.end());
        suites.push_back(std::move(selected));
    }
    return suites;
}

/// Adds one suite holding every instance of the given cluster, regardless of
/// origin. Instance ids are prefixed with the source suite to stay unique.
inline Corpus single_cluster_suite(const Corpus& corpus, const ClusteringModel& model,
                                   std::size_t cluster_index, const std::string& label) {
    require(model.assignments.size() == corpus.records.size(),
            "single_cluster_suite: model was not fitted on this corpus");
    require(cluster_index < model.k, "single_cluster_suite: cluster index " +
                                         std::to_string(cluster_index) + " out of range for k=" +
                                         std::to_string(model.k));
    require(std::find(corpus.suite_ids.begin(), corpus.suite_ids.end(), label) ==
                corpus.suite_ids.end(),
            "single_cluster_suite: suite '" + label + "' already exists");

    Corpus out = corpus;
    std::size_t added = 0;
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        if (model.assignments[i] != cluster_index) continue;
        InstanceRecord record = corpus.records[i];
        record.instance_id = record.suite_id + "/" + record.instance_id;
        record.suite_id = label;
        out.records.push_back(std::move(record));
        ++added;
    }
    require(added > 0, "single_cluster_suite: cluster " + std::to_string(cluster_index) + " is empty");
    out.suite_ids.push_back(label);
    return out;
}

/// Spearman rank correlation with average ranks for ties. Undefined (nullopt)
/// when either input is constant.
inline std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size(), "spearman: length mismatch");
    require(a.size() >= 2, "spearman: need at least 2 observations");

    const auto ranks = [](const std::vector<double>& values) {
        const std::size_t n = values.size();
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
        std::vector<double> out(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
            const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t t = i; t <= j; ++t) out[order[t]] = rank;
            i = j + 1;
        }
        return out;
    };

    const std::vector<double> ra = ranks(a);
    const std::vector<double> rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += ra[i];
        mean_b += rb[i];
    }
    mean_a /= n;
    mean_b /= n;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = ra[i] - mean_a;
        const double db = rb[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) return std::nullopt;
    return cov / std::sqrt(var_a * var_b);
}

enum class Verdict { consistent, violated, insufficient_variation };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::consistent: return "consistent";
        case Verdict::violated: return "violated";
        default: return "insufficient-variation";
    }
}

/// One row of the generalizability report: how a train suite's feature-space
/// similarity to the other suites lines up against its model errors on them.
struct SuiteGeneralizability {
    std::string suite;
    std::vector<std::string> test_suites;  // the other m-1 suites, matrix order
    std::vector<double> similarity_row;
    std::vector<double> mdae_row;
    std::optional<double> rank_correlation;
    Verdict verdict = Verdict::insufficient_variation;
};

struct Report {
    std::vector<SuiteGeneralizability> per_suite;
    std::optional<double> median_correlation;
};

/// Operationalizes the claim that similar suite distributions lead to similar
/// model errors: per train suite, the Spearman correlation between its
/// similarity row and its MDAE row over the other suites. Negative
/// correlation (higher similarity, lower error) counts as consistent.
inline Report generalizability_report(const SimilarityMatrix& sim, const EvaluationMatrix& eval) {
    const std::size_t m = sim.suite_ids.size();
    require(m >= 3, "correlation needs at least 2 test suites (>= 3 suites total)");

    // align the evaluation grid to the similarity matrix's suite order
    std::map<std::string, std::size_t> train_index, test_index;
    for (std::size_t i = 0; i < eval.train_suites.size(); ++i) train_index[eval.train_suites[i]] = i;
    for (std::size_t j = 0; j < eval.test_suites.size(); ++j) test_index[eval.test_suites[j]] = j;
    require(eval.train_suites.size() == m && eval.test_suites.size() == m,
            "generalizability report: suite label sets must match");
    for (const auto& label : sim.suite_ids) {
        require(train_index.count(label) == 1 && test_index.count(label) == 1,
                "generalizability report: suite '" + label + "' missing from evaluation matrix");
    }

    Report report;
    std::vector<double> defined;
    for (std::size_t i = 0; i < m; ++i) {
        SuiteGeneralizability row;
        row.suite = sim.suite_ids[i];
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            row.test_suites.push_back(sim.suite_ids[j]);
            row.similarity_row.push_back(sim.values[i][j]);
            row.mdae_row.push_back(
                eval.mdae_values[train_index.at(sim.suite_ids[i])][test_index.at(sim.suite_ids[j])]);
        }
        row.rank_correlation = spearman(row.similarity_row, row.mdae_row);
        if (!row.rank_correlation) {
            row.verdict = Verdict::insufficient_variation;
        } else {
            row.verdict = *row.rank_correlation < 0.0 ? Verdict::consistent : Verdict::violated;
            defined.push_back(*row.rank_correlation);
        }
        report.per_suite.push_back(std::move(row));
    }
    if (!defined.empty()) {
        std::sort(defined.begin(), defined.end());
        const std::size_t n = defined.size();
        report.median_correlation =
            n % 2 == 1 ? defined[n / 2] : (defined[n / 2 - 1] + defined[n / 2]) / 2.0;
    }
    return report;
}

/// Table-3-shaped evaluation: a model trained on the single-cluster suite,
/// one row per algorithm, MDAE on each original suite.
struct SingleClusterEvaluation {
    std::string train_label;
    std::vector<std::string> algorithms;
    std::vector<std::string> test_suites;
    std::vector<std::vector<double>> mdae_values;  // [algorithm][suite]
};

/// Trains on the records of one cluster (across all suites) per algorithm and
/// evaluates on every original suite. `perf_tables` supplies one performance
/// table per algorithm; targets are joined against the raw corpus.
inline SingleClusterEvaluation evaluate_single_cluster_suite(
    const Corpus& corpus, const ClusteringModel& model, std::size_t cluster_index,
    const std::string& label, const std::vector<PerformanceTable>& perf_tables,
    TargetTransform transform, const ForestConfig& config, std::size_t threads = 1) {
    require(model.assignments.size() == corpus.records.size(),
            "single-cluster evaluation: model was not fitted on this corpus");
    require(cluster_index < model.k, "single-cluster evaluation: cluster index out of range");
    require(!perf_tables.empty(), "single-cluster evaluation: no performance tables");

    SingleClusterEvaluation out;
    out.train_label = label;
    out.test_suites = corpus.suite_ids;
    for (const auto& perf : perf_tables) {
        const LabeledCorpus labeled = join_targets(corpus, perf, transform);
        std::vector<std::vector<double>> train_features;
        std::vector<double> train_targets;
        for (std::size_t i = 0; i < labeled.corpus.records.size(); ++i) {
            if (model.assignments[labeled.source_rows[i]] != cluster_index) continue;
            train_features.push_back(labeled.corpus.records[i].features);
            train_targets.push_back(labeled.targets[i]);
        }
        require(train_features.size() >= 2, "single-cluster evaluation: cluster " +
                                                std::to_string(cluster_index) +
                                                " has fewer than 2 labeled records for algorithm '" +
                                                perf.algorithm + "'");
        const ForestModel forest = fit_forest(train_features, train_targets, config, label, threads);

        std::vector<double> row;
        for (const auto& suite : corpus.suite_ids) {
            const LabeledCorpus slice = labeled.restrict_to_suite(suite);
            row.push_back(mdae(predict(forest, slice.corpus.feature_matrix()), slice.targets));
        }
        out.algorithms.push_back(perf.algorithm);
        out.mdae_values.push_back(std::move(row));
    }
    return out;
}

}  // namespace suitesim

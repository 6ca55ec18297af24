#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "suitesim/analysis.hpp"
#include "suitesim/artifacts.hpp"
#include "suitesim/corpus.hpp"
#include "suitesim/coverage.hpp"
#include "suitesim/error.hpp"
#include "suitesim/forest.hpp"
#include "suitesim/kmeans.hpp"
#include "suitesim/svg.hpp"

namespace suitesim {

struct KSelectionConfig {
    std::optional<std::size_t> fixed_k;
    KSelectionMethod method = KSelectionMethod::silhouette;
    std::optional<std::size_t> k_min;
    std::optional<std::size_t> k_max;  // default range: [2, min(20, N/5)]

    void validate() const {
        if (fixed_k) {
            require(!k_min && !k_max, "fixed_k and (k_min, k_max) are mutually exclusive");
            require(*fixed_k >= 2, "k must be >= 2");
        }
    }
};

/// One auditable record of everything a run depends on. Flags override the
/// JSON config; the seed is always explicit.
struct PipelineConfig {
    std::string features_path;
    std::string performance_path;
    std::string algorithm;
    TargetTransform transform = TargetTransform::raw;
    bool normalize = true;
    KSelectionConfig kselect;
    ForestConfig forest;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::size_t threads = 1;  // execution detail; never part of artifact identity

    // optional single-cluster-suite evaluation (bs6_eval.csv)
    std::optional<std::size_t> bs6_cluster;
    std::string bs6_label = "BS6";
    std::vector<std::string> bs6_algorithms;
};

namespace detail {

struct ClusteredCorpus {
    Corpus raw;
    ClusteringModel model;
    CoverageMatrix cov;
    std::optional<KSelectionReport> selection;
};

inline ClusteredCorpus load_and_cluster(const std::string& features_path, bool normalize,
                                        const KSelectionConfig& kselect, std::uint64_t seed) {
    kselect.validate();
    ClusteredCorpus out;
    out.raw = load_feature_table(features_path);
    require(out.raw.suite_ids.size() >= 2, "need at least 2 suites");

    Points points;
    if (normalize) {
        points = normalize_features(out.raw).first.feature_matrix();
    } else {
        points = out.raw.feature_matrix();
    }

    if (kselect.fixed_k) {
        require(*kselect.fixed_k <= points.size(), "k exceeds number of instances");
        out.model = kmeans_fit(points, *kselect.fixed_k, seed);
    } else {
        const std::size_t n = points.size();
        const std::size_t k_min = kselect.k_min.value_or(2);
        const std::size_t default_max = std::min<std::size_t>(20, n / 5);
        const std::size_t k_max = kselect.k_max.value_or(std::max(k_min + 2, default_max));
        auto [model, report] = select_k(points, k_min, k_max, kselect.method, seed);
        out.model = std::move(model);
        out.selection = std::move(report);
    }
    out.cov = coverage_matrix(out.raw.suite_labels(), out.model.assignments, out.model.k);
    return out;
}

inline void stage_similarity_artifacts(artifacts::Stage& stage, const CoverageMatrix& cov,
                                       const SimilarityMatrix& sim, const Dendrogram& dendro) {
    stage.add("coverage.csv", artifacts::coverage_csv(cov));
    stage.add("similarity.csv", artifacts::similarity_csv(sim));
    stage.add("similarity.svg", svg::similarity_heatmap(sim, leaf_order(dendro)));
    stage.add("dendrogram.svg", svg::dendrogram_figure(dendro));
}

}  // namespace detail

/// Full workflow: load -> normalize -> cluster -> coverage -> similarity +
/// dendrogram -> join targets -> cross-suite evaluation -> report. Returns the
/// manifest that was written alongside the artifacts.
inline artifacts::json run_pipeline(const PipelineConfig& config) {
    require(config.seed.has_value(), "seed is required");
    require(!config.out_dir.empty(), "output directory is required");
    require(!config.algorithm.empty(), "algorithm name is required");
    config.forest.validate();

    detail::ClusteredCorpus clustered = detail::load_and_cluster(
        config.features_path, config.normalize, config.kselect, *config.seed);
    const SimilarityMatrix sim = similarity_matrix(clustered.cov);
    const Dendrogram dendro = agglomerate(sim);

    const PerformanceTable perf = load_performance_table(config.performance_path, config.algorithm);
    const LabeledCorpus labeled = join_targets(clustered.raw, perf, config.transform);
    require(labeled.corpus.suite_ids.size() >= 2, "need at least 2 suites with targets");

    ForestConfig forest = config.forest;
    forest.seed = derive_seed(*config.seed, 0x666F7265ull);  // dedicated forest stream
    const EvaluationMatrix eval = cross_suite_evaluate(labeled, forest, config.threads);
    const Report report = generalizability_report(sim, eval);

    artifacts::Stage stage;
    detail::stage_similarity_artifacts(stage, clustered.cov, sim, dendro);
    stage.add("model.json", artifacts::model_json(clustered.model).dump(2) + "\n");
    stage.add("mdae.csv", artifacts::mdae_csv(eval));
    stage.add("report.json", artifacts::report_json(report).dump(2) + "\n");
    stage.add("kselection.csv", clustered.selection
                                    ? artifacts::kselection_csv(*clustered.selection)
                                    : artifacts::fixed_kselection_csv(clustered.model.k));

    if (config.bs6_cluster) {
        std::vector<std::string> algorithms = config.bs6_algorithms;
        if (algorithms.empty()) algorithms.push_back(config.algorithm);
        std::vector<PerformanceTable> tables;
        tables.reserve(algorithms.size());
        for (const auto& name : algorithms) {
            tables.push_back(load_performance_table(config.performance_path, name));
        }
        const SingleClusterEvaluation bs6 = evaluate_single_cluster_suite(
            clustered.raw, clustered.model, *config.bs6_cluster, config.bs6_label, tables,
            config.transform, forest, config.threads);
        stage.add("bs6_eval.csv", artifacts::single_cluster_csv(bs6));
    }

    artifacts::json manifest;
    manifest["inputs"] = {{"features", config.features_path},
                          {"performance", config.performance_path}};
    manifest["algorithm"] = config.algorithm;
    manifest["target_transform"] = to_string(config.transform);
    manifest["normalize"] = config.normalize;
    manifest["seed"] = *config.seed;
    manifest["chosen_k"] = clustered.model.k;
    manifest["unmatched_records"] = labeled.unmatched_count;
    return stage.commit(config.out_dir, manifest);
}

struct SimilarityOnlyConfig {
    std::string features_path;   // exactly one of features_path /
    std::string coverage_path;   // coverage_path must be set
    bool normalize = true;
    KSelectionConfig kselect;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

/// Feature-space half of the workflow, without performance data. With
/// --coverage, clustering is bypassed and the precomputed matrix is used
/// directly (rows renormalized; cosine is scale-invariant).
inline artifacts::json run_similarity_only(const SimilarityOnlyConfig& config) {
    require(!config.out_dir.empty(), "output directory is required");
    require(config.features_path.empty() != config.coverage_path.empty(),
            "exactly one of a features file or a coverage file is required");

    artifacts::Stage stage;
    artifacts::json manifest;
    CoverageMatrix cov;
    std::size_t chosen_k = 0;

    if (!config.coverage_path.empty()) {
        cov = artifacts::read_coverage_csv(config.coverage_path);
        require(cov.suite_ids.size() >= 2, "need at least 2 suites");
        chosen_k = cov.k;
        manifest["inputs"] = {{"coverage", config.coverage_path}};
    } else {
        require(config.seed.has_value(), "seed is required");
        detail::ClusteredCorpus clustered = detail::load_and_cluster(
            config.features_path, config.normalize, config.kselect, *config.seed);
        cov = clustered.cov;
        chosen_k = clustered.model.k;
        stage.add("model.json", artifacts::model_json(clustered.model).dump(2) + "\n");
        stage.add("kselection.csv", clustered.selection
                                        ? artifacts::kselection_csv(*clustered.selection)
                                        : artifacts::fixed_kselection_csv(clustered.model.k));
        manifest["inputs"] = {{"features", config.features_path}};
        manifest["normalize"] = config.normalize;
        manifest["seed"] = *config.seed;
    }

    const SimilarityMatrix sim = similarity_matrix(cov);
    const Dendrogram dendro = agglomerate(sim);
    detail::stage_similarity_artifacts(stage, cov, sim, dendro);

    manifest["chosen_k"] = chosen_k;
    return stage.commit(config.out_dir, manifest);
}

}  // namespace suitesim

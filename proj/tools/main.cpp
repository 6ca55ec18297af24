// suitesim: estimate whether an algorithm-performance model trained on one
// benchmark suite will transfer to another. Subcommands cover the individual
// pipeline stages so each one can be driven and tested on its own files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "suitesim/suitesim.hpp"

namespace {

using suitesim::ValidationError;
using json = nlohmann::ordered_json;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    suitesim::require(in.good(), "cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": invalid JSON: " + e.what());
    }
}

void reject_unknown_keys(const json& doc, const std::vector<std::string>& known,
                         const std::string& context) {
    for (const auto& [key, value] : doc.items()) {
        bool ok = false;
        for (const auto& name : known) ok = ok || key == name;
        suitesim::require(ok, context + ": unknown key '" + key + "'");
    }
}

suitesim::ForestConfig forest_from_json(const json& doc) {
    reject_unknown_keys(doc,
                        {"tree_count", "bootstrap", "split_candidate_fraction",
                         "min_samples_split", "min_samples_leaf", "max_depth"},
                        "forest config");
    suitesim::ForestConfig config;
    if (doc.contains("tree_count")) config.tree_count = doc.at("tree_count").get<std::size_t>();
    if (doc.contains("bootstrap")) config.bootstrap = doc.at("bootstrap").get<bool>();
    if (doc.contains("split_candidate_fraction"))
        config.split_candidate_fraction = doc.at("split_candidate_fraction").get<double>();
    if (doc.contains("min_samples_split"))
        config.min_samples_split = doc.at("min_samples_split").get<std::size_t>();
    if (doc.contains("min_samples_leaf"))
        config.min_samples_leaf = doc.at("min_samples_leaf").get<std::size_t>();
    if (doc.contains("max_depth") && !doc.at("max_depth").is_null())
        config.max_depth = doc.at("max_depth").get<std::size_t>();
    return config;
}

suitesim::KSelectionConfig kselect_from_json(const json& doc) {
    reject_unknown_keys(doc, {"method", "k_min", "k_max", "fixed_k"}, "k_selection config");
    suitesim::KSelectionConfig config;
    if (doc.contains("method"))
        config.method = suitesim::k_selection_method_from_string(doc.at("method").get<std::string>());
    if (doc.contains("k_min") && !doc.at("k_min").is_null())
        config.k_min = doc.at("k_min").get<std::size_t>();
    if (doc.contains("k_max") && !doc.at("k_max").is_null())
        config.k_max = doc.at("k_max").get<std::size_t>();
    if (doc.contains("fixed_k") && !doc.at("fixed_k").is_null())
        config.fixed_k = doc.at("fixed_k").get<std::size_t>();
    return config;
}

suitesim::PipelineConfig pipeline_from_json(const json& doc) {
    reject_unknown_keys(doc,
                        {"features", "performance", "algorithm", "target_transform", "normalize",
                         "k_selection", "forest", "seed", "out", "bs6"},
                        "pipeline config");
    suitesim::PipelineConfig config;
    if (doc.contains("features")) config.features_path = doc.at("features").get<std::string>();
    if (doc.contains("performance")) config.performance_path = doc.at("performance").get<std::string>();
    if (doc.contains("algorithm")) config.algorithm = doc.at("algorithm").get<std::string>();
    if (doc.contains("target_transform"))
        config.transform =
            suitesim::target_transform_from_string(doc.at("target_transform").get<std::string>());
    if (doc.contains("normalize")) config.normalize = doc.at("normalize").get<bool>();
    if (doc.contains("k_selection")) config.kselect = kselect_from_json(doc.at("k_selection"));
    if (doc.contains("forest")) config.forest = forest_from_json(doc.at("forest"));
    if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("out")) config.out_dir = doc.at("out").get<std::string>();
    if (doc.contains("bs6")) {
        const json& bs6 = doc.at("bs6");
        reject_unknown_keys(bs6, {"cluster", "label", "algorithms"}, "bs6 config");
        config.bs6_cluster = bs6.at("cluster").get<std::size_t>();
        if (bs6.contains("label")) config.bs6_label = bs6.at("label").get<std::string>();
        if (bs6.contains("algorithms"))
            config.bs6_algorithms = bs6.at("algorithms").get<std::vector<std::string>>();
    }
    return config;
}

suitesim::SyntheticSpec synth_spec_from_json(const json& doc) {
    reject_unknown_keys(doc,
                        {"cluster_centers", "cluster_spread", "target_rules", "suites", "seed",
                         "algorithm"},
                        "synthetic spec");
    suitesim::SyntheticSpec spec;
    spec.cluster_centers = doc.at("cluster_centers").get<std::vector<std::vector<double>>>();
    if (doc.contains("cluster_spread")) spec.cluster_spread = doc.at("cluster_spread").get<double>();
    for (const json& rule_doc : doc.at("target_rules")) {
        reject_unknown_keys(rule_doc, {"weights", "offset", "noise_scale"}, "target rule");
        suitesim::TargetRule rule;
        rule.weights = rule_doc.at("weights").get<std::vector<double>>();
        if (rule_doc.contains("offset")) rule.offset = rule_doc.at("offset").get<double>();
        if (rule_doc.contains("noise_scale")) rule.noise_scale = rule_doc.at("noise_scale").get<double>();
        spec.target_rules.push_back(std::move(rule));
    }
    for (const json& suite_doc : doc.at("suites")) {
        reject_unknown_keys(suite_doc, {"label", "weights", "count"}, "synthetic suite");
        suitesim::SuiteMixture suite;
        suite.label = suite_doc.at("label").get<std::string>();
        suite.weights = suite_doc.at("weights").get<std::vector<double>>();
        suite.instance_count = suite_doc.at("count").get<std::size_t>();
        spec.suites.push_back(std::move(suite));
    }
    if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("algorithm")) spec.algorithm = doc.at("algorithm").get<std::string>();
    return spec;
}

// Flag bundle shared by the subcommands that train forests.
struct ForestFlags {
    std::optional<std::size_t> trees;
    std::optional<bool> bootstrap;
    std::optional<double> split_fraction;
    std::optional<std::size_t> min_split;
    std::optional<std::size_t> min_leaf;
    std::optional<std::size_t> max_depth;

    void attach(CLI::App* cmd) {
        cmd->add_option("--trees", trees, "Number of trees (default 100)");
        cmd->add_option("--bootstrap", bootstrap, "Bootstrap resampling on/off (default on)");
        cmd->add_option("--split-fraction", split_fraction,
                        "Fraction of features considered per split (default 1.0)");
        cmd->add_option("--min-split", min_split, "Minimum samples to split a node (default 2)");
        cmd->add_option("--min-leaf", min_leaf, "Minimum samples per leaf (default 1)");
        cmd->add_option("--max-depth", max_depth, "Maximum tree depth (default unlimited)");
    }

    void apply(suitesim::ForestConfig& config) const {
        if (trees) config.tree_count = *trees;
        if (bootstrap) config.bootstrap = *bootstrap;
        if (split_fraction) config.split_candidate_fraction = *split_fraction;
        if (min_split) config.min_samples_split = *min_split;
        if (min_leaf) config.min_samples_leaf = *min_leaf;
        if (max_depth) config.max_depth = *max_depth;
    }
};

struct KSelectFlags {
    std::optional<std::string> method;
    std::optional<std::size_t> k_min;
    std::optional<std::size_t> k_max;
    std::optional<std::size_t> fixed_k;

    void attach(CLI::App* cmd) {
        cmd->add_option("--method", method, "K selection: silhouette or elbow-distortion");
        cmd->add_option("--k-min", k_min, "Smallest candidate k (default 2)");
        cmd->add_option("--k-max", k_max, "Largest candidate k (default min(20, N/5))");
        cmd->add_option("--fixed-k", fixed_k, "Skip selection and use this k");
    }

    void apply(suitesim::KSelectionConfig& config) const {
        if (method) config.method = suitesim::k_selection_method_from_string(*method);
        if (k_min) config.k_min = *k_min;
        if (k_max) config.k_max = *k_max;
        if (fixed_k) {
            config.fixed_k = *fixed_k;
            config.k_min.reset();
            config.k_max.reset();
        }
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Benchmark suite similarity and performance-model generalizability"};
    app.require_subcommand(1);

    // ---- pipeline -----------------------------------------------------------
    auto* pipeline_cmd = app.add_subcommand(
        "pipeline", "Full workflow: cluster, coverage, similarity, evaluate, report");
    std::string config_path, features, performance, algorithm, transform, out_dir;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
    bool no_normalize = false;
    KSelectFlags kselect_flags;
    ForestFlags forest_flags;
    std::optional<std::size_t> bs6_cluster;
    std::string bs6_label;
    std::vector<std::string> bs6_algorithms;
    pipeline_cmd->add_option("--config", config_path, "JSON config file; flags override it");
    pipeline_cmd->add_option("--features", features, "features.csv path");
    pipeline_cmd->add_option("--performance", performance, "performance.csv path");
    pipeline_cmd->add_option("--algorithm", algorithm, "Algorithm whose precision to model");
    pipeline_cmd->add_option("--transform", transform, "Target transform: raw or log10-floored");
    pipeline_cmd->add_flag("--no-normalize", no_normalize, "Cluster raw (unnormalized) features");
    pipeline_cmd->add_option("--seed", seed, "Master seed (required, 64-bit unsigned)");
    pipeline_cmd->add_option("--out", out_dir, "Output directory");
    pipeline_cmd->add_option("--threads", threads, "Worker threads (results identical)");
    pipeline_cmd->add_option("--bs6-cluster", bs6_cluster,
                             "Also evaluate a suite built from this cluster index");
    pipeline_cmd->add_option("--bs6-label", bs6_label, "Label for the single-cluster suite");
    pipeline_cmd->add_option("--bs6-algorithms", bs6_algorithms,
                             "Algorithms for the single-cluster evaluation rows");
    kselect_flags.attach(pipeline_cmd);
    forest_flags.attach(pipeline_cmd);

    // ---- similarity ----------------------------------------------------------
    auto* similarity_cmd = app.add_subcommand(
        "similarity", "Feature-space half only: coverage, similarity, figures");
    std::string sim_features, sim_coverage, sim_out;
    std::optional<std::uint64_t> sim_seed;
    bool sim_no_normalize = false;
    KSelectFlags sim_kselect_flags;
    similarity_cmd->add_option("--features", sim_features, "features.csv path");
    similarity_cmd->add_option("--coverage", sim_coverage,
                               "Precomputed coverage.csv; bypasses clustering");
    similarity_cmd->add_flag("--no-normalize", sim_no_normalize, "Cluster raw features");
    similarity_cmd->add_option("--seed", sim_seed, "Master seed");
    similarity_cmd->add_option("--out", sim_out, "Output directory");
    sim_kselect_flags.attach(similarity_cmd);

    // ---- evaluate -------------------------------------------------------------
    auto* evaluate_cmd = app.add_subcommand(
        "evaluate", "Cross-suite random-forest evaluation (mdae.csv)");
    std::string eval_features, eval_performance, eval_algorithm, eval_transform, eval_out;
    std::optional<std::uint64_t> eval_seed;
    std::size_t eval_threads = 1;
    ForestFlags eval_forest_flags;
    evaluate_cmd->add_option("--features", eval_features, "features.csv path")->required();
    evaluate_cmd->add_option("--performance", eval_performance, "performance.csv path")->required();
    evaluate_cmd->add_option("--algorithm", eval_algorithm, "Algorithm to model")->required();
    evaluate_cmd->add_option("--transform", eval_transform, "raw or log10-floored");
    evaluate_cmd->add_option("--seed", eval_seed, "Master seed (required)");
    evaluate_cmd->add_option("--threads", eval_threads, "Worker threads");
    evaluate_cmd->add_option("--out", eval_out, "Output directory")->required();
    eval_forest_flags.attach(evaluate_cmd);

    // ---- report ----------------------------------------------------------------
    auto* report_cmd = app.add_subcommand(
        "report", "Generalizability report from similarity.csv and mdae.csv");
    std::string report_similarity, report_mdae, report_out;
    report_cmd->add_option("--similarity", report_similarity, "similarity.csv path")->required();
    report_cmd->add_option("--mdae", report_mdae, "mdae.csv path")->required();
    report_cmd->add_option("--out", report_out, "Output directory")->required();

    // ---- synth -------------------------------------------------------------------
    auto* synth_cmd = app.add_subcommand(
        "synth", "Generate a synthetic features.csv and performance.csv");
    std::string synth_spec_path, synth_out;
    std::optional<std::uint64_t> synth_seed;
    synth_cmd->add_option("--spec", synth_spec_path, "Synthetic spec JSON")->required();
    synth_cmd->add_option("--seed", synth_seed, "Override the spec's seed");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();

    // ---- mis-select -----------------------------------------------------------------
    auto* mis_cmd = app.add_subcommand(
        "mis-select", "Build suites via greedy maximal independent sets");
    std::string mis_features, mis_out, mis_prefix = "MIS";
    double mis_threshold = 0.9;
    std::size_t mis_runs = 5;
    std::optional<std::uint64_t> mis_seed;
    mis_cmd->add_option("--features", mis_features, "features.csv path")->required();
    mis_cmd->add_option("--threshold", mis_threshold, "Edge threshold on cosine similarity");
    mis_cmd->add_option("--runs", mis_runs, "Number of independent selections");
    mis_cmd->add_option("--prefix", mis_prefix, "Suite label prefix (default MIS)");
    mis_cmd->add_option("--seed", mis_seed, "Master seed (required)");
    mis_cmd->add_option("--out", mis_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (pipeline_cmd->parsed()) {
        suitesim::PipelineConfig config;
        if (!config_path.empty()) config = pipeline_from_json(load_json_file(config_path));
        if (!features.empty()) config.features_path = features;
        if (!performance.empty()) config.performance_path = performance;
        if (!algorithm.empty()) config.algorithm = algorithm;
        if (!transform.empty()) config.transform = suitesim::target_transform_from_string(transform);
        if (no_normalize) config.normalize = false;
        if (seed) config.seed = *seed;
        if (!out_dir.empty()) config.out_dir = out_dir;
        config.threads = threads;
        kselect_flags.apply(config.kselect);
        forest_flags.apply(config.forest);
        if (bs6_cluster) config.bs6_cluster = *bs6_cluster;
        if (!bs6_label.empty()) config.bs6_label = bs6_label;
        if (!bs6_algorithms.empty()) config.bs6_algorithms = bs6_algorithms;
        const json manifest = suitesim::run_pipeline(config);
        std::cout << manifest.dump(2) << "\n";
        return 0;
    }

    if (similarity_cmd->parsed()) {
        suitesim::SimilarityOnlyConfig config;
        config.features_path = sim_features;
        config.coverage_path = sim_coverage;
        config.normalize = !sim_no_normalize;
        config.seed = sim_seed;
        config.out_dir = sim_out;
        sim_kselect_flags.apply(config.kselect);
        const json manifest = suitesim::run_similarity_only(config);
        std::cout << manifest.dump(2) << "\n";
        return 0;
    }

    if (evaluate_cmd->parsed()) {
        suitesim::require(eval_seed.has_value(), "seed is required");
        const suitesim::Corpus corpus = suitesim::load_feature_table(eval_features);
        const suitesim::PerformanceTable perf =
            suitesim::load_performance_table(eval_performance, eval_algorithm);
        const suitesim::TargetTransform transform_value =
            eval_transform.empty() ? suitesim::TargetTransform::raw
                                   : suitesim::target_transform_from_string(eval_transform);
        const suitesim::LabeledCorpus labeled = join_targets(corpus, perf, transform_value);
        suitesim::ForestConfig forest;
        eval_forest_flags.apply(forest);
        forest.seed = suitesim::derive_seed(*eval_seed, 0x666F7265ull);
        const suitesim::EvaluationMatrix eval =
            suitesim::cross_suite_evaluate(labeled, forest, eval_threads);

        suitesim::artifacts::Stage stage;
        stage.add("mdae.csv", suitesim::artifacts::mdae_csv(eval));
        json manifest;
        manifest["inputs"] = {{"features", eval_features}, {"performance", eval_performance}};
        manifest["algorithm"] = eval_algorithm;
        manifest["target_transform"] = to_string(transform_value);
        manifest["seed"] = *eval_seed;
        manifest["unmatched_records"] = labeled.unmatched_count;
        std::cout << stage.commit(eval_out, manifest).dump(2) << "\n";
        return 0;
    }

    if (report_cmd->parsed()) {
        const suitesim::SimilarityMatrix sim =
            suitesim::artifacts::read_similarity_csv(report_similarity);
        const suitesim::EvaluationMatrix eval = suitesim::artifacts::read_mdae_csv(report_mdae);
        const suitesim::Report report = suitesim::generalizability_report(sim, eval);

        suitesim::artifacts::Stage stage;
        stage.add("report.json", suitesim::artifacts::report_json(report).dump(2) + "\n");
        json manifest;
        manifest["inputs"] = {{"similarity", report_similarity}, {"mdae", report_mdae}};
        std::cout << stage.commit(report_out, manifest).dump(2) << "\n";
        return 0;
    }

    if (synth_cmd->parsed()) {
        suitesim::SyntheticSpec spec = synth_spec_from_json(load_json_file(synth_spec_path));
        if (synth_seed) spec.seed = *synth_seed;
        const suitesim::SyntheticCorpus synth = suitesim::synth_corpus(spec);

        std::string perf_csv = suitesim::csv::join_row({"suite", "instance_id", "algorithm", "precision"});
        for (std::size_t i = 0; i < synth.labeled.corpus.records.size(); ++i) {
            const auto& record = synth.labeled.corpus.records[i];
            const double target = synth.labeled.targets[i];
            suitesim::require(target >= 0.0,
                              "synthetic target for (" + record.suite_id + ", " + record.instance_id +
                                  ") is negative; precision values must be nonnegative (raise the "
                                  "target rule offsets)");
            perf_csv += suitesim::csv::join_row({record.suite_id, record.instance_id,
                                                 synth.labeled.algorithm,
                                                 suitesim::csv::format_fixed(target)});
        }

        suitesim::artifacts::Stage stage;
        stage.add("features.csv", suitesim::artifacts::features_csv(synth.labeled.corpus));
        stage.add("performance.csv", perf_csv);
        json manifest;
        manifest["inputs"] = {{"spec", synth_spec_path}};
        manifest["seed"] = spec.seed;
        manifest["algorithm"] = synth.labeled.algorithm;
        std::cout << stage.commit(synth_out, manifest).dump(2) << "\n";
        return 0;
    }

    if (mis_cmd->parsed()) {
        suitesim::require(mis_seed.has_value(), "seed is required");
        const suitesim::Corpus corpus = suitesim::load_feature_table(mis_features);
        const auto suites =
            suitesim::mis_select_suites(corpus, mis_threshold, mis_runs, *mis_seed);

        suitesim::Corpus selected;
        selected.feature_names = corpus.feature_names;
        for (std::size_t run = 0; run < suites.size(); ++run) {
            const std::string label = mis_prefix + std::to_string(run + 1);
            selected.suite_ids.push_back(label);
            for (const std::size_t index : suites[run]) {
                suitesim::InstanceRecord record = corpus.records[index];
                record.instance_id = record.suite_id + "/" + record.instance_id;
                record.suite_id = label;
                selected.records.push_back(std::move(record));
            }
        }

        suitesim::artifacts::Stage stage;
        stage.add("mis_suites.csv", suitesim::artifacts::features_csv(selected));
        json manifest;
        manifest["inputs"] = {{"features", mis_features}};
        manifest["threshold"] = mis_threshold;
        manifest["runs"] = mis_runs;
        manifest["seed"] = *mis_seed;
        std::cout << stage.commit(mis_out, manifest).dump(2) << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const suitesim::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

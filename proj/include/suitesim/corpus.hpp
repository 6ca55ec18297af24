#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "suitesim/csv.hpp"
#include "suitesim/error.hpp"

namespace suitesim {

/// One problem instance: a suite label, an id unique within the suite, and an
/// n-dimensional landscape feature vector.
struct InstanceRecord {
    std::string suite_id;
    std::string instance_id;
    std::vector<double> features;
};

/// The union of all loaded benchmark suites. Records keep file order;
/// suite_ids keep first-appearance order.
struct Corpus {
    std::vector<std::string> feature_names;
    std::vector<std::string> suite_ids;
    std::vector<InstanceRecord> records;

    std::size_t feature_count() const { return feature_names.size(); }

    std::vector<std::vector<double>> feature_matrix() const {
        std::vector<std::vector<double>> rows;
        rows.reserve(records.size());
        for (const auto& r : records) rows.push_back(r.features);
        return rows;
    }

    std::vector<std::string> suite_labels() const {
        std::vector<std::string> labels;
        labels.reserve(records.size());
        for (const auto& r : records) labels.push_back(r.suite_id);
        return labels;
    }
};

/// Precision (error to the global optimum) per (suite, instance) for one algorithm.
struct PerformanceTable {
    std::string algorithm;
    std::map<std::pair<std::string, std::string>, double> entries;
};

/// Fitted z-score parameters. Applying them to new data reproduces the
/// transform bit-for-bit; zero-variance features are dropped, not zeroed.
struct NormalizationParams {
    std::vector<std::string> feature_names;  // retained, output order
    std::vector<double> location;
    std::vector<double> scale;  // > 0
    std::vector<std::string> dropped_features;
};

enum class TargetTransform { raw, log10_floored };

/// Floor used by the log10 transform; the solver tolerance of the ingested
/// performance data.
inline constexpr double kPrecisionFloor = 1e-8;

inline std::string to_string(TargetTransform t) {
    return t == TargetTransform::raw ? "raw" : "log10-floored";
}

inline TargetTransform target_transform_from_string(const std::string& name) {
    if (name == "raw") return TargetTransform::raw;
    if (name == "log10-floored") return TargetTransform::log10_floored;
    throw ValidationError("unknown target transform '" + name + "' (expected raw or log10-floored)");
}

/// Corpus records joined with regression targets. Records without a matching
/// performance entry are excluded; their count is reported in unmatched_count.
/// source_rows maps each labeled record back to its row in the input corpus.
struct LabeledCorpus {
    Corpus corpus;
    std::vector<double> targets;
    std::string algorithm;
    TargetTransform transform = TargetTransform::raw;
    std::size_t unmatched_count = 0;
    std::vector<std::size_t> source_rows;

    /// New LabeledCorpus containing only the records of one suite.
    LabeledCorpus restrict_to_suite(const std::string& suite) const {
        LabeledCorpus out;
        out.corpus.feature_names = corpus.feature_names;
        out.algorithm = algorithm;
        out.transform = transform;
        for (std::size_t i = 0; i < corpus.records.size(); ++i) {
            if (corpus.records[i].suite_id != suite) continue;
            out.corpus.records.push_back(corpus.records[i]);
            out.targets.push_back(targets[i]);
            out.source_rows.push_back(source_rows.empty() ? i : source_rows[i]);
        }
        require(!out.corpus.records.empty(), "empty suite: " + suite);
        out.corpus.suite_ids = {suite};
        return out;
    }
};

namespace detail {

inline std::string row_context(const csv::Table& table, std::size_t row, const std::string& column) {
    return "(" + table.path + " line " + std::to_string(table.line_numbers[row]) +
           ", column '" + column + "')";
}

}  // namespace detail

/// Loads features.csv: header `suite,instance_id,<f1>,...,<fn>`, one row per
/// instance. Rejects duplicate keys, non-numeric and non-finite cells.
inline Corpus load_feature_table(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    require(table.header.size() >= 3,
            path + ": header must be suite,instance_id,<feature columns>");
    require(table.header[0] == "suite" && table.header[1] == "instance_id",
            path + ": header must start with suite,instance_id");

    Corpus corpus;
    corpus.feature_names.assign(table.header.begin() + 2, table.header.end());
    {
        std::set<std::string> seen;
        for (const auto& name : corpus.feature_names) {
            require(!name.empty(), path + ": empty feature column name");
            require(seen.insert(name).second, path + ": duplicate header column '" + name + "'");
        }
        require(seen.count("suite") == 0 && seen.count("instance_id") == 0,
                path + ": duplicate header column");
    }
    require(!table.rows.empty(), path + ": no data rows");

    const std::size_t n = corpus.feature_names.size();
    std::set<std::pair<std::string, std::string>> keys;
    std::set<std::string> suites_seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        require(row.size() == n + 2,
                path + " line " + std::to_string(table.line_numbers[r]) + ": expected " +
                    std::to_string(n + 2) + " fields, got " + std::to_string(row.size()));
        InstanceRecord record;
        record.suite_id = row[0];
        record.instance_id = row[1];
        require(!record.suite_id.empty() && !record.instance_id.empty(),
                path + " line " + std::to_string(table.line_numbers[r]) + ": empty suite or instance_id");
        require(keys.insert({record.suite_id, record.instance_id}).second,
                "duplicate instance key (" + record.suite_id + ", " + record.instance_id + ") in " + path);
        record.features.reserve(n);
        for (std::size_t c = 0; c < n; ++c) {
            record.features.push_back(
                csv::parse_double(row[c + 2], detail::row_context(table, r, corpus.feature_names[c])));
        }
        if (suites_seen.insert(record.suite_id).second) corpus.suite_ids.push_back(record.suite_id);
        corpus.records.push_back(std::move(record));
    }
    return corpus;
}

/// Loads performance.csv (`suite,instance_id,algorithm,precision`) filtered to
/// one algorithm. Precision must be a nonnegative finite real.
inline PerformanceTable load_performance_table(const std::string& path, const std::string& algorithm) {
    const csv::Table table = csv::read_file(path);
    require(table.header == std::vector<std::string>{"suite", "instance_id", "algorithm", "precision"},
            path + ": header must be suite,instance_id,algorithm,precision");
    require(!algorithm.empty(), "algorithm name must not be empty");

    PerformanceTable perf;
    perf.algorithm = algorithm;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        require(row.size() == 4, path + " line " + std::to_string(table.line_numbers[r]) +
                                     ": expected 4 fields, got " + std::to_string(row.size()));
        if (row[2] != algorithm) continue;
        const double precision =
            csv::parse_double(row[3], detail::row_context(table, r, "precision"));
        require(precision >= 0.0, "negative precision " + row[3] + " " +
                                      detail::row_context(table, r, "precision"));
        const auto key = std::make_pair(row[0], row[1]);
        require(perf.entries.emplace(key, precision).second,
                "duplicate performance entry (" + row[0] + ", " + row[1] + ", " + algorithm + ") in " + path);
    }
    require(!perf.entries.empty(), "no entries for algorithm '" + algorithm + "' in " + path);
    return perf;
}

/// Z-score standardization over the union of all loaded suites, sample
/// standard deviation (divide by N-1), so output columns have sample mean 0
/// and sample std 1. Zero-variance columns are dropped.
inline std::pair<Corpus, NormalizationParams> normalize_features(const Corpus& corpus) {
    require(!corpus.records.empty(), "cannot normalize an empty corpus");
    const std::size_t n = corpus.feature_count();
    const double count = static_cast<double>(corpus.records.size());

    NormalizationParams params;
    std::vector<std::size_t> retained_columns;
    for (std::size_t c = 0; c < n; ++c) {
        double sum = 0.0;
        for (const auto& r : corpus.records) sum += r.features[c];
        const double mean = sum / count;
        double sse = 0.0;
        for (const auto& r : corpus.records) {
            const double d = r.features[c] - mean;
            sse += d * d;
        }
        if (sse == 0.0) {
            params.dropped_features.push_back(corpus.feature_names[c]);
            continue;
        }
        retained_columns.push_back(c);
        params.feature_names.push_back(corpus.feature_names[c]);
        params.location.push_back(mean);
        params.scale.push_back(std::sqrt(sse / (count - 1.0)));
    }
    require(!retained_columns.empty(), "no informative features: every column has zero variance");

    Corpus out;
    out.feature_names = params.feature_names;
    out.suite_ids = corpus.suite_ids;
    out.records.reserve(corpus.records.size());
    for (const auto& r : corpus.records) {
        InstanceRecord rec;
        rec.suite_id = r.suite_id;
        rec.instance_id = r.instance_id;
        rec.features.reserve(retained_columns.size());
        for (std::size_t i = 0; i < retained_columns.size(); ++i) {
            rec.features.push_back((r.features[retained_columns[i]] - params.location[i]) /
                                   params.scale[i]);
        }
        out.records.push_back(std::move(rec));
    }
    return {std::move(out), std::move(params)};
}

/// Applies fitted parameters to (possibly new) data. Columns are matched by
/// name; dropped features are ignored if present.
inline Corpus apply_normalization(const Corpus& corpus, const NormalizationParams& params) {
    std::vector<std::size_t> source_columns;
    source_columns.reserve(params.feature_names.size());
    for (const auto& name : params.feature_names) {
        const auto it = std::find(corpus.feature_names.begin(), corpus.feature_names.end(), name);
        require(it != corpus.feature_names.end(), "feature '" + name + "' missing from corpus");
        source_columns.push_back(static_cast<std::size_t>(it - corpus.feature_names.begin()));
    }
    Corpus out;
    out.feature_names = params.feature_names;
    out.suite_ids = corpus.suite_ids;
    out.records.reserve(corpus.records.size());
    for (const auto& r : corpus.records) {
        InstanceRecord rec{r.suite_id, r.instance_id, {}};
        rec.features.reserve(source_columns.size());
        for (std::size_t i = 0; i < source_columns.size(); ++i) {
            rec.features.push_back((r.features[source_columns[i]] - params.location[i]) /
                                   params.scale[i]);
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

/// Inverts apply_normalization on the retained columns.
inline Corpus denormalize_features(const Corpus& corpus, const NormalizationParams& params) {
    require(corpus.feature_names == params.feature_names,
            "denormalize: corpus columns do not match normalization params");
    Corpus out = corpus;
    for (auto& r : out.records) {
        for (std::size_t i = 0; i < r.features.size(); ++i) {
            r.features[i] = r.features[i] * params.scale[i] + params.location[i];
        }
    }
    return out;
}

/// Joins performance targets onto corpus records by (suite, instance_id).
/// Unmatched records are dropped and counted; key order follows the corpus.
inline LabeledCorpus join_targets(const Corpus& corpus, const PerformanceTable& perf,
                                  TargetTransform transform) {
    LabeledCorpus out;
    out.corpus.feature_names = corpus.feature_names;
    out.algorithm = perf.algorithm;
    out.transform = transform;

    std::set<std::string> suites_seen;
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        const auto& rec = corpus.records[i];
        const auto it = perf.entries.find({rec.suite_id, rec.instance_id});
        if (it == perf.entries.end()) {
            ++out.unmatched_count;
            continue;
        }
        double target = it->second;
        if (transform == TargetTransform::log10_floored) {
            target = std::log10(std::max(target, kPrecisionFloor));
        }
        out.corpus.records.push_back(rec);
        out.targets.push_back(target);
        out.source_rows.push_back(i);
        if (suites_seen.insert(rec.suite_id).second) out.corpus.suite_ids.push_back(rec.suite_id);
    }
    require(!out.corpus.records.empty(), "disjoint keys: no (suite, instance) match between corpus and performance table");
    return out;
}

}  // namespace suitesim

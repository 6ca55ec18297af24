#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "suitesim/analysis.hpp"
#include "suitesim/corpus.hpp"
#include "suitesim/coverage.hpp"
#include "suitesim/csv.hpp"
#include "suitesim/error.hpp"
#include "suitesim/forest.hpp"
#include "suitesim/kmeans.hpp"

namespace suitesim {
namespace artifacts {

using json = nlohmann::ordered_json;

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    ensure(ctx != nullptr, "sha256: EVP context allocation failed");
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, digest, &length) == 1;
    EVP_MD_CTX_free(ctx);
    ensure(ok, "sha256: digest computation failed");
    static const char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

// ---- CSV serializations ----------------------------------------------------

inline std::string coverage_csv(const CoverageMatrix& cov) {
    std::vector<std::string> header{"suite"};
    for (std::size_t c = 0; c < cov.k; ++c) header.push_back("C" + std::to_string(c + 1));
    std::string out = csv::join_row(header);
    for (std::size_t s = 0; s < cov.suite_ids.size(); ++s) {
        std::vector<std::string> row{cov.suite_ids[s]};
        for (double v : cov.rows[s]) row.push_back(csv::format_fixed(v));
        out += csv::join_row(row);
    }
    return out;
}

inline std::string similarity_csv(const SimilarityMatrix& sim) {
    std::vector<std::string> header{"suite"};
    header.insert(header.end(), sim.suite_ids.begin(), sim.suite_ids.end());
    std::string out = csv::join_row(header);
    for (std::size_t i = 0; i < sim.suite_ids.size(); ++i) {
        std::vector<std::string> row{sim.suite_ids[i]};
        for (double v : sim.values[i]) row.push_back(csv::format_fixed(v));
        out += csv::join_row(row);
    }
    return out;
}

inline std::string mdae_csv(const EvaluationMatrix& eval) {
    std::vector<std::string> header{"suite"};
    header.insert(header.end(), eval.test_suites.begin(), eval.test_suites.end());
    header.push_back("train");
    std::string out = csv::join_row(header);
    for (std::size_t i = 0; i < eval.train_suites.size(); ++i) {
        std::vector<std::string> row{eval.train_suites[i]};
        for (double v : eval.mdae_values[i]) row.push_back(csv::format_fixed(v));
        row.push_back(csv::format_fixed(eval.train_mdae[i]));
        out += csv::join_row(row);
    }
    return out;
}

inline std::string kselection_csv(const KSelectionReport& report) {
    std::string out = csv::join_row({"method", "k", "score", "chosen"});
    const std::string method = to_string(report.method);
    for (std::size_t i = 0; i < report.candidate_ks.size(); ++i) {
        out += csv::join_row({method, std::to_string(report.candidate_ks[i]),
                              csv::format_fixed(report.scores[i]),
                              report.candidate_ks[i] == report.chosen_k ? "1" : "0"});
    }
    return out;
}

inline std::string fixed_kselection_csv(std::size_t k) {
    std::string out = csv::join_row({"method", "k", "score", "chosen"});
    out += csv::join_row({"fixed", std::to_string(k), "", "1"});
    return out;
}

inline std::string single_cluster_csv(const SingleClusterEvaluation& eval) {
    std::vector<std::string> header{"algorithm"};
    header.insert(header.end(), eval.test_suites.begin(), eval.test_suites.end());
    std::string out = csv::join_row(header);
    for (std::size_t a = 0; a < eval.algorithms.size(); ++a) {
        std::vector<std::string> row{eval.algorithms[a]};
        for (double v : eval.mdae_values[a]) row.push_back(csv::format_fixed(v));
        out += csv::join_row(row);
    }
    return out;
}

inline std::string features_csv(const Corpus& corpus) {
    std::vector<std::string> header{"suite", "instance_id"};
    header.insert(header.end(), corpus.feature_names.begin(), corpus.feature_names.end());
    std::string out = csv::join_row(header);
    for (const auto& record : corpus.records) {
        std::vector<std::string> row{record.suite_id, record.instance_id};
        for (double v : record.features) row.push_back(csv::format_fixed(v));
        out += csv::join_row(row);
    }
    return out;
}

// ---- readers for artifact round-trips --------------------------------------

/// Reads a coverage.csv-shaped file (header `suite,C1..Ck`). Rows are
/// renormalized to sum exactly 1 so tables rounded to two decimals (the shape
/// published tables come in) load cleanly; cosine similarity is unaffected by
/// the rescale. Rejects negative entries and all-zero rows.
inline CoverageMatrix read_coverage_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    require(table.header.size() >= 2 && table.header[0] == "suite",
            path + ": header must be suite,C1,...,Ck");
    CoverageMatrix cov;
    cov.k = table.header.size() - 1;
    require(!table.rows.empty(), path + ": no data rows");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        require(row.size() == cov.k + 1, path + " line " + std::to_string(table.line_numbers[r]) +
                                             ": expected " + std::to_string(cov.k + 1) + " fields");
        require(!row[0].empty(), path + ": empty suite label");
        for (const auto& existing : cov.suite_ids) {
            require(existing != row[0], path + ": duplicate suite '" + row[0] + "'");
        }
        std::vector<double> values;
        double total = 0.0;
        for (std::size_t c = 1; c < row.size(); ++c) {
            const double v = csv::parse_double(
                row[c], "(" + path + " line " + std::to_string(table.line_numbers[r]) + ", column '" +
                            table.header[c] + "')");
            require(v >= 0.0, path + ": negative coverage entry in suite '" + row[0] + "'");
            values.push_back(v);
            total += v;
        }
        require(total > 0.0, path + ": all-zero coverage row for suite '" + row[0] + "'");
        for (double& v : values) v /= total;
        cov.suite_ids.push_back(row[0]);
        cov.rows.push_back(std::move(values));
    }
    return cov;
}

/// Reads a similarity.csv written by this tool (suite header row and column).
inline SimilarityMatrix read_similarity_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    require(table.header.size() >= 3 && table.header[0] == "suite",
            path + ": header must be suite,<suite ids>");
    SimilarityMatrix sim;
    sim.suite_ids.assign(table.header.begin() + 1, table.header.end());
    require(table.rows.size() == sim.suite_ids.size(), path + ": matrix must be square");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        require(row.size() == sim.suite_ids.size() + 1 && row[0] == sim.suite_ids[r],
                path + ": row labels must match the header order");
        std::vector<double> values;
        for (std::size_t c = 1; c < row.size(); ++c) {
            values.push_back(csv::parse_double(
                row[c],
                "(" + path + " line " + std::to_string(table.line_numbers[r]) + ")"));
        }
        sim.values.push_back(std::move(values));
    }
    return sim;
}

/// Reads an mdae.csv written by this tool (train rows, test columns, trailing
/// `train` column).
inline EvaluationMatrix read_mdae_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    require(table.header.size() >= 3 && table.header[0] == "suite" && table.header.back() == "train",
            path + ": header must be suite,<test suites>,train");
    EvaluationMatrix eval;
    eval.test_suites.assign(table.header.begin() + 1, table.header.end() - 1);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        require(row.size() == eval.test_suites.size() + 2,
                path + " line " + std::to_string(table.line_numbers[r]) + ": wrong field count");
        eval.train_suites.push_back(row[0]);
        std::vector<double> values;
        for (std::size_t c = 1; c + 1 < row.size(); ++c) {
            values.push_back(csv::parse_double(
                row[c], "(" + path + " line " + std::to_string(table.line_numbers[r]) + ")"));
        }
        eval.mdae_values.push_back(std::move(values));
        eval.train_mdae.push_back(csv::parse_double(
            row.back(), "(" + path + " line " + std::to_string(table.line_numbers[r]) + ")"));
    }
    require(!eval.train_suites.empty(), path + ": no data rows");
    return eval;
}

// ---- JSON serializations ---------------------------------------------------

inline json report_json(const Report& report) {
    json doc;
    doc["suites"] = json::array();
    for (const auto& row : report.per_suite) {
        json entry;
        entry["suite"] = row.suite;
        entry["test_suites"] = row.test_suites;
        entry["similarity"] = row.similarity_row;
        entry["mdae"] = row.mdae_row;
        if (row.rank_correlation) {
            entry["rank_correlation"] = *row.rank_correlation;
        } else {
            entry["rank_correlation"] = nullptr;
        }
        entry["verdict"] = to_string(row.verdict);
        doc["suites"].push_back(std::move(entry));
    }
    if (report.median_correlation) {
        doc["median_rank_correlation"] = *report.median_correlation;
    } else {
        doc["median_rank_correlation"] = nullptr;
    }
    return doc;
}

inline json model_json(const ClusteringModel& model) {
    json doc;
    doc["k"] = model.k;
    doc["seed"] = model.seed;
    doc["inertia"] = model.inertia;
    doc["centroids"] = model.centroids;
    doc["assignments"] = model.assignments;
    return doc;
}

// ---- staged output ----------------------------------------------------------

/// In-memory artifact set, flushed atomically: everything is serialized
/// first, then each file is written to a temp name and renamed into place.
/// Failures before commit() leave no partial artifacts behind.
class Stage {
public:
    void add(const std::string& name, std::string bytes) {
        ensure(files_.emplace(name, std::move(bytes)).second,
               "artifact staged twice: " + name);
    }

    bool has(const std::string& name) const { return files_.count(name) > 0; }

    const std::map<std::string, std::string>& files() const { return files_; }

    /// Hashes every staged artifact into the manifest, stages the manifest,
    /// then writes the whole set into out_dir. Returns the final manifest.
    json commit(const std::filesystem::path& out_dir, json manifest) {
        json hashes;
        for (const auto& [name, bytes] : files_) hashes[name] = sha256_hex(bytes);
        manifest["artifacts"] = std::move(hashes);
        add("manifest.json", manifest.dump(2) + "\n");

        std::filesystem::create_directories(out_dir);
        for (const auto& [name, bytes] : files_) {
            const std::filesystem::path final_path = out_dir / name;
            const std::filesystem::path temp_path = out_dir / (name + ".tmp");
            {
                std::ofstream out(temp_path, std::ios::binary | std::ios::trunc);
                require(out.good(), "cannot write " + temp_path.string());
                out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
                require(out.good(), "write failed for " + temp_path.string());
            }
            std::filesystem::rename(temp_path, final_path);
        }
        return manifest;
    }

private:
    std::map<std::string, std::string> files_;
};

}  // namespace artifacts
}  // namespace suitesim

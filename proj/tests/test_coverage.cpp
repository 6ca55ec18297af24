#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "suitesim/artifacts.hpp"
#include "suitesim/coverage.hpp"
#include "test_support.hpp"

using namespace suitesim;
using test_support::oracle_cosine;

namespace {

CoverageMatrix table1() {
    return artifacts::read_coverage_csv(std::string(SUITESIM_DATA_DIR) + "/table1_coverage.csv");
}

CoverageMatrix table2() {
    return artifacts::read_coverage_csv(std::string(SUITESIM_DATA_DIR) + "/table2_coverage.csv");
}

}  // namespace

TEST_CASE("coverage matrix counts cluster occupancy per suite", "[coverage]") {
    SECTION("one suite, half and half") {
        const CoverageMatrix cov = coverage_matrix({"S", "S", "S", "S"}, {0, 0, 1, 1}, 2);
        REQUIRE(cov.rows.size() == 1);
        CHECK(cov.rows[0] == std::vector<double>{0.5, 0.5});
    }
    SECTION("all seven instances in cluster 0 of 3") {
        const std::vector<std::string> labels(7, "S");
        const std::vector<std::size_t> assignments(7, 0);
        const CoverageMatrix cov = coverage_matrix(labels, assignments, 3);
        CHECK(cov.rows[0] == std::vector<double>{1.0, 0.0, 0.0});
    }
    SECTION("assignment out of range") {
        CHECK_THROWS_AS(coverage_matrix({"S"}, {2}, 2), ValidationError);
    }
    SECTION("suite order is first appearance") {
        const CoverageMatrix cov = coverage_matrix({"B", "A", "B"}, {0, 1, 1}, 2);
        CHECK(cov.suite_ids == std::vector<std::string>{"B", "A"});
        CHECK(cov.rows[0] == std::vector<double>{0.5, 0.5});
    }
}

TEST_CASE("shipped first-experiment coverage fixture matches the published rows", "[coverage]") {
    const CoverageMatrix cov = table1();
    REQUIRE(cov.suite_ids ==
            std::vector<std::string>{"BBOB", "CEC2013", "CEC2014", "CEC2015", "CEC2017"});
    REQUIRE(cov.k == 13);
    const std::vector<double> bbob{0.04, 0.47, 0.08, 0.00, 0.03, 0.08, 0.06,
                                   0.00, 0.00, 0.00, 0.18, 0.04, 0.02};
    for (std::size_t c = 0; c < 13; ++c) {
        CHECK(cov.rows[0][c] == Catch::Approx(bbob[c]).margin(1e-12));
    }
}

TEST_CASE("cosine similarity basics and fixture values", "[coverage]") {
    SECTION("identical vectors") { CHECK(cosine_similarity({1.0, 0.0}, {1.0, 0.0}) == 1.0); }
    SECTION("orthogonal vectors") { CHECK(cosine_similarity({1.0, 0.0}, {0.0, 1.0}) == 0.0); }
    SECTION("zero vector is an error") {
        CHECK_THROWS_WITH(cosine_similarity({0.0, 0.0}, {1.0, 0.0}),
                          Catch::Matchers::ContainsSubstring("undefined for zero vector"));
    }
    SECTION("first-experiment BBOB vs CEC2013 is about 0.109") {
        const CoverageMatrix cov = table1();
        const double value = cosine_similarity(cov.rows[0], cov.rows[1]);
        CHECK(value == Catch::Approx(0.109).margin(0.005));
        CHECK(value == Catch::Approx(oracle_cosine(cov.rows[0], cov.rows[1])).margin(1e-12));
    }
    SECTION("second-experiment BS1 vs BS2 is about 0.985") {
        const CoverageMatrix cov = table2();
        const double value = cosine_similarity(cov.rows[0], cov.rows[1]);
        CHECK(value == Catch::Approx(0.985).margin(0.005));
        CHECK(value == Catch::Approx(oracle_cosine(cov.rows[0], cov.rows[1])).margin(1e-12));
    }
}

TEST_CASE("similarity matrix over the fixtures", "[coverage]") {
    SECTION("identical rows give off-diagonal 1") {
        CoverageMatrix cov;
        cov.suite_ids = {"A", "B"};
        cov.k = 2;
        cov.rows = {{0.5, 0.5}, {0.5, 0.5}};
        const SimilarityMatrix sim = similarity_matrix(cov);
        CHECK(sim.values[0][1] == Catch::Approx(1.0).margin(1e-12));
        CHECK(sim.values[0][0] == 1.0);
    }
    SECTION("first experiment: CEC pairs above 0.5, BBOB pairs below 0.5") {
        const SimilarityMatrix sim = similarity_matrix(table1());
        for (std::size_t i = 1; i < 5; ++i) {
            for (std::size_t j = i + 1; j < 5; ++j) {
                CHECK(sim.values[i][j] > 0.5);
            }
            CHECK(sim.values[0][i] < 0.5);
            CHECK(sim.values[0][i] == Catch::Approx(0.10).margin(0.03));  // all about 0.08-0.12
        }
    }
    SECTION("second experiment: every off-diagonal pair above 0.98") {
        const SimilarityMatrix sim = similarity_matrix(table2());
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) {
                if (i != j) CHECK(sim.values[i][j] > 0.98);
            }
        }
    }
    SECTION("fewer than two suites is an error") {
        CoverageMatrix cov;
        cov.suite_ids = {"A"};
        cov.k = 1;
        cov.rows = {{1.0}};
        CHECK_THROWS_AS(similarity_matrix(cov), ValidationError);
    }
}

TEST_CASE("agglomeration over the fixtures", "[coverage]") {
    SECTION("identical coverage rows merge at distance 0") {
        CoverageMatrix cov;
        cov.suite_ids = {"A", "B"};
        cov.k = 2;
        cov.rows = {{0.25, 0.75}, {0.25, 0.75}};
        const Dendrogram dendro = agglomerate(similarity_matrix(cov));
        REQUIRE(dendro.merges.size() == 1);
        CHECK(dendro.merges[0].distance == Catch::Approx(0.0).margin(1e-12));
        CHECK(dendro.merges[0].size == 2);
    }
    SECTION("first experiment: CEC2014 and CEC2017 merge first, BBOB last") {
        const SimilarityMatrix sim = similarity_matrix(table1());

        // oracle: exhaustive max over pairwise cosines
        double best = -1.0;
        std::pair<std::size_t, std::size_t> best_pair{0, 0};
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = i + 1; j < 5; ++j) {
                if (sim.values[i][j] > best) {
                    best = sim.values[i][j];
                    best_pair = {i, j};
                }
            }
        }
        CHECK(sim.suite_ids[best_pair.first] == "CEC2014");
        CHECK(sim.suite_ids[best_pair.second] == "CEC2017");
        CHECK(best == Catch::Approx(0.93).margin(0.01));

        const Dendrogram dendro = agglomerate(sim);
        CHECK(dendro.merges[0].left == 2);   // CEC2014
        CHECK(dendro.merges[0].right == 4);  // CEC2017
        // BBOB (leaf 0) joins only in the final merge
        for (std::size_t i = 0; i + 1 < dendro.merges.size(); ++i) {
            CHECK(dendro.merges[i].left != 0);
            CHECK(dendro.merges[i].right != 0);
        }
        CHECK(dendro.merges.back().left == 0);
    }
    SECTION("an orthogonal suite merges last") {
        CoverageMatrix cov;
        cov.suite_ids = {"X", "A", "B"};
        cov.k = 2;
        cov.rows = {{0.0, 1.0}, {1.0, 0.0}, {1.0, 0.0}};
        const Dendrogram dendro = agglomerate(similarity_matrix(cov));
        REQUIRE(dendro.merges.size() == 2);
        CHECK(dendro.merges[0].left == 1);
        CHECK(dendro.merges[0].right == 2);
        CHECK(dendro.merges[1].left == 0);  // X joins at the root
        CHECK(dendro.merges[1].right == 3);
    }
    SECTION("merge distances are non-decreasing") {
        RngStream rng(4096);
        CoverageMatrix cov;
        cov.k = 6;
        for (int s = 0; s < 8; ++s) {
            cov.suite_ids.push_back("S" + std::to_string(s));
            std::vector<double> row(cov.k);
            double total = 0.0;
            for (double& v : row) {
                v = rng.uniform_double();
                total += v;
            }
            for (double& v : row) v /= total;
            cov.rows.push_back(std::move(row));
        }
        const Dendrogram dendro = agglomerate(similarity_matrix(cov));
        for (std::size_t i = 1; i < dendro.merges.size(); ++i) {
            CHECK(dendro.merges[i].distance >= dendro.merges[i - 1].distance - 1e-12);
        }
    }
}

TEST_CASE("leaf order is a deterministic traversal", "[coverage]") {
    SECTION("two suites return the root's children in order") {
        CoverageMatrix cov;
        cov.suite_ids = {"A", "B"};
        cov.k = 2;
        cov.rows = {{1.0, 0.0}, {0.0, 1.0}};
        const Dendrogram dendro = agglomerate(similarity_matrix(cov));
        CHECK(leaf_order(dendro) == std::vector<std::string>{"A", "B"});
    }
    SECTION("first experiment puts BBOB at one extreme") {
        const Dendrogram dendro = agglomerate(similarity_matrix(table1()));
        const auto order = leaf_order(dendro);
        REQUIRE(order.size() == 5);
        CHECK((order.front() == "BBOB" || order.back() == "BBOB"));
    }
    SECTION("order is a permutation of the suite ids") {
        const Dendrogram dendro = agglomerate(similarity_matrix(table2()));
        auto order = leaf_order(dendro);
        auto expected = table2().suite_ids;
        std::sort(order.begin(), order.end());
        std::sort(expected.begin(), expected.end());
        CHECK(order == expected);
    }
}

TEST_CASE("coverage and similarity invariants", "[coverage]") {
    RngStream rng(2024);

    SECTION("coverage rows are probability vectors") {
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<std::string> labels;
            std::vector<std::size_t> assignments;
            const std::size_t k = 2 + rng.uniform_index(6);
            const std::size_t suites = 2 + rng.uniform_index(4);
            for (std::size_t s = 0; s < suites; ++s) {
                const std::size_t count = 1 + rng.uniform_index(20);
                for (std::size_t i = 0; i < count; ++i) {
                    labels.push_back("S" + std::to_string(s));
                    assignments.push_back(rng.uniform_index(k));
                }
            }
            const CoverageMatrix cov = coverage_matrix(labels, assignments, k);
            for (const auto& row : cov.rows) {
                double total = 0.0;
                for (double v : row) {
                    CHECK(v >= 0.0);
                    total += v;
                }
                CHECK(total == Catch::Approx(1.0).margin(1e-9));
            }
        }
    }
    SECTION("cosine is symmetric, scale-invariant, and in [0,1] for nonnegative input") {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> u(5), v(5);
            for (std::size_t i = 0; i < 5; ++i) {
                u[i] = rng.uniform_double();
                v[i] = rng.uniform_double();
            }
            const double uv = cosine_similarity(u, v);
            CHECK(uv == cosine_similarity(v, u));
            CHECK(uv >= 0.0);
            CHECK(uv <= 1.0 + 1e-15);
            const double alpha = 0.1 + 10.0 * rng.uniform_double();
            std::vector<double> scaled = u;
            for (double& x : scaled) x *= alpha;
            CHECK(std::abs(cosine_similarity(scaled, v) - uv) < 1e-12);
        }
    }
    SECTION("permuting suites permutes the similarity matrix and relabels the dendrogram") {
        const CoverageMatrix cov = table1();
        CoverageMatrix permuted;
        permuted.k = cov.k;
        const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
        for (std::size_t i : perm) {
            permuted.suite_ids.push_back(cov.suite_ids[i]);
            permuted.rows.push_back(cov.rows[i]);
        }

        const SimilarityMatrix sim = similarity_matrix(cov);
        const SimilarityMatrix sim_permuted = similarity_matrix(permuted);
        for (std::size_t i = 0; i < perm.size(); ++i) {
            for (std::size_t j = 0; j < perm.size(); ++j) {
                CHECK(sim_permuted.values[i][j] == sim.values[perm[i]][perm[j]]);
            }
        }

        // dendrogram topology: same merge label-sets at the same distances
        const auto merge_sets = [](const Dendrogram& dendro) {
            std::vector<std::set<std::string>> sets(dendro.leaf_ids.size() + dendro.merges.size());
            for (std::size_t i = 0; i < dendro.leaf_ids.size(); ++i) sets[i] = {dendro.leaf_ids[i]};
            std::vector<std::pair<std::set<std::string>, double>> out;
            for (std::size_t i = 0; i < dendro.merges.size(); ++i) {
                const auto& rec = dendro.merges[i];
                std::set<std::string> merged = sets[rec.left];
                merged.insert(sets[rec.right].begin(), sets[rec.right].end());
                sets[dendro.leaf_ids.size() + i] = merged;
                out.push_back({merged, rec.distance});
            }
            return out;
        };
        const auto original = merge_sets(agglomerate(sim));
        const auto relabeled = merge_sets(agglomerate(sim_permuted));
        REQUIRE(original.size() == relabeled.size());
        for (std::size_t i = 0; i < original.size(); ++i) {
            CHECK(original[i].first == relabeled[i].first);
            CHECK(original[i].second == Catch::Approx(relabeled[i].second).margin(1e-12));
        }
    }
}

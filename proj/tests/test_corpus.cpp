#include <catch2/catch_amalgamated.hpp>

#include "suitesim/corpus.hpp"
#include "test_support.hpp"

using namespace suitesim;
using test_support::TempDir;
using test_support::write_file;

namespace {

const char* kSmallFeatures =
    "suite,instance_id,f1,f2,f3,f4\n"
    "S1,i1,0.1,1.0,5.0,-2.0\n"
    "S1,i2,0.2,2.0,5.0,-1.0\n"
    "S1,i3,0.3,3.0,5.0,0.0\n"
    "S2,i1,0.4,4.0,5.0,1.0\n"
    "S2,i2,0.5,5.0,5.0,2.0\n"
    "S2,i3,0.6,6.0,5.0,3.0\n";

}  // namespace

TEST_CASE("feature table loads with suites, features and records intact", "[corpus]") {
    TempDir dir("corpus");
    const auto path = write_file(dir.path() / "features.csv", kSmallFeatures);
    const Corpus corpus = load_feature_table(path);

    CHECK(corpus.suite_ids == std::vector<std::string>{"S1", "S2"});
    CHECK(corpus.feature_count() == 4);
    CHECK(corpus.records.size() == 6);
    CHECK(corpus.records[0].suite_id == "S1");
    CHECK(corpus.records[3].suite_id == "S2");
    CHECK(corpus.records[5].features == std::vector<double>{0.6, 6.0, 5.0, 3.0});

    SECTION("row-count conservation: one record per data row") {
        std::size_t data_rows = 0;
        for (const char* p = kSmallFeatures; *p; ++p) data_rows += (*p == '\n') ? 1 : 0;
        CHECK(corpus.records.size() == data_rows - 1);
    }
}

TEST_CASE("feature table rejects malformed input", "[corpus]") {
    TempDir dir("corpus");

    SECTION("duplicate instance key") {
        const auto path = write_file(dir.path() / "dup.csv",
                                     "suite,instance_id,f1\nS1,i1,0.5\nS1,i1,0.7\n");
        CHECK_THROWS_WITH(load_feature_table(path),
                          Catch::Matchers::ContainsSubstring("duplicate instance key"));
    }
    SECTION("NaN cell names row and column") {
        const auto path = write_file(dir.path() / "nan.csv",
                                     "suite,instance_id,f1,f2\nS1,i1,0.5,0.1\nS1,i2,NaN,0.2\n");
        try {
            load_feature_table(path);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            CHECK(what.find("line 3") != std::string::npos);
            CHECK(what.find("f1") != std::string::npos);
        }
    }
    SECTION("non-numeric cell") {
        const auto path = write_file(dir.path() / "bad.csv",
                                     "suite,instance_id,f1\nS1,i1,abc\n");
        CHECK_THROWS_WITH(load_feature_table(path),
                          Catch::Matchers::ContainsSubstring("non-numeric"));
    }
    SECTION("infinite cell rejected") {
        const auto path = write_file(dir.path() / "inf.csv",
                                     "suite,instance_id,f1\nS1,i1,inf\n");
        CHECK_THROWS_AS(load_feature_table(path), ValidationError);
    }
    SECTION("duplicate header column") {
        const auto path = write_file(dir.path() / "duphdr.csv",
                                     "suite,instance_id,f1,f1\nS1,i1,1,2\n");
        CHECK_THROWS_WITH(load_feature_table(path),
                          Catch::Matchers::ContainsSubstring("duplicate header column"));
    }
    SECTION("missing key columns") {
        const auto path = write_file(dir.path() / "nokey.csv", "a,b,c\n1,2,3\n");
        CHECK_THROWS_AS(load_feature_table(path), ValidationError);
    }
    SECTION("empty file") {
        const auto path = write_file(dir.path() / "empty.csv", "");
        CHECK_THROWS_WITH(load_feature_table(path), Catch::Matchers::ContainsSubstring("empty file"));
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_feature_table(dir.file("nope.csv")), ValidationError);
    }
    SECTION("short row") {
        const auto path = write_file(dir.path() / "short.csv",
                                     "suite,instance_id,f1,f2\nS1,i1,0.5\n");
        CHECK_THROWS_AS(load_feature_table(path), ValidationError);
    }
    SECTION("CRLF line endings and blank lines load cleanly") {
        const auto path = write_file(dir.path() / "crlf.csv",
                                     "suite,instance_id,f1\r\nS1,i1,0.5\r\n\r\nS1,i2,0.7\r\n");
        const Corpus corpus = load_feature_table(path);
        CHECK(corpus.records.size() == 2);
        CHECK(corpus.records[1].features[0] == 0.7);
    }
}

TEST_CASE("performance table filters by algorithm and validates precision", "[corpus]") {
    TempDir dir("corpus");
    const auto path = write_file(dir.path() / "perf.csv",
                                 "suite,instance_id,algorithm,precision\n"
                                 "S1,i1,CMA,0.5\n"
                                 "S1,i1,DE,0.9\n"
                                 "S1,i2,CMA,0.0\n"
                                 "S2,i1,DE,1.5\n");

    SECTION("only requested algorithm retained") {
        const PerformanceTable perf = load_performance_table(path, "CMA");
        CHECK(perf.entries.size() == 2);
        CHECK(perf.entries.at({"S1", "i1"}) == 0.5);
        CHECK(perf.entries.at({"S1", "i2"}) == 0.0);
    }
    SECTION("negative precision rejected") {
        const auto bad = write_file(dir.path() / "neg.csv",
                                    "suite,instance_id,algorithm,precision\nS1,i1,CMA,-1.0\n");
        CHECK_THROWS_WITH(load_performance_table(bad, "CMA"),
                          Catch::Matchers::ContainsSubstring("negative precision"));
    }
    SECTION("unknown algorithm yields empty-table error") {
        CHECK_THROWS_WITH(load_performance_table(path, "RSPSO"),
                          Catch::Matchers::ContainsSubstring("no entries for algorithm"));
    }
    SECTION("malformed row rejected") {
        const auto bad = write_file(dir.path() / "mal.csv",
                                    "suite,instance_id,algorithm,precision\nS1,i1,CMA\n");
        CHECK_THROWS_AS(load_performance_table(bad, "CMA"), ValidationError);
    }
}

TEST_CASE("z-score normalization over the union", "[corpus]") {
    Corpus corpus;
    corpus.feature_names = {"a", "b"};
    corpus.suite_ids = {"S"};
    corpus.records = {{"S", "i1", {1.0, 5.0}}, {"S", "i2", {2.0, 5.0}}, {"S", "i3", {3.0, 5.0}}};

    const auto [normalized, params] = normalize_features(corpus);

    SECTION("column {1,2,3} maps to -1, 0, 1 (location 2, scale 1)") {
        REQUIRE(normalized.feature_names == std::vector<std::string>{"a"});
        CHECK(normalized.records[0].features[0] == Catch::Approx(-1.0).margin(1e-12));
        CHECK(normalized.records[1].features[0] == Catch::Approx(0.0).margin(1e-12));
        CHECK(normalized.records[2].features[0] == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("constant column dropped and reported") {
        CHECK(params.dropped_features == std::vector<std::string>{"b"});
    }
    SECTION("output columns have sample mean 0 and sample std 1") {
        std::vector<double> column;
        for (const auto& r : normalized.records) column.push_back(r.features[0]);
        CHECK(std::abs(test_support::mean(column)) < 1e-9);
        double sse = 0.0;
        for (double v : column) sse += v * v;
        CHECK(std::abs(std::sqrt(sse / static_cast<double>(column.size() - 1)) - 1.0) < 1e-9);
    }
    SECTION("params reproduce the transform bit-identically") {
        const Corpus again = apply_normalization(corpus, params);
        REQUIRE(again.records.size() == normalized.records.size());
        for (std::size_t i = 0; i < again.records.size(); ++i) {
            CHECK(again.records[i].features == normalized.records[i].features);
        }
    }
    SECTION("denormalization recovers the retained columns") {
        const Corpus back = denormalize_features(normalized, params);
        for (std::size_t i = 0; i < back.records.size(); ++i) {
            CHECK(back.records[i].features[0] ==
                  Catch::Approx(corpus.records[i].features[0]).margin(1e-9));
        }
    }
    SECTION("normalizing a normalized corpus is the identity up to 1e-9") {
        const auto [twice, params2] = normalize_features(normalized);
        for (std::size_t i = 0; i < params2.location.size(); ++i) {
            CHECK(std::abs(params2.location[i]) < 1e-9);
            CHECK(std::abs(params2.scale[i] - 1.0) < 1e-9);
        }
        for (std::size_t i = 0; i < twice.records.size(); ++i) {
            for (std::size_t d = 0; d < twice.records[i].features.size(); ++d) {
                CHECK(twice.records[i].features[d] ==
                      Catch::Approx(normalized.records[i].features[d]).margin(1e-9));
            }
        }
    }
    SECTION("all-constant corpus is an error") {
        Corpus flat;
        flat.feature_names = {"a"};
        flat.suite_ids = {"S"};
        flat.records = {{"S", "i1", {5.0}}, {"S", "i2", {5.0}}};
        CHECK_THROWS_WITH(normalize_features(flat),
                          Catch::Matchers::ContainsSubstring("no informative features"));
    }
}

TEST_CASE("join_targets matches, transforms and reports", "[corpus]") {
    TempDir dir("corpus");
    const auto fpath = write_file(dir.path() / "features.csv", kSmallFeatures);
    const Corpus corpus = load_feature_table(fpath);

    SECTION("full match keeps all records in corpus order") {
        std::string perf_csv = "suite,instance_id,algorithm,precision\n";
        for (const auto& r : corpus.records) {
            perf_csv += r.suite_id + "," + r.instance_id + ",CMA,1.5\n";
        }
        const auto ppath = write_file(dir.path() / "perf.csv", perf_csv);
        const LabeledCorpus labeled =
            join_targets(corpus, load_performance_table(ppath, "CMA"), TargetTransform::raw);
        CHECK(labeled.targets.size() == 6);
        CHECK(labeled.unmatched_count == 0);
        CHECK(labeled.targets[0] == 1.5);
        CHECK(labeled.source_rows == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
    }
    SECTION("log10-floored maps zero precision to -8") {
        const auto ppath = write_file(dir.path() / "perf0.csv",
                                      "suite,instance_id,algorithm,precision\nS1,i1,CMA,0.0\n");
        const LabeledCorpus labeled =
            join_targets(corpus, load_performance_table(ppath, "CMA"), TargetTransform::log10_floored);
        REQUIRE(labeled.targets.size() == 1);
        CHECK(labeled.targets[0] == Catch::Approx(-8.0).margin(1e-12));
    }
    SECTION("partial match reports unmatched count and never invents records") {
        const auto ppath = write_file(dir.path() / "perf4.csv",
                                      "suite,instance_id,algorithm,precision\n"
                                      "S1,i1,CMA,1.0\nS1,i2,CMA,2.0\nS2,i1,CMA,3.0\nS2,i3,CMA,4.0\n");
        const LabeledCorpus labeled =
            join_targets(corpus, load_performance_table(ppath, "CMA"), TargetTransform::raw);
        CHECK(labeled.targets.size() == 4);
        CHECK(labeled.unmatched_count == 2);
        CHECK(labeled.targets.size() + labeled.unmatched_count == corpus.records.size());
    }
    SECTION("disjoint keys is an error") {
        const auto ppath = write_file(dir.path() / "perfx.csv",
                                      "suite,instance_id,algorithm,precision\nSX,i1,CMA,1.0\n");
        CHECK_THROWS_WITH(
            join_targets(corpus, load_performance_table(ppath, "CMA"), TargetTransform::raw),
            Catch::Matchers::ContainsSubstring("disjoint keys"));
    }
    SECTION("restrict_to_suite slices in order") {
        std::string perf_csv = "suite,instance_id,algorithm,precision\n";
        for (const auto& r : corpus.records) {
            perf_csv += r.suite_id + "," + r.instance_id + ",CMA,2.0\n";
        }
        const auto ppath = write_file(dir.path() / "perf_all.csv", perf_csv);
        const LabeledCorpus labeled =
            join_targets(corpus, load_performance_table(ppath, "CMA"), TargetTransform::raw);
        const LabeledCorpus s2 = labeled.restrict_to_suite("S2");
        CHECK(s2.corpus.records.size() == 3);
        CHECK(s2.corpus.suite_ids == std::vector<std::string>{"S2"});
        CHECK_THROWS_AS(labeled.restrict_to_suite("SX"), ValidationError);
    }
}

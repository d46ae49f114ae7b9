#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "phq/deep.hpp"
#include "phq/errors.hpp"

using namespace phq;
namespace tu = testutil;

TEST_CASE("ingest accepts commas, spaces, and tabs") {
    tu::TempDir dir("deep");

    tu::write_file(dir.path() / "subjA_t1.csv", "1.5,2.5,3.5\n-1,0,1\n");
    auto m = ingest_deep_features(dir.path() / "subjA_t1.csv");
    CHECK(m.sample_id == "subjA_t1");
    CHECK(m.dims == 3);
    CHECK(m.rows() == 2);
    CHECK(m.at(0, 1) == 2.5);
    CHECK(m.at(1, 0) == -1.0);

    tu::write_file(dir.path() / "ws.txt", "  1.5 2.5\t3.5 \n-1\t0  1\n\n");
    const auto w = ingest_deep_features(dir.path() / "ws.txt");
    CHECK(w.dims == 3);
    CHECK(w.rows() == 2);
    CHECK(w.values == m.values);

    // scientific notation and CRLF line endings
    tu::write_file(dir.path() / "sci.csv", "1e-3,2E2\r\n-3.25e+1,0.5\r\n");
    const auto s = ingest_deep_features(dir.path() / "sci.csv");
    CHECK(s.at(0, 0) == 1e-3);
    CHECK(s.at(0, 1) == 200.0);
    CHECK(s.at(1, 0) == -32.5);
}

TEST_CASE("ingest rejects broken matrices") {
    tu::TempDir dir("deepbad");

    tu::write_file(dir.path() / "ragged.csv", "1,2,3\n4,5\n");
    CHECK_THROWS_AS(ingest_deep_features(dir.path() / "ragged.csv"), FormatError);

    tu::write_file(dir.path() / "alpha.csv", "1,2\n3,oops\n");
    CHECK_THROWS_AS(ingest_deep_features(dir.path() / "alpha.csv"), FormatError);

    tu::write_file(dir.path() / "empty.csv", "");
    CHECK_THROWS_AS(ingest_deep_features(dir.path() / "empty.csv"), EmptyInputError);

    tu::write_file(dir.path() / "blank.csv", "\n\n  \n");
    CHECK_THROWS_AS(ingest_deep_features(dir.path() / "blank.csv"), EmptyInputError);

    CHECK_THROWS(ingest_deep_features(dir.path() / "missing.csv"));
}

TEST_CASE("aggregate of a single row is the row with zero spread") {
    DeepFeatureMatrix m;
    m.sample_id = "one";
    m.dims = 4;
    m.values = {0.5, -2.0, 7.25, 0.0};
    const auto agg = aggregate_deep(m);
    REQUIRE(agg.size() == 8);
    for (size_t c = 0; c < 4; ++c) {
        CHECK(agg[c] == m.values[c]);
        CHECK(agg[4 + c] == 0.0);
    }
}

TEST_CASE("aggregate of r and -r has zero mean") {
    DeepFeatureMatrix m;
    m.dims = 3;
    m.values = {1.5, -2.0, 0.25, -1.5, 2.0, -0.25};
    const auto agg = aggregate_deep(m);
    for (size_t c = 0; c < 3; ++c) {
        CHECK(agg[c] == 0.0);
        CHECK(agg[3 + c] == doctest::Approx(std::abs(m.values[c])).epsilon(1e-12));
    }
}

TEST_CASE("aggregate matches a columnwise oracle on a random matrix") {
    const size_t rows = 10, dims = 96;
    std::mt19937_64 eng(2024);
    DeepFeatureMatrix m;
    m.dims = dims;
    m.values.resize(rows * dims);
    for (auto& v : m.values) v = 20.0 * ((eng() >> 11) * (1.0 / 9007199254740992.0)) - 10.0;

    const auto agg = aggregate_deep(m);
    REQUIRE(agg.size() == 2 * dims);
    for (size_t c = 0; c < dims; ++c) {
        double mean = 0.0;
        for (size_t r = 0; r < rows; ++r) mean += m.values[r * dims + c];
        mean /= double(rows);
        double var = 0.0;
        for (size_t r = 0; r < rows; ++r) {
            const double d = m.values[r * dims + c] - mean;
            var += d * d;
        }
        var /= double(rows);
        CHECK(std::abs(agg[c] - mean) < 1e-9);
        CHECK(std::abs(agg[dims + c] - std::sqrt(var)) < 1e-9);
    }
}

TEST_CASE("aggregate of empty matrix is rejected") {
    DeepFeatureMatrix m;
    CHECK_THROWS_AS(aggregate_deep(m), EmptyInputError);
}

TEST_CASE("deep feature names are means then stds") {
    const auto names = deep_feature_names(3);
    REQUIRE(names.size() == 6);
    CHECK(names[0] == "deep0_mean");
    CHECK(names[2] == "deep2_mean");
    CHECK(names[3] == "deep0_std");
    CHECK(names[5] == "deep2_std");
}

TEST_CASE("file ingest plus aggregation end to end") {
    tu::TempDir dir("deepagg");
    std::ostringstream body;
    // 3 windows x 2 dims, hand-checkable stats
    body << "1 2\n3 6\n5 10\n";
    tu::write_file(dir.path() / "s1.txt", body.str());

    const auto agg = aggregate_deep(ingest_deep_features(dir.path() / "s1.txt"));
    REQUIRE(agg.size() == 4);
    CHECK(agg[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(agg[1] == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(agg[2] == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-12));
    CHECK(agg[3] == doctest::Approx(std::sqrt(32.0 / 3.0)).epsilon(1e-12));
}

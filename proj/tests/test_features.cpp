#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "retina/error.hpp"
#include "retina/features.hpp"
#include "retina/ml/cv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace retina;

namespace {

FeatureTable small_table() {
    FeatureTable t;
    t.feature_names = {"CRAE-B", "CRVE-B", "FD-Ct"};
    auto add = [&](const std::string& id, int grade, bool gradable, const std::string& split,
                   std::optional<double> a, std::optional<double> b, std::optional<double> c) {
        Record r;
        r.image_id = id;
        r.grade = grade;
        r.gradable = gradable;
        r.split = split;
        r.features = {a, b, c};
        t.records.push_back(r);
    };
    add("img-001", 0, true, "train", 140.25, 190.5, 1.42);
    add("img-002", 1, true, "train", std::nullopt, 180.0, 1.38);
    add("img-003", 2, false, "test", 150.0, std::nullopt, std::nullopt);
    add("img-004", 1, true, "test", 138.0, 175.25, 1.31);
    return t;
}

std::string temp_csv(const char* stem) {
    return (std::filesystem::temp_directory_path() / stem).string();
}

} // namespace

TEST_CASE("grade schemas expose their class counts and labels") {
    CHECK(grade_count(GradeSchema::dr) == 5);
    CHECK(grade_count(GradeSchema::me) == 3);
    CHECK(grade_count(GradeSchema::htr) == 5);
    CHECK(grade_schema_from_string("dr") == GradeSchema::dr);
    CHECK_THROWS_AS(grade_schema_from_string("xyz"), InputError);
    CHECK(std::string(grade_label(GradeSchema::dr, 0)).size() > 0);
    CHECK_THROWS_AS(grade_label(GradeSchema::me, 3), InputError);
}

TEST_CASE("feature csv round trips values, blanks and splits") {
    const FeatureTable t = small_table();
    const std::string path = temp_csv("retina_test_roundtrip.csv");
    write_feature_csv(t, path, {"fixture"});
    const FeatureTable back = read_feature_csv(path);
    REQUIRE(back.n_rows() == 4);
    REQUIRE(back.feature_names == t.feature_names);
    CHECK(back.records[0].image_id == "img-001");
    CHECK(back.records[0].features[0].value() == 140.25);
    CHECK_FALSE(back.records[1].features[0].has_value());
    CHECK(back.records[2].gradable == false);
    CHECK(back.records[3].split == "test");
    // writing what was read reproduces the same parse
    const std::string path2 = temp_csv("retina_test_roundtrip2.csv");
    write_feature_csv(back, path2);
    const FeatureTable again = read_feature_csv(path2);
    CHECK(again.records[1].grade == back.records[1].grade);
    CHECK(again.records[0].features[2] == back.records[0].features[2]);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("feature csv rejects malformed rows with their location") {
    const std::string path = temp_csv("retina_test_bad.csv");
    std::ofstream out(path);
    out << "image_id,grade,gradable,comorbidity,split,CRAE-B\n";
    out << "img-001,0,1,0,train,140\n";
    out << "img-002,-3,1,0,train,150\n";
    out.close();
    CHECK_THROWS_AS(read_feature_csv(path), InputError);
    std::remove(path.c_str());
}

TEST_CASE("schema range guard names the offending row") {
    FeatureTable t = small_table();
    t.records[1].grade = 5; // outside the 5-grade schema (0..4)
    try {
        ml::table_to_mldata(t, grade_count(GradeSchema::dr), false);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("img-002") != std::string::npos);
    }
}

TEST_CASE("table seeded from the published class counts keeps them") {
    const std::vector<int> counts = {52, 20, 51, 40, 32};
    FeatureTable t;
    t.feature_names = {"FD-Ct"};
    int serial = 0;
    for (std::size_t grade = 0; grade < counts.size(); ++grade)
        for (int i = 0; i < counts[grade]; ++i) {
            Record r;
            r.image_id = "dr-" + std::to_string(serial++);
            r.grade = static_cast<int>(grade);
            r.features = {1.0};
            t.records.push_back(r);
        }
    std::map<int, int> seen;
    for (const auto& r : t.records) ++seen[r.grade];
    for (std::size_t g = 0; g < counts.size(); ++g)
        CHECK(seen[static_cast<int>(g)] == counts[g]);
    CHECK(t.n_rows() == 195);
}

TEST_CASE("filter_gradable drops exactly the flagged rows") {
    const FeatureTable t = small_table();
    GradabilityReport report;
    const FeatureTable kept = filter_gradable(t, &report);
    CHECK(report.n_total == 4);
    CHECK(report.n_kept == 3);
    REQUIRE(report.excluded_ids.size() == 1);
    CHECK(report.excluded_ids[0] == "img-003");
    CHECK(kept.n_rows() == 3);

    FeatureTable all = t;
    for (auto& r : all.records) r.gradable = true;
    const FeatureTable same = filter_gradable(all);
    CHECK(same.n_rows() == 4);
}

TEST_CASE("stratified_split: balanced two-class 80/20") {
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) labels.push_back(0);
    for (int i = 0; i < 50; ++i) labels.push_back(1);
    const SplitIndices s = stratified_split(labels, 0.2, 7);
    CHECK(s.train.size() == 80);
    CHECK(s.test.size() == 20);
    int test0 = 0;
    for (std::size_t i : s.test) test0 += labels[i] == 0;
    CHECK(test0 == 10);
    // determinism
    const SplitIndices s2 = stratified_split(labels, 0.2, 7);
    CHECK(s.train == s2.train);
    CHECK(s.test == s2.test);
    const SplitIndices s3 = stratified_split(labels, 0.2, 8);
    CHECK(s.test != s3.test);
}

TEST_CASE("stratified_split: imbalanced per-class test counts") {
    const std::vector<int> counts = {85, 11, 15, 20, 16};
    std::vector<int> labels;
    for (std::size_t grade = 0; grade < counts.size(); ++grade)
        for (int i = 0; i < counts[grade]; ++i) labels.push_back(static_cast<int>(grade));
    const SplitIndices s = stratified_split(labels, 0.2, 42);
    std::map<int, int> test_counts;
    for (std::size_t i : s.test) ++test_counts[labels[i]];
    const std::vector<int> want = {17, 2, 3, 4, 3}; // round(0.2 * class size)
    for (std::size_t g = 0; g < want.size(); ++g) {
        CHECK(test_counts[static_cast<int>(g)] >= want[g] - 1);
        CHECK(test_counts[static_cast<int>(g)] <= want[g] + 1);
    }
    CHECK(s.train.size() + s.test.size() == labels.size());
}

TEST_CASE("median imputer fills blanks from training medians only") {
    std::vector<std::vector<std::optional<double>>> rows = {
        {1.0, std::nullopt}, {3.0, std::nullopt}, {10.0, std::nullopt}, {100.0, 5.0}};
    MedianImputer imp;
    imp.fit(rows, {0, 1, 2}); // the 100.0 row is held out
    CHECK(imp.medians()[0] == 3.0);
    CHECK(imp.medians()[1] == 0.0); // never observed in the fit rows
    const auto filled = imp.transform({std::nullopt, std::nullopt});
    CHECK(filled[0] == 3.0);
    CHECK(filled[1] == 0.0);
    const auto kept = imp.transform({7.5, 2.0});
    CHECK(kept[0] == 7.5);
    CHECK(kept[1] == 2.0);
}

TEST_CASE("min-max scaler maps the fitted range onto [0,1]") {
    MinMaxScaler sc;
    sc.fit({{2.0, 5.0}, {4.0, 5.0}, {6.0, 5.0}});
    const auto a = sc.transform({2.0, 5.0});
    const auto b = sc.transform({4.0, 5.0});
    const auto c = sc.transform({6.0, 5.0});
    CHECK(a[0] == 0.0);
    CHECK(b[0] == 0.5);
    CHECK(c[0] == 1.0);
    CHECK(a[1] == 0.0); // constant column collapses to 0
    // out-of-range values extend the affine map unclipped
    CHECK(sc.transform({8.0, 5.0})[0] == 1.5);
}

#pragma once

#include "retina/feature_names.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace retina {

// Grading schemas; grade 0 is always "none/absent" so the binary view is
// grade 0 against grade > 0.
enum class GradeSchema { dr, me, htr };

const char* to_string(GradeSchema s);
GradeSchema grade_schema_from_string(const std::string& s);
int grade_count(GradeSchema s);
// Human-readable description of one grade level.
const char* grade_label(GradeSchema s, int grade);

struct Record {
    std::string image_id;
    int grade = 0;
    bool gradable = true;
    int comorbidity = 0; // bitmask of co-occurring findings, informational
    std::string split;   // "train", "test" or empty when unassigned
    std::vector<std::optional<double>> features; // registry order of the table
};

// Rectangular feature table: named columns, one row per image. Absent cells
// are explicitly missing, never zero.
struct FeatureTable {
    std::vector<std::string> feature_names;
    std::vector<Record> records;

    int column(const std::string& name) const; // -1 when absent
    std::size_t n_rows() const { return records.size(); }
    std::size_t n_cols() const { return feature_names.size(); }
};

// CSV layout: image_id,grade,gradable,comorbidity,split,<feature...>; '#'
// lines are provenance comments. Cells left empty are missing values.
FeatureTable read_feature_csv(const std::string& path);
void write_feature_csv(const FeatureTable& table, const std::string& path,
                       const std::vector<std::string>& provenance_comments = {});

struct GradabilityReport {
    std::size_t n_total = 0;
    std::size_t n_kept = 0;
    std::vector<std::string> excluded_ids;
};

// Drop rows marked ungradable.
FeatureTable filter_gradable(const FeatureTable& table, GradabilityReport* report = nullptr);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Deterministic stratified split; per-class test counts are round(fraction *
// class size) clamped so both sides stay non-empty whenever the class has at
// least two rows.
SplitIndices stratified_split(const std::vector<int>& labels, double test_fraction,
                              std::uint64_t seed);

// Column medians over observed training cells; a column with no observed
// value imputes 0.
class MedianImputer {
public:
    void fit(const std::vector<std::vector<std::optional<double>>>& rows,
             const std::vector<std::size_t>& use_rows);
    double impute(std::size_t col, const std::optional<double>& cell) const;
    std::vector<double> transform(const std::vector<std::optional<double>>& row) const;
    const std::vector<double>& medians() const { return medians_; }

private:
    std::vector<double> medians_;
};

// The optional-valued feature rows of a table, in record order.
std::vector<std::vector<std::optional<double>>> feature_rows(const FeatureTable& table);

// Per-column min-max scaling to [0, 1] on the fitted range; a constant column
// maps to 0. Values outside the fitted range are not clipped.
class MinMaxScaler {
public:
    void fit(const std::vector<std::vector<double>>& rows);
    std::vector<double> transform(const std::vector<double>& row) const;
    const std::vector<double>& mins() const { return mins_; }
    const std::vector<double>& maxs() const { return maxs_; }

private:
    std::vector<double> mins_;
    std::vector<double> maxs_;
};

} // namespace retina

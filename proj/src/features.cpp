#include "retina/features.hpp"

#include "retina/error.hpp"
#include "retina/num.hpp"
#include "retina/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace retina {

namespace {

const char* const kFixedColumns[] = {"image_id", "grade", "gradable", "comorbidity", "split"};
constexpr std::size_t kNFixed = 5;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

int parse_int_cell(const std::string& cell, const std::string& context) {
    int value = 0;
    const char* first = cell.data();
    const char* last = first + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    require_input(ec == std::errc() && ptr == last,
                  context + ": expected an integer, got '" + cell + "'");
    return value;
}

} // namespace

const char* to_string(GradeSchema s) {
    switch (s) {
    case GradeSchema::dr: return "dr";
    case GradeSchema::me: return "me";
    case GradeSchema::htr: return "htr";
    }
    return "?";
}

GradeSchema grade_schema_from_string(const std::string& s) {
    if (s == "dr") return GradeSchema::dr;
    if (s == "me") return GradeSchema::me;
    if (s == "htr") return GradeSchema::htr;
    throw InputError("unknown grade schema '" + s + "' (expected dr, me or htr)");
}

int grade_count(GradeSchema s) {
    switch (s) {
    case GradeSchema::dr: return 5;
    case GradeSchema::me: return 3;
    case GradeSchema::htr: return 5;
    }
    return 0;
}

const char* grade_label(GradeSchema s, int grade) {
    static const char* const dr[] = {"no retinopathy", "mild non-proliferative",
                                     "moderate non-proliferative", "severe non-proliferative",
                                     "proliferative"};
    static const char* const me[] = {"no macular edema", "macular edema",
                                     "clinically significant macular edema"};
    static const char* const htr[] = {"no hypertensive retinopathy", "mild", "moderate",
                                      "severe", "malignant"};
    require_input(grade >= 0 && grade < grade_count(s), "grade out of range for schema");
    switch (s) {
    case GradeSchema::dr: return dr[grade];
    case GradeSchema::me: return me[grade];
    case GradeSchema::htr: return htr[grade];
    }
    return "?";
}

int FeatureTable::column(const std::string& name) const {
    const auto it = std::find(feature_names.begin(), feature_names.end(), name);
    return it == feature_names.end() ? -1 : static_cast<int>(it - feature_names.begin());
}

FeatureTable read_feature_csv(const std::string& path) {
    std::ifstream in(path);
    require_input(in.good(), "cannot open '" + path + "'");

    FeatureTable table;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split_csv_line(line);
        const std::string where = path + " line " + std::to_string(line_no);

        if (!header_seen) {
            require_input(cells.size() >= kNFixed, where + ": truncated header");
            for (std::size_t i = 0; i < kNFixed; ++i)
                require_input(cells[i] == kFixedColumns[i],
                              where + ": expected column '" + kFixedColumns[i] + "', got '" +
                                  cells[i] + "'");
            std::set<std::string> seen;
            for (std::size_t i = kNFixed; i < cells.size(); ++i) {
                require_input(!cells[i].empty(), where + ": empty feature column name");
                require_input(seen.insert(cells[i]).second,
                              where + ": duplicate column '" + cells[i] + "'");
                table.feature_names.push_back(cells[i]);
            }
            header_seen = true;
            continue;
        }

        require_input(cells.size() == kNFixed + table.feature_names.size(),
                      where + ": expected " +
                          std::to_string(kNFixed + table.feature_names.size()) +
                          " cells, got " + std::to_string(cells.size()));

        Record rec;
        rec.image_id = cells[0];
        require_input(!rec.image_id.empty(), where + ": empty image_id");
        rec.grade = parse_int_cell(cells[1], where + " column 'grade'");
        require_input(rec.grade >= 0, where + ": grade must be non-negative");
        const int gradable = parse_int_cell(cells[2], where + " column 'gradable'");
        require_input(gradable == 0 || gradable == 1, where + ": gradable must be 0 or 1");
        rec.gradable = gradable == 1;
        rec.comorbidity = parse_int_cell(cells[3], where + " column 'comorbidity'");
        require_input(rec.comorbidity >= 0, where + ": comorbidity must be non-negative");
        rec.split = cells[4];
        require_input(rec.split.empty() || rec.split == "train" || rec.split == "test",
                      where + ": split must be empty, 'train' or 'test'");

        rec.features.resize(table.feature_names.size());
        for (std::size_t i = 0; i < table.feature_names.size(); ++i) {
            const std::string& cell = cells[kNFixed + i];
            if (cell.empty()) continue;
            bool ok = false;
            const double v = parse_number(cell, ok);
            require_input(ok && std::isfinite(v), where + " row '" + rec.image_id +
                                                      "' column '" + table.feature_names[i] +
                                                      "': not a finite number '" + cell + "'");
            rec.features[i] = v;
        }
        table.records.push_back(std::move(rec));
    }

    require_input(header_seen, path + ": missing header line");
    return table;
}

void write_feature_csv(const FeatureTable& table, const std::string& path,
                       const std::vector<std::string>& provenance_comments) {
    std::ofstream out(path);
    require_input(out.good(), "cannot write '" + path + "'");
    for (const auto& c : provenance_comments) out << "# " << c << "\n";

    for (std::size_t i = 0; i < kNFixed; ++i) out << (i ? "," : "") << kFixedColumns[i];
    for (const auto& name : table.feature_names) out << ',' << name;
    out << '\n';

    for (const auto& rec : table.records) {
        out << rec.image_id << ',' << rec.grade << ',' << (rec.gradable ? 1 : 0) << ','
            << rec.comorbidity << ',' << rec.split;
        require_internal(rec.features.size() == table.feature_names.size(),
                         "feature row width does not match header");
        for (const auto& cell : rec.features) {
            out << ',';
            if (cell) out << format_number(*cell);
        }
        out << '\n';
    }
    require_input(out.good(), "failed while writing '" + path + "'");
}

FeatureTable filter_gradable(const FeatureTable& table, GradabilityReport* report) {
    FeatureTable kept;
    kept.feature_names = table.feature_names;
    GradabilityReport rep;
    rep.n_total = table.records.size();
    for (const auto& rec : table.records) {
        if (rec.gradable)
            kept.records.push_back(rec);
        else
            rep.excluded_ids.push_back(rec.image_id);
    }
    rep.n_kept = kept.records.size();
    if (report) *report = rep;
    return kept;
}

SplitIndices stratified_split(const std::vector<int>& labels, double test_fraction,
                              std::uint64_t seed) {
    require_input(!labels.empty(), "stratified_split: no rows");
    require_input(test_fraction > 0.0 && test_fraction < 1.0,
                  "stratified_split: test_fraction must be in (0, 1)");

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    SplitIndices out;
    for (auto& [label, rows] : by_class) {
        Rng rng(mix_seed(seed, 0x73706c69, static_cast<std::uint64_t>(label)));
        rng.shuffle(rows);
        const auto n = rows.size();
        std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * n));
        if (n >= 2)
            n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
        else
            n_test = 0;
        for (std::size_t i = 0; i < n; ++i)
            (i < n_test ? out.test : out.train).push_back(rows[i]);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

void MedianImputer::fit(const std::vector<std::vector<std::optional<double>>>& rows,
                        const std::vector<std::size_t>& use_rows) {
    require_input(!rows.empty() && !use_rows.empty(), "imputer: no rows to fit");
    const std::size_t p = rows.front().size();
    medians_.assign(p, 0.0);
    for (std::size_t c = 0; c < p; ++c) {
        std::vector<double> observed;
        for (std::size_t r : use_rows) {
            require_input(r < rows.size(), "imputer: row index out of range");
            require_input(rows[r].size() == p, "imputer: ragged rows");
            if (rows[r][c]) observed.push_back(*rows[r][c]);
        }
        if (!observed.empty()) medians_[c] = median_of(observed);
    }
}

double MedianImputer::impute(std::size_t col, const std::optional<double>& cell) const {
    require_internal(col < medians_.size(), "imputer: column out of range");
    return cell ? *cell : medians_[col];
}

std::vector<double> MedianImputer::transform(const std::vector<std::optional<double>>& row) const {
    require_input(row.size() == medians_.size(), "imputer: row width mismatch");
    std::vector<double> out(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) out[c] = impute(c, row[c]);
    return out;
}

std::vector<std::vector<std::optional<double>>> feature_rows(const FeatureTable& table) {
    std::vector<std::vector<std::optional<double>>> rows;
    rows.reserve(table.records.size());
    for (const auto& rec : table.records) rows.push_back(rec.features);
    return rows;
}

void MinMaxScaler::fit(const std::vector<std::vector<double>>& rows) {
    require_input(!rows.empty(), "scaler: no rows to fit");
    const std::size_t p = rows.front().size();
    mins_.assign(p, 0.0);
    maxs_.assign(p, 0.0);
    for (std::size_t c = 0; c < p; ++c) {
        double lo = rows[0][c];
        double hi = rows[0][c];
        for (const auto& row : rows) {
            require_input(row.size() == p, "scaler: ragged rows");
            lo = std::min(lo, row[c]);
            hi = std::max(hi, row[c]);
        }
        mins_[c] = lo;
        maxs_[c] = hi;
    }
}

std::vector<double> MinMaxScaler::transform(const std::vector<double>& row) const {
    require_internal(!mins_.empty(), "scaler: not fitted");
    require_input(row.size() == mins_.size(), "scaler: row width mismatch");
    std::vector<double> out(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) {
        const double range = maxs_[c] - mins_[c];
        out[c] = range > 0.0 ? (row[c] - mins_[c]) / range : 0.0;
    }
    return out;
}

} // namespace retina

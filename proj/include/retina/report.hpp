#pragma once

// Plain-text report rendering: the ranked model table and the regression
// summary sentence, with the three-decimal leading-zero-free number style
// used throughout ("".986±.027"", "".401"").

#include <optional>
#include <string>
#include <vector>

namespace retina {

// "%.3f" with the leading zero dropped for |v| < 1: 0.986 -> ".986",
// -0.4 -> "-.400", 1.0 -> "1.000".
std::string format_value3(double v);

// ".986±.027"
std::string format_mean_std(double mean, double stddev);

// "F(51, 238) = 3.118, p<.0005, R² = .401"; p at or above .0005 is printed
// as "p = .012".
std::string format_regression_sentence(int df1, int df2, double f_stat, double p_value,
                                       double r2);

struct ModelRow {
    std::string model;
    double train_mean = 0.0;
    double train_std = 0.0;
    std::optional<double> test_auc; // absent until `evaluate` has run
    double minutes = 0.0;
};

// Fixed five-column table; rows are emitted in the order given (rank models
// before calling). Test column shows "-" when absent.
std::string model_table(const std::string& task, const std::vector<ModelRow>& rows);

} // namespace retina

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace retina {

struct OlsTerm {
    std::string name; // "(intercept)" for the constant
    double coef = 0.0;
    double se = 0.0;
    double t = 0.0;
    double p = 1.0; // two-sided, equals the partial-F p-value
};

struct OlsFit {
    std::vector<OlsTerm> terms; // intercept first, then predictors in input order
    double r2 = 0.0;
    double adjusted_r2 = 0.0;
    double f_stat = 0.0;
    int df1 = 0;
    int df2 = 0;
    double f_p = 1.0;
    double sigma2 = 0.0; // residual variance, SSE / df2
    std::size_t n = 0;
};

// Ordinary least squares with an intercept. Rows of x are observations.
// A rank-deficient design is rejected with a message naming one dependent
// column and the columns it is a combination of.
OlsFit ols_fit(const std::vector<std::vector<double>>& x,
               const std::vector<std::string>& names, const std::vector<double>& y);

struct StepwiseStep {
    bool added = false; // false: removed
    std::string name;
    double p = 0.0;
};

struct StepwiseResult {
    std::vector<std::string> selected; // in final-model order
    OlsFit fit;                        // refit on the selected set
    std::vector<StepwiseStep> trace;
    std::vector<std::string> skipped_collinear; // candidates never admissible
};

// Classic p-value stepwise: enter the candidate with the smallest partial p
// while it is below p_enter, then drop terms whose p exceeds p_remove
// (largest first). Ties break toward the earlier column. p_enter < p_remove
// is required so the loop terminates.
StepwiseResult stepwise_select(const std::vector<std::vector<double>>& x,
                               const std::vector<std::string>& names,
                               const std::vector<double>& y, double p_enter = 0.05,
                               double p_remove = 0.10);

struct VifEntry {
    std::string name;
    double vif = 1.0; // +inf marks an exactly collinear column
};

// Variance inflation factors, 1 / (1 - R^2) of each column on the others.
std::vector<VifEntry> vif(const std::vector<std::vector<double>>& x,
                          const std::vector<std::string>& names);

} // namespace retina

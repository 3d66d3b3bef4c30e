#pragma once

#include "retina/features.hpp"
#include "retina/ml/grids.hpp"
#include "retina/ml/model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace retina::ml {

// Raw rows may contain missing cells; imputation and scaling happen inside
// the train side of each evaluation.
struct MlData {
    std::vector<std::vector<std::optional<double>>> x;
    std::vector<int> y;
    int n_classes = 0;

    std::size_t n_rows() const { return x.size(); }
};

// Rows of a table restricted to one split ("train"/"test"; empty selects all).
MlData table_to_mldata(const FeatureTable& table, int n_classes, bool binary,
                       const std::string& split = "");

struct Folds {
    int k = 0;
    std::vector<std::vector<std::size_t>> test_indices; // ascending within a fold
    std::vector<std::string> warnings;                  // e.g. fold-count reduction

    std::vector<std::size_t> train_of(int fold) const;
};

// Deterministic stratified k-fold. When the smallest class has fewer than k
// rows the fold count drops to that size (recorded in warnings); below 2 the
// data is rejected.
Folds stratified_kfold(const std::vector<int>& y, int k, std::uint64_t seed);

struct GridPointScore {
    HyperParams params;
    double mean_auc = 0.0;
    std::vector<double> fold_aucs;
};

struct GridSearchResult {
    HyperParams best;
    double best_score = 0.0;
    std::vector<GridPointScore> scores; // enumeration order; invalid points absent
    std::vector<std::string> warnings;
};

// Inner-CV selection: mean weighted one-vs-rest ROC-AUC over stratified
// folds, arg-max over the grid in enumeration order (ties keep the first).
// Invalid grid points (e.g. min_samples_split = 1) are skipped with a
// warning.
GridSearchResult grid_search(ModelId id, const ModelSpec& grid, const Eigen::MatrixXd& x,
                             const std::vector<int>& y, int n_classes, int k_inner,
                             std::uint64_t seed);

struct OuterFoldOutcome {
    double auc = 0.0;
    HyperParams chosen;
};

struct NestedCvReport {
    ModelId model = ModelId::knc;
    std::vector<OuterFoldOutcome> folds;
    double mean_auc = 0.0;
    double std_auc = 0.0; // population
    HyperParams modal_choice;
    double minutes = 0.0;
    std::vector<std::string> warnings;
};

// 6-outer / 4-inner by default. Scaler and imputer are fit on each outer
// train split only; inner folds and the outer test fold see transformed
// copies.
NestedCvReport nested_cv(ModelId id, const ModelSpec& grid, const MlData& data, int outer_k,
                         int inner_k, std::uint64_t seed);

struct TestEvaluation {
    ModelId model = ModelId::knc;
    HyperParams chosen;
    double train_auc = 0.0; // inner-CV mean of the chosen point
    double test_auc = 0.0;
    double minutes = 0.0;
    std::vector<std::string> warnings;
};

// Select hyperparameters by inner CV on the full train split, refit, and
// score the held-out test split.
TestEvaluation evaluate_test(ModelId id, const ModelSpec& grid, const MlData& train,
                             const MlData& test, int inner_k, std::uint64_t seed);

} // namespace retina::ml

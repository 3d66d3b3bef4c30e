#include "retina/ml/cv.hpp"

#include "retina/error.hpp"
#include "retina/ml/metrics.hpp"
#include "retina/num.hpp"
#include "retina/rng.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace retina::ml {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
    require_internal(!rows.empty(), "cv: empty matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows.front().size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

// Impute + scale fit on the train rows, applied to both sides.
struct Pipeline {
    MedianImputer imputer;
    MinMaxScaler scaler;

    void fit(const MlData& data, const std::vector<std::size_t>& train_rows) {
        imputer.fit(data.x, train_rows);
        std::vector<std::vector<double>> dense;
        dense.reserve(train_rows.size());
        for (std::size_t r : train_rows) dense.push_back(imputer.transform(data.x[r]));
        scaler.fit(dense);
    }

    Eigen::MatrixXd transform(const MlData& data, const std::vector<std::size_t>& rows) const {
        std::vector<std::vector<double>> dense;
        dense.reserve(rows.size());
        for (std::size_t r : rows) dense.push_back(scaler.transform(imputer.transform(data.x[r])));
        return to_matrix(dense);
    }
};

std::vector<int> labels_of(const MlData& data, const std::vector<std::size_t>& rows) {
    std::vector<int> y;
    y.reserve(rows.size());
    for (std::size_t r : rows) y.push_back(data.y[r]);
    return y;
}

double minutes_since(std::chrono::steady_clock::time_point t0) {
    const auto dt = std::chrono::steady_clock::now() - t0;
    return std::chrono::duration<double>(dt).count() / 60.0;
}

} // namespace

MlData table_to_mldata(const FeatureTable& table, int n_classes, bool binary,
                       const std::string& split) {
    require_input(n_classes >= 2, "need at least two classes");
    MlData data;
    data.n_classes = binary ? 2 : n_classes;
    for (const auto& rec : table.records) {
        if (!split.empty() && rec.split != split) continue;
        require_input(rec.grade < n_classes, "row '" + rec.image_id + "': grade " +
                                                 std::to_string(rec.grade) +
                                                 " outside the schema's range");
        data.x.push_back(rec.features);
        data.y.push_back(binary ? (rec.grade > 0 ? 1 : 0) : rec.grade);
    }
    require_input(!data.x.empty(), split.empty() ? "table has no rows"
                                                 : "table has no '" + split + "' rows");
    return data;
}

std::vector<std::size_t> Folds::train_of(int fold) const {
    std::vector<std::size_t> train;
    for (int f = 0; f < k; ++f) {
        if (f == fold) continue;
        train.insert(train.end(), test_indices[static_cast<std::size_t>(f)].begin(),
                     test_indices[static_cast<std::size_t>(f)].end());
    }
    std::sort(train.begin(), train.end());
    return train;
}

Folds stratified_kfold(const std::vector<int>& y, int k, std::uint64_t seed) {
    require_input(!y.empty(), "kfold: no rows");
    require_input(k >= 2, "kfold: need at least two folds");

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);

    std::size_t min_count = y.size();
    for (const auto& [label, rows] : by_class) min_count = std::min(min_count, rows.size());

    Folds folds;
    folds.k = k;
    if (min_count < static_cast<std::size_t>(k)) {
        require_input(min_count >= 2,
                      "kfold: smallest class has fewer than two rows; stratified folds "
                      "are impossible");
        folds.k = static_cast<int>(min_count);
        folds.warnings.push_back("fold count reduced from " + std::to_string(k) + " to " +
                                 std::to_string(folds.k) +
                                 " (smallest class has only " + std::to_string(min_count) +
                                 " rows)");
    }

    folds.test_indices.assign(static_cast<std::size_t>(folds.k), {});
    for (auto& [label, rows] : by_class) {
        Rng rng(mix_seed(seed, 0x666f6c64u, static_cast<std::uint64_t>(label)));
        rng.shuffle(rows);
        for (std::size_t i = 0; i < rows.size(); ++i)
            folds.test_indices[i % static_cast<std::size_t>(folds.k)].push_back(rows[i]);
    }
    for (auto& fold : folds.test_indices) std::sort(fold.begin(), fold.end());
    return folds;
}

GridSearchResult grid_search(ModelId id, const ModelSpec& grid, const Eigen::MatrixXd& x,
                             const std::vector<int>& y, int n_classes, int k_inner,
                             std::uint64_t seed) {
    require_input(grid.name == to_string(id), "grid/model mismatch: grid is for '" +
                                                  grid.name + "', training " + to_string(id));
    const Folds folds = stratified_kfold(y, k_inner, mix_seed(seed, 0x696e6e72u));

    GridSearchResult result;
    result.warnings = folds.warnings;

    const auto combos = grid.enumerate();
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
        const HyperParams& hp = combos[ci];
        std::unique_ptr<Classifier> probe;
        try {
            probe = make_classifier(id, hp);
        } catch (const InputError& e) {
            result.warnings.push_back("skipped grid point (" + hp.describe() +
                                      "): " + e.what());
            continue;
        }

        GridPointScore score;
        score.params = hp;
        bool failed = false;
        for (int f = 0; f < folds.k && !failed; ++f) {
            const auto test_rows = folds.test_indices[static_cast<std::size_t>(f)];
            const auto train_rows = folds.train_of(f);
            Eigen::MatrixXd xtr(static_cast<Eigen::Index>(train_rows.size()), x.cols());
            Eigen::MatrixXd xte(static_cast<Eigen::Index>(test_rows.size()), x.cols());
            std::vector<int> ytr, yte;
            for (std::size_t i = 0; i < train_rows.size(); ++i) {
                xtr.row(static_cast<Eigen::Index>(i)) =
                    x.row(static_cast<Eigen::Index>(train_rows[i]));
                ytr.push_back(y[train_rows[i]]);
            }
            for (std::size_t i = 0; i < test_rows.size(); ++i) {
                xte.row(static_cast<Eigen::Index>(i)) =
                    x.row(static_cast<Eigen::Index>(test_rows[i]));
                yte.push_back(y[test_rows[i]]);
            }
            try {
                auto clf = make_classifier(id, hp);
                clf->fit(xtr, ytr, n_classes,
                         mix_seed(seed, static_cast<std::uint64_t>(ci),
                                  static_cast<std::uint64_t>(f)));
                score.fold_aucs.push_back(roc_auc_weighted_ovr(clf->predict_proba(xte), yte));
            } catch (const InputError& e) {
                result.warnings.push_back("grid point (" + hp.describe() + ") failed on fold " +
                                          std::to_string(f) + ": " + e.what());
                failed = true;
            }
        }
        if (failed || score.fold_aucs.empty()) continue;
        score.mean_auc = mean_of(score.fold_aucs);
        result.scores.push_back(std::move(score));
    }

    require_input(!result.scores.empty(), "grid search: no valid grid point for " +
                                              std::string(to_string(id)));
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.scores.size(); ++i)
        if (result.scores[i].mean_auc > result.scores[best].mean_auc) best = i;
    result.best = result.scores[best].params;
    result.best_score = result.scores[best].mean_auc;
    return result;
}

NestedCvReport nested_cv(ModelId id, const ModelSpec& grid, const MlData& data, int outer_k,
                         int inner_k, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    require_input(data.n_rows() == data.y.size(), "nested_cv: x/y size mismatch");

    NestedCvReport report;
    report.model = id;
    const Folds outer = stratified_kfold(data.y, outer_k, mix_seed(seed, 0x6f757472u));
    report.warnings = outer.warnings;

    for (int f = 0; f < outer.k; ++f) {
        const auto test_rows = outer.test_indices[static_cast<std::size_t>(f)];
        const auto train_rows = outer.train_of(f);

        Pipeline pipe;
        pipe.fit(data, train_rows);
        const Eigen::MatrixXd xtr = pipe.transform(data, train_rows);
        const Eigen::MatrixXd xte = pipe.transform(data, test_rows);
        const std::vector<int> ytr = labels_of(data, train_rows);
        const std::vector<int> yte = labels_of(data, test_rows);

        GridSearchResult gs = grid_search(id, grid, xtr, ytr, data.n_classes, inner_k,
                                          mix_seed(seed, 0x67726964u,
                                                   static_cast<std::uint64_t>(f)));
        for (auto& w : gs.warnings)
            report.warnings.push_back("outer fold " + std::to_string(f) + ": " + w);

        auto clf = make_classifier(id, gs.best);
        clf->fit(xtr, ytr, data.n_classes,
                 mix_seed(seed, 0x66697475u, static_cast<std::uint64_t>(f)));
        const double auc = roc_auc_weighted_ovr(clf->predict_proba(xte), yte);
        report.folds.push_back({auc, gs.best});
    }

    std::vector<double> aucs;
    for (const auto& fold : report.folds) aucs.push_back(fold.auc);
    report.mean_auc = mean_of(aucs);
    report.std_auc = stddev_of(aucs);

    // Modal hyperparameter choice; ties keep the earliest fold's choice.
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < report.folds.size(); ++i) {
        std::size_t count = 0;
        for (const auto& other : report.folds)
            if (other.chosen == report.folds[i].chosen) ++count;
        if (count > best_count) {
            best_count = count;
            report.modal_choice = report.folds[i].chosen;
        }
    }

    report.minutes = minutes_since(t0);
    return report;
}

TestEvaluation evaluate_test(ModelId id, const ModelSpec& grid, const MlData& train,
                             const MlData& test, int inner_k, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    require_input(train.n_classes == test.n_classes, "evaluate: class count mismatch");
    require_input(!train.x.empty() && !test.x.empty(), "evaluate: empty split");

    std::vector<std::size_t> all_train(train.n_rows());
    for (std::size_t i = 0; i < all_train.size(); ++i) all_train[i] = i;
    std::vector<std::size_t> all_test(test.n_rows());
    for (std::size_t i = 0; i < all_test.size(); ++i) all_test[i] = i;

    Pipeline pipe;
    pipe.fit(train, all_train);
    const Eigen::MatrixXd xtr = pipe.transform(train, all_train);
    const Eigen::MatrixXd xte = pipe.transform(test, all_test);

    GridSearchResult gs = grid_search(id, grid, xtr, train.y, train.n_classes, inner_k,
                                      mix_seed(seed, 0x6576616cu));

    TestEvaluation eval;
    eval.model = id;
    eval.chosen = gs.best;
    eval.train_auc = gs.best_score;
    eval.warnings = gs.warnings;

    auto clf = make_classifier(id, gs.best);
    clf->fit(xtr, train.y, train.n_classes, mix_seed(seed, 0x66696e61u));
    eval.test_auc = roc_auc_weighted_ovr(clf->predict_proba(xte), test.y);
    eval.minutes = minutes_since(t0);
    return eval;
}

} // namespace retina::ml

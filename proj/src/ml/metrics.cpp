#include "retina/ml/metrics.hpp"

#include "retina/error.hpp"

#include <algorithm>
#include <numeric>

namespace retina::ml {

double roc_auc_binary(const std::vector<double>& scores, const std::vector<int>& labels) {
    require_input(scores.size() == labels.size(), "auc: scores and labels differ in length");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (int l : labels) {
        require_input(l == 0 || l == 1, "auc: labels must be 0 or 1");
        n_pos += static_cast<std::size_t>(l);
    }
    const std::size_t n_neg = n - n_pos;
    require_input(n_pos > 0 && n_neg > 0, "auc: need both classes present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Tie-averaged ranks, 1-based.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        i = j + 1;
    }

    const double np = static_cast<double>(n_pos);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double roc_auc_weighted_ovr(const Eigen::MatrixXd& probas, const std::vector<int>& y) {
    require_input(static_cast<std::size_t>(probas.rows()) == y.size(),
                  "auc: probability rows and labels differ in length");
    const int n_classes = static_cast<int>(probas.cols());
    require_input(n_classes >= 2, "auc: need at least two probability columns");

    double weighted = 0.0;
    double weight_total = 0.0;
    for (int k = 0; k < n_classes; ++k) {
        std::size_t n_k = 0;
        for (int l : y) {
            require_input(l >= 0 && l < n_classes, "auc: label outside probability columns");
            if (l == k) ++n_k;
        }
        if (n_k == 0 || n_k == y.size()) continue; // class absent from this sample

        std::vector<double> scores(y.size());
        std::vector<int> binary(y.size());
        for (std::size_t r = 0; r < y.size(); ++r) {
            scores[r] = probas(static_cast<Eigen::Index>(r), k);
            binary[r] = y[r] == k ? 1 : 0;
        }
        weighted += static_cast<double>(n_k) * roc_auc_binary(scores, binary);
        weight_total += static_cast<double>(n_k);
    }
    require_input(weight_total > 0.0, "auc: no class admits a one-vs-rest curve");
    return weighted / weight_total;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
    require_input(predicted.size() == truth.size() && !truth.empty(),
                  "accuracy: prediction and truth sizes differ");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (predicted[i] == truth[i]) ++hit;
    return static_cast<double>(hit) / truth.size();
}

} // namespace retina::ml

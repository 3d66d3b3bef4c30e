#include "classifiers.hpp"

#include "retina/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace retina::ml {

KncClassifier::KncClassifier(const HyperParams& hp) {
    k_ = hp.integer("n_neighbors", 5);
    require_input(k_ >= 1, "KNC: n_neighbors must be >= 1");
    const std::string w = hp.str("weights", "uniform");
    require_input(w == "uniform" || w == "distance",
                  "KNC: weights must be 'uniform' or 'distance'");
    distance_weighted_ = w == "distance";
    // Exact search regardless; the 'algorithm' knob only selects an index
    // structure elsewhere, so it is accepted and ignored.
    const std::string algo = hp.str("algorithm", "auto");
    require_input(algo == "auto" || algo == "ball_tree" || algo == "kd_tree" ||
                      algo == "brute",
                  "KNC: unknown algorithm '" + algo + "'");
}

void KncClassifier::fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
                        std::uint64_t /*seed*/) {
    require_input(static_cast<std::size_t>(x.rows()) == y.size(), "KNC: x/y size mismatch");
    require_input(x.rows() >= k_, "KNC: n_neighbors exceeds the training set size");
    train_x_ = x;
    train_y_ = y;
    n_classes_ = n_classes;
}

Eigen::MatrixXd KncClassifier::predict_proba(const Eigen::MatrixXd& x) const {
    require_internal(train_x_.rows() > 0, "KNC: not fitted");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), n_classes_);

    const auto n = static_cast<std::size_t>(train_x_.rows());
    std::vector<std::size_t> order(n);
    std::vector<double> d2(n);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = (train_x_.row(static_cast<Eigen::Index>(i)) - x.row(r)).squaredNorm();
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + k_, order.end(),
                          [&](std::size_t a, std::size_t b) {
                              return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
                          });

        bool exact = false;
        for (int i = 0; i < k_; ++i) exact = exact || d2[order[static_cast<std::size_t>(i)]] == 0.0;

        for (int i = 0; i < k_; ++i) {
            const std::size_t t = order[static_cast<std::size_t>(i)];
            double w;
            if (!distance_weighted_)
                w = 1.0;
            else if (exact)
                w = d2[t] == 0.0 ? 1.0 : 0.0; // exact matches take the whole vote
            else
                w = 1.0 / std::sqrt(d2[t]);
            out(r, train_y_[t]) += w;
        }
        out.row(r) /= out.row(r).sum();
    }
    return out;
}

} // namespace retina::ml

#include "classifiers.hpp"

#include "retina/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace retina::ml {

namespace {

// Best weighted decision stump: each side predicts its weighted majority
// class. Ties keep the first (lowest feature, lowest threshold) candidate.
struct StumpFit {
    int feature = -1;
    double threshold = 0.0;
    int left_class = 0;
    int right_class = 0;
    double error = 1.0;
};

StumpFit fit_stump(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
                   const std::vector<double>& w) {
    const auto n = y.size();
    std::vector<double> total(static_cast<std::size_t>(n_classes), 0.0);
    double w_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total[static_cast<std::size_t>(y[i])] += w[i];
        w_total += w[i];
    }

    StumpFit best;
    // Degenerate "stump" predicting the global majority on both sides; used
    // when no split beats it (e.g. a single-class node).
    const auto majority =
        static_cast<int>(std::max_element(total.begin(), total.end()) - total.begin());
    best.feature = 0;
    best.threshold = -std::numeric_limits<double>::infinity();
    best.left_class = best.right_class = majority;
    best.error = (w_total - total[static_cast<std::size_t>(majority)]) / w_total;

    std::vector<std::size_t> order(n);
    std::vector<double> left(static_cast<std::size_t>(n_classes));
    for (int f = 0; f < static_cast<int>(x.cols()); ++f) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = x(static_cast<Eigen::Index>(a), f);
            const double vb = x(static_cast<Eigen::Index>(b), f);
            return va < vb || (va == vb && a < b);
        });

        std::fill(left.begin(), left.end(), 0.0);
        double wl = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const std::size_t r = order[i];
            left[static_cast<std::size_t>(y[r])] += w[r];
            wl += w[r];
            const double v = x(static_cast<Eigen::Index>(r), f);
            const double vn = x(static_cast<Eigen::Index>(order[i + 1]), f);
            if (v == vn) continue;

            int lc = 0;
            int rc = 0;
            double lbest = -1.0;
            double rbest = -1.0;
            for (int c = 0; c < n_classes; ++c) {
                const double l = left[static_cast<std::size_t>(c)];
                const double rr = total[static_cast<std::size_t>(c)] - l;
                if (l > lbest) {
                    lbest = l;
                    lc = c;
                }
                if (rr > rbest) {
                    rbest = rr;
                    rc = c;
                }
            }
            const double err = (w_total - lbest - rbest) / w_total;
            if (err < best.error) {
                best.error = err;
                best.feature = f;
                best.threshold = 0.5 * (v + vn);
                best.left_class = lc;
                best.right_class = rc;
            }
        }
    }
    return best;
}

} // namespace

AbcClassifier::AbcClassifier(const HyperParams& hp) {
    n_estimators_ = hp.integer("n_estimators", 50);
    learning_rate_ = hp.num("learning_rate", 1.0);
    require_input(n_estimators_ >= 1, "ABC: n_estimators must be >= 1");
    require_input(learning_rate_ > 0.0, "ABC: learning_rate must be positive");
}

void AbcClassifier::fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
                        std::uint64_t /*seed*/) {
    require_input(static_cast<std::size_t>(x.rows()) == y.size(), "ABC: x/y size mismatch");
    n_classes_ = n_classes;
    stumps_.clear();
    const auto n = y.size();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));

    for (int t = 0; t < n_estimators_; ++t) {
        const StumpFit s = fit_stump(x, y, n_classes, w);
        const double err = std::max(s.error, 1e-16);
        if (err >= 1.0 - 1.0 / n_classes) {
            // No better than chance; fall back to a prior-class vote so the
            // ensemble still predicts something.
            if (stumps_.empty())
                stumps_.push_back({s.feature, s.threshold, s.left_class, s.right_class, 1e-3});
            break;
        }

        const double alpha =
            learning_rate_ * (std::log((1.0 - err) / err) + std::log(n_classes - 1.0));
        stumps_.push_back({s.feature, s.threshold, s.left_class, s.right_class, alpha});
        if (s.error <= 0.0) break; // perfect stump, reweighting would zero out

        double w_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const int pred = x(static_cast<Eigen::Index>(i), s.feature) <= s.threshold
                                 ? s.left_class
                                 : s.right_class;
            if (pred != y[i]) w[i] *= std::exp(alpha);
            w_sum += w[i];
        }
        for (double& wi : w) wi /= w_sum;
    }
    require_internal(!stumps_.empty(), "ABC: boosting produced no usable stump");
}

Eigen::MatrixXd AbcClassifier::predict_proba(const Eigen::MatrixXd& x) const {
    require_internal(!stumps_.empty(), "ABC: not fitted");
    Eigen::MatrixXd votes = Eigen::MatrixXd::Zero(x.rows(), n_classes_);
    double alpha_sum = 0.0;
    for (const Stump& s : stumps_) {
        alpha_sum += s.alpha;
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            const int pred = x(r, s.feature) <= s.threshold ? s.left_class : s.right_class;
            votes(r, pred) += s.alpha;
        }
    }
    if (alpha_sum <= 0.0) return Eigen::MatrixXd::Constant(x.rows(), n_classes_,
                                                           1.0 / n_classes_);
    votes /= alpha_sum;
    return votes;
}

} // namespace retina::ml

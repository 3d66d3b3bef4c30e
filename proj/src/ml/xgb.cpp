#include "classifiers.hpp"

#include "retina/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace retina::ml {

namespace {

double leaf_weight(double g, double h, double lambda) { return -g / (h + lambda); }

double gain_term(double g, double h, double lambda) { return g * g / (h + lambda); }

} // namespace

// Grows one regression tree breadth-first.  Split candidates for every node of a
// level are gathered in a single sweep per feature over `orders[f]`, the row
// indices presorted by (value, row); thresholds sit midway between consecutive
// distinct values and the first candidate wins gain ties.
XgbClassifier::Tree XgbClassifier::build_tree(const Eigen::MatrixXd& x,
                                              const std::vector<double>& grad,
                                              const std::vector<double>& hess,
                                              const std::vector<std::vector<int>>& orders) const {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());

    Tree nodes;
    nodes.push_back({});
    std::vector<int> node_of(static_cast<std::size_t>(n), 0); // -1 once the row rests in a leaf
    int level_begin = 0;
    int level_end = 1;

    std::vector<double> g_tot(1, 0.0);
    std::vector<double> h_tot(1, 0.0);
    std::vector<int> cnt(1, n);
    for (int r = 0; r < n; ++r) {
        g_tot[0] += grad[static_cast<std::size_t>(r)];
        h_tot[0] += hess[static_cast<std::size_t>(r)];
    }

    for (int depth = 0; depth <= max_depth_ && level_begin < level_end; ++depth) {
        const int width = level_end - level_begin;
        std::vector<double> best_gain(static_cast<std::size_t>(width), 1e-12);
        std::vector<double> best_thr(static_cast<std::size_t>(width), 0.0);
        std::vector<int> best_feat(static_cast<std::size_t>(width), -1);

        if (depth < max_depth_) {
            std::vector<double> parent_term(static_cast<std::size_t>(width));
            for (int s = 0; s < width; ++s)
                parent_term[static_cast<std::size_t>(s)] =
                    gain_term(g_tot[static_cast<std::size_t>(s)], h_tot[static_cast<std::size_t>(s)],
                              lambda_);
            std::vector<double> gl(static_cast<std::size_t>(width));
            std::vector<double> hl(static_cast<std::size_t>(width));
            std::vector<double> prev_v(static_cast<std::size_t>(width));
            std::vector<char> started(static_cast<std::size_t>(width));
            for (int f = 0; f < p; ++f) {
                std::fill(gl.begin(), gl.end(), 0.0);
                std::fill(hl.begin(), hl.end(), 0.0);
                std::fill(started.begin(), started.end(), 0);
                for (const int r : orders[static_cast<std::size_t>(f)]) {
                    const int nid = node_of[static_cast<std::size_t>(r)];
                    if (nid < level_begin) continue;
                    const auto s = static_cast<std::size_t>(nid - level_begin);
                    if (cnt[s] < 2) continue;
                    const double v = x(r, f);
                    if (started[s] && prev_v[s] != v) {
                        const double gain =
                            0.5 * (gain_term(gl[s], hl[s], lambda_) +
                                   gain_term(g_tot[s] - gl[s], h_tot[s] - hl[s], lambda_) -
                                   parent_term[s]);
                        if (gain > best_gain[s]) {
                            best_gain[s] = gain;
                            best_feat[s] = f;
                            best_thr[s] = 0.5 * (prev_v[s] + v);
                        }
                    }
                    gl[s] += grad[static_cast<std::size_t>(r)];
                    hl[s] += hess[static_cast<std::size_t>(r)];
                    prev_v[s] = v;
                    started[s] = 1;
                }
            }
        }

        const int next_begin = static_cast<int>(nodes.size());
        for (int s = 0; s < width; ++s) {
            const auto id = static_cast<std::size_t>(level_begin + s);
            if (best_feat[static_cast<std::size_t>(s)] < 0) {
                nodes[id].value = learning_rate_ *
                                  leaf_weight(g_tot[static_cast<std::size_t>(s)],
                                              h_tot[static_cast<std::size_t>(s)], lambda_);
                continue;
            }
            const int left = static_cast<int>(nodes.size());
            nodes.push_back({});
            nodes.push_back({});
            nodes[id].feature = best_feat[static_cast<std::size_t>(s)];
            nodes[id].threshold = best_thr[static_cast<std::size_t>(s)];
            nodes[id].left = left;
            nodes[id].right = left + 1;
        }
        const int next_end = static_cast<int>(nodes.size());
        const int next_width = next_end - next_begin;

        // Route rows to children in ascending row order so per-node stat sums
        // accumulate the same way at every depth.
        std::vector<double> ng(static_cast<std::size_t>(next_width), 0.0);
        std::vector<double> nh(static_cast<std::size_t>(next_width), 0.0);
        std::vector<int> ncnt(static_cast<std::size_t>(next_width), 0);
        for (int r = 0; r < n; ++r) {
            const int nid = node_of[static_cast<std::size_t>(r)];
            if (nid < level_begin) continue;
            const Node& nd = nodes[static_cast<std::size_t>(nid)];
            if (nd.feature < 0) {
                node_of[static_cast<std::size_t>(r)] = -1;
                continue;
            }
            const int child = x(r, nd.feature) <= nd.threshold ? nd.left : nd.right;
            node_of[static_cast<std::size_t>(r)] = child;
            const auto cs = static_cast<std::size_t>(child - next_begin);
            ng[cs] += grad[static_cast<std::size_t>(r)];
            nh[cs] += hess[static_cast<std::size_t>(r)];
            ++ncnt[cs];
        }
        for (int cs = 0; cs < next_width; ++cs)
            require_internal(ncnt[static_cast<std::size_t>(cs)] > 0,
                             "xgb split produced an empty child");

        g_tot = std::move(ng);
        h_tot = std::move(nh);
        cnt = std::move(ncnt);
        level_begin = next_begin;
        level_end = next_end;
    }
    require_internal(level_begin == level_end, "xgb builder left unfinished nodes");
    return nodes;
}

double XgbClassifier::tree_value(const Tree& t, const Eigen::MatrixXd& x, Eigen::Index row) {
    int cur = 0;
    while (t[static_cast<std::size_t>(cur)].feature >= 0) {
        const Node& n = t[static_cast<std::size_t>(cur)];
        cur = x(row, n.feature) <= n.threshold ? n.left : n.right;
    }
    return t[static_cast<std::size_t>(cur)].value;
}

XgbClassifier::XgbClassifier(const HyperParams& hp) {
    learning_rate_ = hp.num("learning_rate", 0.1);
    n_estimators_ = hp.integer("n_estimators", 100);
    max_depth_ = hp.integer("max_depth", 6);
    require_input(learning_rate_ > 0.0 && learning_rate_ <= 1.0,
                  "XGB: learning_rate must be in (0, 1]");
    require_input(n_estimators_ >= 1, "XGB: n_estimators must be >= 1");
    require_input(max_depth_ >= 1, "XGB: max_depth must be >= 1");
}

void XgbClassifier::fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
                        std::uint64_t /*seed*/) {
    require_input(static_cast<std::size_t>(x.rows()) == y.size(), "XGB: x/y size mismatch");
    n_classes_ = n_classes;
    rounds_.clear();
    const auto n = static_cast<Eigen::Index>(y.size());

    // Feature orders are shared by every tree of the fit.
    std::vector<std::vector<int>> orders(static_cast<std::size_t>(x.cols()));
    for (int f = 0; f < static_cast<int>(x.cols()); ++f) {
        auto& ord = orders[static_cast<std::size_t>(f)];
        ord.resize(static_cast<std::size_t>(n));
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(), [&](int a, int b) {
            const double va = x(a, f);
            const double vb = x(b, f);
            return va < vb || (va == vb && a < b);
        });
    }

    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n, n_classes);
    std::vector<double> grad(y.size());
    std::vector<double> hess(y.size());
    for (int round = 0; round < n_estimators_; ++round) {
        std::vector<Tree> class_trees;
        class_trees.reserve(static_cast<std::size_t>(n_classes));
        // Softmax probabilities of the current scores.
        Eigen::MatrixXd proba = scores;
        for (Eigen::Index r = 0; r < n; ++r) {
            const double m = proba.row(r).maxCoeff();
            proba.row(r) = (proba.row(r).array() - m).exp();
            proba.row(r) /= proba.row(r).sum();
        }
        for (int k = 0; k < n_classes; ++k) {
            for (Eigen::Index r = 0; r < n; ++r) {
                const double p = proba(r, k);
                grad[static_cast<std::size_t>(r)] = p - (y[static_cast<std::size_t>(r)] == k);
                hess[static_cast<std::size_t>(r)] = std::max(p * (1.0 - p), 1e-16);
            }
            class_trees.push_back(build_tree(x, grad, hess, orders));
        }
        for (int k = 0; k < n_classes; ++k)
            for (Eigen::Index r = 0; r < n; ++r)
                scores(r, k) += tree_value(class_trees[static_cast<std::size_t>(k)], x, r);
        rounds_.push_back(std::move(class_trees));
    }
}

Eigen::MatrixXd XgbClassifier::predict_proba(const Eigen::MatrixXd& x) const {
    require_internal(!rounds_.empty(), "XGB: not fitted");
    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(x.rows(), n_classes_);
    for (const auto& class_trees : rounds_)
        for (int k = 0; k < n_classes_; ++k)
            for (Eigen::Index r = 0; r < x.rows(); ++r)
                scores(r, k) += tree_value(class_trees[static_cast<std::size_t>(k)], x, r);
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
        const double m = scores.row(r).maxCoeff();
        scores.row(r) = (scores.row(r).array() - m).exp();
        scores.row(r) /= scores.row(r).sum();
    }
    return scores;
}

} // namespace retina::ml

#include "classifiers.hpp"

#include "retina/error.hpp"
#include "retina/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace retina::ml {

namespace {

double node_impurity(const std::vector<double>& counts, double total, bool entropy) {
    if (total <= 0.0) return 0.0;
    double acc = 0.0;
    for (double c : counts) {
        if (c <= 0.0) continue;
        const double p = c / total;
        acc += entropy ? -p * std::log2(p) : p * p;
    }
    return entropy ? acc : 1.0 - acc;
}

struct BuildCtx {
    const Eigen::MatrixXd& x;
    const std::vector<int>& y;
    int n_classes;
    const std::vector<double>& w;
    const TreeParams& params;
    Rng rng;
    std::vector<TreeNode>& nodes;
    std::vector<int> idx;          // row ids, partitioned in place
    std::vector<int> feature_pool; // scratch for per-node subsets
    std::vector<int> scratch;      // per-node sort buffer
};

int build_node(BuildCtx& ctx, int lo, int hi, int depth) {
    std::vector<double> counts(static_cast<std::size_t>(ctx.n_classes), 0.0);
    double total = 0.0;
    for (int i = lo; i < hi; ++i) {
        counts[static_cast<std::size_t>(ctx.y[ctx.idx[i]])] += ctx.w[ctx.idx[i]];
        total += ctx.w[ctx.idx[i]];
    }

    TreeNode node;
    node.proba.resize(counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c) node.proba[c] = counts[c] / total;

    const bool pure =
        *std::max_element(counts.begin(), counts.end()) >= total - 1e-12;
    const bool depth_capped = ctx.params.max_depth > 0 && depth >= ctx.params.max_depth;
    const bool too_small = total < static_cast<double>(ctx.params.min_samples_split);

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = 1e-12;

    if (!pure && !depth_capped && !too_small) {
        const double parent = node_impurity(counts, total, ctx.params.entropy);

        const int p = static_cast<int>(ctx.x.cols());
        ctx.feature_pool.resize(static_cast<std::size_t>(p));
        std::iota(ctx.feature_pool.begin(), ctx.feature_pool.end(), 0);
        int n_features = p;
        if (ctx.params.max_features > 0 && ctx.params.max_features < p) {
            n_features = ctx.params.max_features;
            for (int i = 0; i < n_features; ++i) {
                const auto j = i + static_cast<int>(ctx.rng.below(
                                       static_cast<std::uint64_t>(p - i)));
                std::swap(ctx.feature_pool[i], ctx.feature_pool[j]);
            }
            std::sort(ctx.feature_pool.begin(), ctx.feature_pool.begin() + n_features);
        }

        std::vector<double> left(counts.size());
        std::vector<double> right(counts.size());
        for (int fi = 0; fi < n_features; ++fi) {
            const int f = ctx.feature_pool[static_cast<std::size_t>(fi)];
            ctx.scratch.assign(ctx.idx.begin() + lo, ctx.idx.begin() + hi);
            std::sort(ctx.scratch.begin(), ctx.scratch.end(), [&](int a, int b) {
                const double va = ctx.x(a, f);
                const double vb = ctx.x(b, f);
                return va < vb || (va == vb && a < b);
            });

            std::fill(left.begin(), left.end(), 0.0);
            double wl = 0.0;
            for (std::size_t i = 0; i + 1 < ctx.scratch.size(); ++i) {
                const int r = ctx.scratch[i];
                left[static_cast<std::size_t>(ctx.y[r])] += ctx.w[r];
                wl += ctx.w[r];
                const double v = ctx.x(r, f);
                const double vn = ctx.x(ctx.scratch[i + 1], f);
                if (v == vn) continue;

                const double wr = total - wl;
                const double il = node_impurity(left, wl, ctx.params.entropy);
                for (std::size_t c = 0; c < counts.size(); ++c) right[c] = counts[c] - left[c];
                const double ir = node_impurity(right, wr, ctx.params.entropy);
                const double gain = parent - (wl * il + wr * ir) / total;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (v + vn);
                }
            }
        }
    }

    const int id = static_cast<int>(ctx.nodes.size());
    ctx.nodes.push_back(std::move(node));
    if (best_feature < 0) return id;

    const int f = best_feature;
    const double thr = best_threshold;
    auto mid_it = std::stable_partition(ctx.idx.begin() + lo, ctx.idx.begin() + hi,
                                        [&](int r) { return ctx.x(r, f) <= thr; });
    const int mid = static_cast<int>(mid_it - ctx.idx.begin());
    require_internal(mid > lo && mid < hi, "tree split produced an empty child");

    ctx.nodes[static_cast<std::size_t>(id)].feature = f;
    ctx.nodes[static_cast<std::size_t>(id)].threshold = thr;
    const int l = build_node(ctx, lo, mid, depth + 1);
    ctx.nodes[static_cast<std::size_t>(id)].left = l;
    const int r = build_node(ctx, mid, hi, depth + 1);
    ctx.nodes[static_cast<std::size_t>(id)].right = r;
    return id;
}

} // namespace

void Cart::build(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
                 const std::vector<double>& weights, const TreeParams& params,
                 std::uint64_t seed) {
    require_internal(static_cast<std::size_t>(x.rows()) == y.size() &&
                         y.size() == weights.size(),
                     "tree: row count mismatch");
    nodes_.clear();
    BuildCtx ctx{x, y, n_classes, weights, params, Rng(seed), nodes_, {}, {}, {}};
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] > 0.0) ctx.idx.push_back(static_cast<int>(i));
    require_input(!ctx.idx.empty(), "tree: no weighted training rows");
    build_node(ctx, 0, static_cast<int>(ctx.idx.size()), 0);
}

const std::vector<double>& Cart::leaf_proba(const Eigen::MatrixXd& x, Eigen::Index row) const {
    require_internal(!nodes_.empty(), "tree: not fitted");
    int cur = 0;
    while (nodes_[static_cast<std::size_t>(cur)].feature >= 0) {
        const TreeNode& n = nodes_[static_cast<std::size_t>(cur)];
        cur = x(row, n.feature) <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(cur)].proba;
}

int Cart::depth() const {
    if (nodes_.empty()) return 0;
    // Iterative DFS over (node, depth).
    int deepest = 0;
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [id, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        const TreeNode& n = nodes_[static_cast<std::size_t>(id)];
        if (n.feature >= 0) {
            stack.push_back({n.left, d + 1});
            stack.push_back({n.right, d + 1});
        }
    }
    return deepest;
}

DtcClassifier::DtcClassifier(const HyperParams& hp) {
    params_.max_depth = hp.integer("max_depth", 0);
    params_.min_samples_split = hp.integer("min_samples_split", 2);
    const std::string crit = hp.str("criterion", "gini");
    require_input(crit == "gini" || crit == "entropy",
                  "DTC: criterion must be 'gini' or 'entropy'");
    params_.entropy = crit == "entropy";
    require_input(params_.max_depth >= 0, "DTC: max_depth must be positive or None");
    require_input(params_.min_samples_split >= 2, "DTC: min_samples_split must be >= 2");
}

void DtcClassifier::fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
                        std::uint64_t seed) {
    n_classes_ = n_classes;
    tree_.build(x, y, n_classes, std::vector<double>(y.size(), 1.0), params_, seed);
}

Eigen::MatrixXd DtcClassifier::predict_proba(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd out(x.rows(), n_classes_);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const auto& p = tree_.leaf_proba(x, r);
        for (int c = 0; c < n_classes_; ++c) out(r, c) = p[static_cast<std::size_t>(c)];
    }
    return out;
}

RfcClassifier::RfcClassifier(const HyperParams& hp) {
    n_estimators_ = hp.integer("n_estimators", 100);
    params_.max_depth = hp.integer("max_depth", 0);
    params_.min_samples_split = hp.integer("min_samples_split", 2);
    require_input(n_estimators_ >= 1, "RFC: n_estimators must be >= 1");
    require_input(params_.max_depth >= 0, "RFC: max_depth must be positive or None");
    require_input(params_.min_samples_split >= 2, "RFC: min_samples_split must be >= 2");
}

void RfcClassifier::fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
                        std::uint64_t seed) {
    n_classes_ = n_classes;
    const auto n = y.size();
    params_.max_features = std::max(
        1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(x.cols())))));
    trees_.assign(static_cast<std::size_t>(n_estimators_), Cart());
    for (int t = 0; t < n_estimators_; ++t) {
        const std::uint64_t tree_seed = mix_seed(seed, 0x666f7265u, static_cast<std::uint64_t>(t));
        Rng boot(mix_seed(tree_seed, 0x626f6f74u));
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) w[boot.below(n)] += 1.0;
        trees_[static_cast<std::size_t>(t)].build(x, y, n_classes, w, params_, tree_seed);
    }
}

Eigen::MatrixXd RfcClassifier::predict_proba(const Eigen::MatrixXd& x) const {
    require_internal(!trees_.empty(), "RFC: not fitted");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), n_classes_);
    for (const Cart& tree : trees_) {
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            const auto& p = tree.leaf_proba(x, r);
            for (int c = 0; c < n_classes_; ++c) out(r, c) += p[static_cast<std::size_t>(c)];
        }
    }
    out /= static_cast<double>(trees_.size());
    return out;
}

} // namespace retina::ml

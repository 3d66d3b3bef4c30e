#pragma once

#include "retina/ml/model.hpp"

#include <cstdint>
#include <vector>

namespace retina::ml {

// Shared CART machinery for DTC / RFC. max_depth 0 means unbounded.
struct TreeParams {
    int max_depth = 0;
    int min_samples_split = 2;
    bool entropy = false; // false: gini
    int max_features = 0; // 0: all, else per-node random subset size
};

struct TreeNode {
    int feature = -1; // -1: leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> proba;
};

class Cart {
public:
    // Weighted rows; weights carry bootstrap multiplicity. rng is only used
    // when params.max_features > 0.
    void build(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
               const std::vector<double>& weights, const TreeParams& params,
               std::uint64_t seed);
    const std::vector<double>& leaf_proba(const Eigen::MatrixXd& x, Eigen::Index row) const;
    bool empty() const { return nodes_.empty(); }
    int depth() const;

private:
    std::vector<TreeNode> nodes_;
};

class KncClassifier : public Classifier {
public:
    explicit KncClassifier(const HyperParams& hp);
    void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
             std::uint64_t seed) override;
    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const override;

private:
    int k_ = 5;
    bool distance_weighted_ = false;
    Eigen::MatrixXd train_x_;
    std::vector<int> train_y_;
    int n_classes_ = 0;
};

class DtcClassifier : public Classifier {
public:
    explicit DtcClassifier(const HyperParams& hp);
    void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
             std::uint64_t seed) override;
    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const override;

private:
    TreeParams params_;
    Cart tree_;
    int n_classes_ = 0;
};

class RfcClassifier : public Classifier {
public:
    explicit RfcClassifier(const HyperParams& hp);
    void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
             std::uint64_t seed) override;
    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const override;

private:
    int n_estimators_ = 100;
    TreeParams params_;
    std::vector<Cart> trees_;
    int n_classes_ = 0;
};

class XgbClassifier : public Classifier {
public:
    explicit XgbClassifier(const HyperParams& hp);
    void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
             std::uint64_t seed) override;
    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const override;

private:
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };
    using Tree = std::vector<Node>;

    double learning_rate_ = 0.1;
    int n_estimators_ = 100;
    int max_depth_ = 6;
    double lambda_ = 1.0; // L2 on leaf values
    std::vector<std::vector<Tree>> rounds_; // [round][class]
    int n_classes_ = 0;

    Tree build_tree(const Eigen::MatrixXd& x, const std::vector<double>& grad,
                    const std::vector<double>& hess,
                    const std::vector<std::vector<int>>& orders) const;
    static double tree_value(const Tree& t, const Eigen::MatrixXd& x, Eigen::Index row);
};

class AbcClassifier : public Classifier {
public:
    explicit AbcClassifier(const HyperParams& hp);
    void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
             std::uint64_t seed) override;
    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const override;

private:
    struct Stump {
        int feature = 0;
        double threshold = 0.0;
        int left_class = 0;
        int right_class = 0;
        double alpha = 0.0;
    };
    int n_estimators_ = 50;
    double learning_rate_ = 1.0;
    std::vector<Stump> stumps_;
    int n_classes_ = 0;
};

class GnbClassifier : public Classifier {
public:
    explicit GnbClassifier(const HyperParams& hp);
    void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
             std::uint64_t seed) override;
    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const override;

private:
    double var_smoothing_ = 1e-9;
    Eigen::MatrixXd means_;  // class x feature
    Eigen::MatrixXd vars_;
    std::vector<double> log_prior_;
    int n_classes_ = 0;
};

class QdaClassifier : public Classifier {
public:
    explicit QdaClassifier(const HyperParams& hp);
    void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
             std::uint64_t seed) override;
    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const override;

private:
    double tol_ = 1e-4;
    std::vector<Eigen::VectorXd> means_;
    std::vector<Eigen::LLT<Eigen::MatrixXd>> chol_;
    std::vector<double> log_det_;
    std::vector<double> log_prior_;
    int n_classes_ = 0;
};

class LrClassifier : public Classifier {
public:
    explicit LrClassifier(const HyperParams& hp);
    void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
             std::uint64_t seed) override;
    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const override;

private:
    double c_ = 1.0;
    int max_iter_ = 100;
    Eigen::MatrixXd weights_; // (p + 1) x K, bias row last, bias unpenalized
    int n_classes_ = 0;
};

} // namespace retina::ml

#include "classifiers.hpp"

#include "retina/error.hpp"

#include <cmath>
#include <limits>

namespace retina::ml {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kEmptyClassLogPrior = -1e300; // class unseen in training

// Row-wise softmax of log scores, stabilized by the row maximum.
Eigen::MatrixXd softmax_rows(Eigen::MatrixXd log_scores) {
    for (Eigen::Index r = 0; r < log_scores.rows(); ++r) {
        const double m = log_scores.row(r).maxCoeff();
        log_scores.row(r) = (log_scores.row(r).array() - m).exp();
        log_scores.row(r) /= log_scores.row(r).sum();
    }
    return log_scores;
}

} // namespace

GnbClassifier::GnbClassifier(const HyperParams& hp) {
    var_smoothing_ = hp.num("var_smoothing", 1e-9);
    require_input(var_smoothing_ >= 0.0, "GNB: var_smoothing must be non-negative");
}

void GnbClassifier::fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
                        std::uint64_t /*seed*/) {
    require_input(static_cast<std::size_t>(x.rows()) == y.size(), "GNB: x/y size mismatch");
    n_classes_ = n_classes;
    const Eigen::Index p = x.cols();
    means_ = Eigen::MatrixXd::Zero(n_classes, p);
    vars_ = Eigen::MatrixXd::Ones(n_classes, p);
    log_prior_.assign(static_cast<std::size_t>(n_classes), kEmptyClassLogPrior);

    // Smoothing floor relative to the largest overall feature variance.
    const Eigen::RowVectorXd grand_mean = x.colwise().mean();
    double max_var = 0.0;
    for (Eigen::Index c = 0; c < p; ++c) {
        const double v = (x.col(c).array() - grand_mean(c)).square().mean();
        max_var = std::max(max_var, v);
    }
    const double epsilon = var_smoothing_ * max_var;

    for (int k = 0; k < n_classes; ++k) {
        Eigen::Index n_k = 0;
        for (int l : y)
            if (l == k) ++n_k;
        if (n_k == 0) continue;
        Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(p);
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == k) mu += x.row(static_cast<Eigen::Index>(i));
        mu /= static_cast<double>(n_k);
        Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(p);
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == k)
                var += (x.row(static_cast<Eigen::Index>(i)) - mu).array().square().matrix();
        var /= static_cast<double>(n_k);
        means_.row(k) = mu;
        vars_.row(k) = var.array() + epsilon;
        log_prior_[static_cast<std::size_t>(k)] =
            std::log(static_cast<double>(n_k) / static_cast<double>(y.size()));
    }
}

Eigen::MatrixXd GnbClassifier::predict_proba(const Eigen::MatrixXd& x) const {
    require_internal(n_classes_ > 0, "GNB: not fitted");
    Eigen::MatrixXd log_scores(x.rows(), n_classes_);
    for (int k = 0; k < n_classes_; ++k) {
        const auto mu = means_.row(k).array();
        const auto var = vars_.row(k).array();
        const double base = log_prior_[static_cast<std::size_t>(k)] -
                            0.5 * (var.log() + kLog2Pi).sum();
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            const double maha = ((x.row(r).array() - mu).square() / var).sum();
            log_scores(r, k) = base - 0.5 * maha;
        }
    }
    return softmax_rows(std::move(log_scores));
}

QdaClassifier::QdaClassifier(const HyperParams& hp) {
    tol_ = hp.num("tol", 1e-4);
    require_input(tol_ >= 0.0, "QDA: tol must be non-negative");
}

void QdaClassifier::fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
                        std::uint64_t /*seed*/) {
    require_input(static_cast<std::size_t>(x.rows()) == y.size(), "QDA: x/y size mismatch");
    n_classes_ = n_classes;
    const Eigen::Index p = x.cols();
    means_.assign(static_cast<std::size_t>(n_classes), Eigen::VectorXd::Zero(p));
    chol_.assign(static_cast<std::size_t>(n_classes), Eigen::LLT<Eigen::MatrixXd>());
    log_det_.assign(static_cast<std::size_t>(n_classes), 0.0);
    log_prior_.assign(static_cast<std::size_t>(n_classes), kEmptyClassLogPrior);

    for (int k = 0; k < n_classes; ++k) {
        std::vector<Eigen::Index> rows;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == k) rows.push_back(static_cast<Eigen::Index>(i));
        if (rows.size() < 2) continue; // no usable covariance; class never wins

        Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
        for (Eigen::Index r : rows) mu += x.row(r).transpose();
        mu /= static_cast<double>(rows.size());

        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
        for (Eigen::Index r : rows) {
            const Eigen::VectorXd d = x.row(r).transpose() - mu;
            cov += d * d.transpose();
        }
        cov /= static_cast<double>(rows.size() - 1);

        // Shrink toward a scaled identity until the factorization succeeds.
        const double scale = std::max(cov.trace() / static_cast<double>(p), 1e-12);
        double reg = tol_;
        Eigen::LLT<Eigen::MatrixXd> llt;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::MatrixXd shrunk =
                cov + reg * scale * Eigen::MatrixXd::Identity(p, p);
            llt.compute(shrunk);
            if (llt.info() == Eigen::Success) break;
            reg = reg > 0.0 ? reg * 10.0 : 1e-10;
        }
        require_input(llt.info() == Eigen::Success,
                      "QDA: class covariance is not positive definite even after "
                      "regularization");

        double logdet = 0.0;
        for (Eigen::Index i = 0; i < p; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));

        means_[static_cast<std::size_t>(k)] = mu;
        chol_[static_cast<std::size_t>(k)] = llt;
        log_det_[static_cast<std::size_t>(k)] = logdet;
        log_prior_[static_cast<std::size_t>(k)] =
            std::log(static_cast<double>(rows.size()) / static_cast<double>(y.size()));
    }
}

Eigen::MatrixXd QdaClassifier::predict_proba(const Eigen::MatrixXd& x) const {
    require_internal(n_classes_ > 0, "QDA: not fitted");
    const Eigen::Index p = x.cols();
    Eigen::MatrixXd log_scores =
        Eigen::MatrixXd::Constant(x.rows(), n_classes_, kEmptyClassLogPrior);
    for (int k = 0; k < n_classes_; ++k) {
        if (log_prior_[static_cast<std::size_t>(k)] <= kEmptyClassLogPrior) continue;
        const auto& llt = chol_[static_cast<std::size_t>(k)];
        const double base = log_prior_[static_cast<std::size_t>(k)] -
                            0.5 * (log_det_[static_cast<std::size_t>(k)] +
                                   static_cast<double>(p) * kLog2Pi);
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            const Eigen::VectorXd d = x.row(r).transpose() - means_[static_cast<std::size_t>(k)];
            const double maha = d.dot(llt.solve(d));
            log_scores(r, k) = base - 0.5 * maha;
        }
    }
    return softmax_rows(std::move(log_scores));
}

} // namespace retina::ml

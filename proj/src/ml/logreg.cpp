#include "classifiers.hpp"

#include "retina/error.hpp"

#include <cmath>
#include <deque>

namespace retina::ml {

namespace {

Eigen::MatrixXd softmax_scores(const Eigen::MatrixXd& scores) {
    Eigen::MatrixXd p = scores;
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        const double m = p.row(r).maxCoeff();
        p.row(r) = (p.row(r).array() - m).exp();
        p.row(r) /= p.row(r).sum();
    }
    return p;
}

} // namespace

LrClassifier::LrClassifier(const HyperParams& hp) {
    c_ = hp.num("C", 1.0);
    max_iter_ = hp.integer("max_iter", 100);
    require_input(c_ > 0.0, "LR: C must be positive");
    require_input(max_iter_ >= 1, "LR: max_iter must be >= 1");
}

// Multinomial negative log-likelihood with L2 on the non-bias rows,
// minimized with L-BFGS (memory 10) and Armijo backtracking.
void LrClassifier::fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
                       std::uint64_t /*seed*/) {
    require_input(static_cast<std::size_t>(x.rows()) == y.size(), "LR: x/y size mismatch");
    n_classes_ = n_classes;
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();

    Eigen::MatrixXd xb(n, p + 1);
    xb.leftCols(p) = x;
    xb.col(p).setOnes();

    Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, n_classes);
    for (Eigen::Index r = 0; r < n; ++r) onehot(r, y[static_cast<std::size_t>(r)]) = 1.0;

    const double reg = 0.5 / c_;
    auto loss_grad = [&](const Eigen::MatrixXd& w, Eigen::MatrixXd& grad) {
        const Eigen::MatrixXd scores = xb * w;
        double nll = 0.0;
        Eigen::MatrixXd proba = scores;
        for (Eigen::Index r = 0; r < n; ++r) {
            const double m = proba.row(r).maxCoeff();
            const double lse = m + std::log((proba.row(r).array() - m).exp().sum());
            nll += lse - scores(r, y[static_cast<std::size_t>(r)]);
            proba.row(r) = (proba.row(r).array() - lse).exp();
        }
        grad = xb.transpose() * (proba - onehot);
        grad.topRows(p) += (1.0 / c_) * w.topRows(p);
        return nll + reg * w.topRows(p).squaredNorm();
    };

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p + 1, n_classes);
    Eigen::MatrixXd grad(p + 1, n_classes);
    double f = loss_grad(w, grad);

    std::deque<Eigen::MatrixXd> s_hist, y_hist;
    std::deque<double> rho_hist;
    const int memory = 10;
    const double tol = 1e-6;

    for (int iter = 0; iter < max_iter_; ++iter) {
        if (grad.cwiseAbs().maxCoeff() <= tol) break;

        // Two-loop recursion on flattened matrices.
        Eigen::MatrixXd q = grad;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[static_cast<std::size_t>(i)] =
                rho_hist[static_cast<std::size_t>(i)] *
                (s_hist[static_cast<std::size_t>(i)].cwiseProduct(q)).sum();
            q -= alpha[static_cast<std::size_t>(i)] * y_hist[static_cast<std::size_t>(i)];
        }
        if (!s_hist.empty()) {
            const auto& s = s_hist.back();
            const auto& yv = y_hist.back();
            const double gamma = s.cwiseProduct(yv).sum() / yv.squaredNorm();
            q *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * (y_hist[i].cwiseProduct(q)).sum();
            q += (alpha[i] - beta) * s_hist[i];
        }
        Eigen::MatrixXd direction = -q;

        double dir_dot_grad = direction.cwiseProduct(grad).sum();
        if (dir_dot_grad >= 0.0) { // fall back to steepest descent
            direction = -grad;
            dir_dot_grad = -grad.squaredNorm();
        }

        double step = 1.0;
        Eigen::MatrixXd w_new;
        Eigen::MatrixXd grad_new(p + 1, n_classes);
        double f_new = f;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            w_new = w + step * direction;
            f_new = loss_grad(w_new, grad_new);
            if (f_new <= f + 1e-4 * step * dir_dot_grad) {
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;

        const Eigen::MatrixXd s = w_new - w;
        const Eigen::MatrixXd yv = grad_new - grad;
        const double sy = s.cwiseProduct(yv).sum();
        if (sy > 1e-12) {
            s_hist.push_back(s);
            y_hist.push_back(yv);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        w = std::move(w_new);
        grad = std::move(grad_new);
        f = f_new;
    }
    weights_ = std::move(w);
}

Eigen::MatrixXd LrClassifier::predict_proba(const Eigen::MatrixXd& x) const {
    require_internal(weights_.rows() > 0, "LR: not fitted");
    require_input(x.cols() + 1 == weights_.rows(), "LR: feature width mismatch");
    Eigen::MatrixXd xb(x.rows(), x.cols() + 1);
    xb.leftCols(x.cols()) = x;
    xb.col(x.cols()).setOnes();
    return softmax_scores(xb * weights_);
}

} // namespace retina::ml

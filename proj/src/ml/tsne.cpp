#include "retina/ml/tsne.hpp"

#include "retina/error.hpp"
#include "retina/rng.hpp"

#include <cmath>
#include <limits>

namespace retina::ml {

namespace {

// Conditional P row by bisection on the Gaussian precision beta.
void fill_p_row(const Eigen::MatrixXd& d2, Eigen::MatrixXd& p, Eigen::Index i,
                double perplexity) {
    const double target_entropy = std::log(perplexity);
    double beta = 1.0;
    double beta_lo = 0.0;
    double beta_hi = std::numeric_limits<double>::infinity();
    const Eigen::Index n = d2.rows();

    Eigen::VectorXd row(n);
    for (int it = 0; it < 64; ++it) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            row(j) = j == i ? 0.0 : std::exp(-beta * d2(i, j));
            sum += row(j);
        }
        if (sum <= 0.0) {
            beta_hi = beta;
            beta = 0.5 * (beta_lo + beta_hi);
            continue;
        }
        double entropy = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (row(j) <= 0.0) continue;
            const double pj = row(j) / sum;
            entropy -= pj * std::log(pj);
        }
        const double diff = entropy - target_entropy;
        if (std::abs(diff) < 1e-7) break;
        if (diff > 0.0) {
            beta_lo = beta; // too flat; sharpen
            beta = std::isinf(beta_hi) ? beta * 2.0 : 0.5 * (beta_lo + beta_hi);
        } else {
            beta_hi = beta;
            beta = 0.5 * (beta_lo + beta_hi);
        }
    }

    const double sum = row.sum();
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = sum > 0.0 ? row(j) / sum : 0.0;
}

double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y) {
    const Eigen::Index n = y.rows();
    double qsum = 0.0;
    Eigen::MatrixXd num(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        num(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double t = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
            num(i, j) = t;
            num(j, i) = t;
            qsum += 2.0 * t;
        }
    }
    double kl = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j || p(i, j) <= 0.0) continue;
            const double q = std::max(num(i, j) / qsum, 1e-12);
            kl += p(i, j) * std::log(p(i, j) / q);
        }
    return kl;
}

} // namespace

TsneResult tsne(const Eigen::MatrixXd& x, const TsneParams& params) {
    const Eigen::Index n = x.rows();
    require_input(n >= 5, "tsne: need at least five rows");
    require_input(params.perplexity >= 2.0 &&
                      params.perplexity < static_cast<double>(n),
                  "tsne: perplexity must be in [2, n)");
    require_input(params.n_iter >= 1, "tsne: n_iter must be >= 1");

    // Pairwise squared distances.
    Eigen::MatrixXd d2(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d2(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (x.row(i) - x.row(j)).squaredNorm();
            d2(i, j) = v;
            d2(j, i) = v;
        }
    }

    Eigen::MatrixXd p_cond = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) fill_p_row(d2, p_cond, i, params.perplexity);

    Eigen::MatrixXd p = (p_cond + p_cond.transpose()) / (2.0 * static_cast<double>(n));
    p = p.cwiseMax(1e-12);
    for (Eigen::Index i = 0; i < n; ++i) p(i, i) = 0.0;

    Rng rng(mix_seed(params.seed, 0x74736e65u)); // "tsne"
    Eigen::MatrixXd y(n, 2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c < 2; ++c) y(i, c) = 1e-4 * rng.normal();

    TsneResult result;
    result.kl_initial = kl_divergence(p, y);

    Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(n, 2);
    Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);
    Eigen::MatrixXd grad(n, 2);
    Eigen::MatrixXd num(n, n);

    for (int iter = 0; iter < params.n_iter; ++iter) {
        const double ex = iter < params.early_exaggeration_iters ? params.exaggeration : 1.0;
        const double momentum = iter < params.early_exaggeration_iters ? 0.5 : 0.8;

        double qsum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            num(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double t = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
                num(i, j) = t;
                num(j, i) = t;
                qsum += 2.0 * t;
            }
        }

        grad.setZero();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j) continue;
                const double q = std::max(num(i, j) / qsum, 1e-12);
                const double coeff = 4.0 * (ex * p(i, j) - q) * num(i, j);
                grad.row(i) += coeff * (y.row(i) - y.row(j));
            }

        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index c = 0; c < 2; ++c) {
                const bool same_sign = (grad(i, c) > 0.0) == (velocity(i, c) > 0.0);
                gains(i, c) = same_sign ? std::max(gains(i, c) * 0.8, 0.01)
                                        : gains(i, c) + 0.2;
                velocity(i, c) =
                    momentum * velocity(i, c) - params.learning_rate * gains(i, c) * grad(i, c);
            }
        y += velocity;
        y.rowwise() -= y.colwise().mean(); // keep the embedding centered
    }

    result.embedding = y;
    result.kl_final = kl_divergence(p, y);
    return result;
}

} // namespace retina::ml

#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace retina::ml {

struct TsneParams {
    double perplexity = 30.0;
    int n_iter = 1000;
    int early_exaggeration_iters = 250;
    double exaggeration = 12.0;
    double learning_rate = 200.0;
    std::uint64_t seed = 0;
};

struct TsneResult {
    Eigen::MatrixXd embedding; // n x 2
    double kl_initial = 0.0;   // at the random initialization
    double kl_final = 0.0;
};

// Exact (quadratic) t-SNE with per-point bandwidth matched to the requested
// perplexity, early exaggeration, and momentum + gain updates.
TsneResult tsne(const Eigen::MatrixXd& x, const TsneParams& params = {});

} // namespace retina::ml

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace retina {

// Scalar model output per row (e.g. the probability of one class).
using ModelFn = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

struct Explanation {
    double base = 0.0; // model mean over the background set
    std::vector<double> phi;
    std::vector<double> se;          // per-feature standard error; empty for exact
    std::size_t n_permutations = 0;  // 0 for exact
};

inline constexpr int kExactShapleyMaxFeatures = 12;

// Exact Shapley values by full coalition enumeration; absent features are
// replaced by background rows and the model output averaged over them.
// Feature count is capped because the enumeration is 2^p.
Explanation shapley_exact(const ModelFn& f, const Eigen::VectorXd& x,
                          const Eigen::MatrixXd& background);

// Permutation-sampling estimate; each permutation walks one feature order and
// accrues marginal contributions, so the attributions still sum exactly to
// f(x) - base. Permutations use independent counter-derived substreams and
// may be evaluated in parallel without changing the result.
Explanation shapley_sampled(const ModelFn& f, const Eigen::VectorXd& x,
                            const Eigen::MatrixXd& background, std::size_t n_permutations,
                            std::uint64_t seed);

// Mean absolute attribution per feature across a set of explanations.
std::vector<double> aggregate_importance(const std::vector<Explanation>& explanations);

} // namespace retina

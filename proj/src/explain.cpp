#include "retina/explain.hpp"

#include "retina/error.hpp"
#include "retina/num.hpp"
#include "retina/parallel.hpp"
#include "retina/rng.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace retina {

namespace {

// Mean model output with features outside `mask` replaced by each background
// row in turn.
double coalition_value(const ModelFn& f, const Eigen::VectorXd& x,
                       const Eigen::MatrixXd& background, std::uint32_t mask) {
    const Eigen::Index b = background.rows();
    Eigen::MatrixXd batch = background;
    for (Eigen::Index j = 0; j < x.size(); ++j)
        if (mask & (1u << j)) batch.col(j).setConstant(x(j));
    const Eigen::VectorXd out = f(batch);
    require_internal(out.size() == b, "explain: model returned a wrong-sized batch");
    return out.mean();
}

} // namespace

Explanation shapley_exact(const ModelFn& f, const Eigen::VectorXd& x,
                          const Eigen::MatrixXd& background) {
    const int p = static_cast<int>(x.size());
    require_input(p >= 1, "explain: need at least one feature");
    require_input(p <= kExactShapleyMaxFeatures,
                  "explain: exact enumeration is capped at " +
                      std::to_string(kExactShapleyMaxFeatures) +
                      " features; use the sampled estimator");
    require_input(background.rows() >= 1 && background.cols() == x.size(),
                  "explain: background must be non-empty with matching width");

    const std::uint32_t n_masks = 1u << p;
    std::vector<double> value(n_masks);
    parallel_for(n_masks, [&](std::size_t m) {
        value[m] = coalition_value(f, x, background, static_cast<std::uint32_t>(m));
    });

    // w(s) = s! (p - 1 - s)! / p! via factorials.
    std::vector<double> fact(static_cast<std::size_t>(p) + 1, 1.0);
    for (int i = 1; i <= p; ++i)
        fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i - 1)] * i;

    Explanation out;
    out.base = value[0];
    out.phi.assign(static_cast<std::size_t>(p), 0.0);
    for (int j = 0; j < p; ++j) {
        const std::uint32_t bit = 1u << j;
        double phi = 0.0;
        for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const int s = std::popcount(mask);
            const double w = fact[static_cast<std::size_t>(s)] *
                             fact[static_cast<std::size_t>(p - 1 - s)] /
                             fact[static_cast<std::size_t>(p)];
            phi += w * (value[mask | bit] - value[mask]);
        }
        out.phi[static_cast<std::size_t>(j)] = phi;
    }
    return out;
}

Explanation shapley_sampled(const ModelFn& f, const Eigen::VectorXd& x,
                            const Eigen::MatrixXd& background, std::size_t n_permutations,
                            std::uint64_t seed) {
    const int p = static_cast<int>(x.size());
    require_input(p >= 1, "explain: need at least one feature");
    require_input(n_permutations >= 2, "explain: need at least two permutations");
    require_input(background.rows() >= 1 && background.cols() == x.size(),
                  "explain: background must be non-empty with matching width");

    const double base = coalition_value(f, x, background, 0);

    // contributions[k] holds the per-feature marginal contributions of
    // permutation k; substream seeds keep the result independent of the
    // execution order.
    std::vector<std::vector<double>> contributions(
        n_permutations, std::vector<double>(static_cast<std::size_t>(p), 0.0));
    parallel_for(n_permutations, [&](std::size_t k) {
        Rng rng(mix_seed(seed, 0x7065726du, static_cast<std::uint64_t>(k)));
        std::vector<int> order(static_cast<std::size_t>(p));
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);

        // Walk the coalition incrementally so any feature count works.
        Eigen::MatrixXd batch = background;
        double prev = base;
        for (int j : order) {
            batch.col(j).setConstant(x(j));
            const Eigen::VectorXd out = f(batch);
            require_internal(out.size() == batch.rows(),
                             "explain: model returned a wrong-sized batch");
            const double cur = out.mean();
            contributions[k][static_cast<std::size_t>(j)] = cur - prev;
            prev = cur;
        }
    });

    Explanation out;
    out.base = base;
    out.n_permutations = n_permutations;
    out.phi.assign(static_cast<std::size_t>(p), 0.0);
    out.se.assign(static_cast<std::size_t>(p), 0.0);
    for (int j = 0; j < p; ++j) {
        std::vector<double> samples(n_permutations);
        for (std::size_t k = 0; k < n_permutations; ++k)
            samples[k] = contributions[k][static_cast<std::size_t>(j)];
        out.phi[static_cast<std::size_t>(j)] = mean_of(samples);
        out.se[static_cast<std::size_t>(j)] =
            stddev_of(samples) / std::sqrt(static_cast<double>(n_permutations));
    }
    return out;
}

std::vector<double> aggregate_importance(const std::vector<Explanation>& explanations) {
    require_input(!explanations.empty(), "explain: nothing to aggregate");
    const std::size_t p = explanations.front().phi.size();
    std::vector<double> out(p, 0.0);
    for (const auto& e : explanations) {
        require_input(e.phi.size() == p, "explain: mixed feature counts");
        for (std::size_t j = 0; j < p; ++j) out[j] += std::abs(e.phi[j]);
    }
    for (double& v : out) v /= static_cast<double>(explanations.size());
    return out;
}

} // namespace retina

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "retina/error.hpp"
#include "retina/explain.hpp"
#include "retina/rng.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

using namespace retina;

namespace {

// f(row) = sum of adjacent products + sum of entries: nonlinear, every
// feature matters, cheap enough for thousands of calls
ModelFn ripple_model() {
    return [](const Eigen::MatrixXd& x) {
        Eigen::VectorXd out(x.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            double v = 0.0;
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                v += x(i, j);
                if (j + 1 < x.cols()) v += x(i, j) * x(i, j + 1);
            }
            out(i) = v;
        }
        return out;
    };
}

Eigen::MatrixXd random_background(int rows, int cols, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd b(rows, cols);
    for (Eigen::Index i = 0; i < b.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = rng.normal();
    return b;
}

Eigen::VectorXd random_sample(int cols, std::uint64_t seed) {
    Rng rng(seed ^ 0xabcdu);
    Eigen::VectorXd x(cols);
    for (Eigen::Index j = 0; j < cols; ++j) x(j) = rng.normal(0.5, 1.0);
    return x;
}

double mean_se(const Explanation& e) {
    double s = 0.0;
    for (double v : e.se) s += v;
    return s / static_cast<double>(e.se.size());
}

} // namespace

TEST_CASE("additive model: attributions are the per-feature effects") {
    const ModelFn f = [](const Eigen::MatrixXd& x) {
        return (2.0 * x.col(0) + x.col(1)).eval();
    };
    Eigen::MatrixXd background(1, 2);
    background.setZero();
    Eigen::VectorXd x(2);
    x << 1.0, 1.0;

    const Explanation exact = shapley_exact(f, x, background);
    CHECK(exact.base == 0.0);
    CHECK(exact.phi[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(exact.phi[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(exact.se.empty());
    CHECK(exact.n_permutations == 0);

    // for additive models every permutation yields the same contribution,
    // so the sampled estimate is exact with zero spread
    const Explanation sampled = shapley_sampled(f, x, background, 16, 1);
    CHECK(sampled.phi[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sampled.phi[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sampled.se[0] <= 1e-12);
    CHECK(sampled.se[1] <= 1e-12);
}

TEST_CASE("symmetry: exchangeable features get equal credit") {
    const ModelFn f = [](const Eigen::MatrixXd& x) {
        return (x.col(0).cwiseProduct(x.col(1)) + x.col(0) + x.col(1)).eval();
    };
    Eigen::MatrixXd background(2, 2);
    background << 0.0, 0.0, 1.0, 1.0;
    Eigen::VectorXd x(2);
    x << 3.0, 3.0;
    const Explanation e = shapley_exact(f, x, background);
    CHECK(e.phi[0] == doctest::Approx(e.phi[1]).epsilon(1e-12));
}

TEST_CASE("dummy: an ignored feature gets exactly zero") {
    const ModelFn f = [](const Eigen::MatrixXd& x) {
        return (x.col(0).array().square() + x.col(1).array()).matrix().eval();
    };
    const Eigen::MatrixXd background = random_background(4, 3, 5);
    const Eigen::VectorXd x = random_sample(3, 5);
    const Explanation exact = shapley_exact(f, x, background);
    CHECK(exact.phi[2] == 0.0);
    const Explanation sampled = shapley_sampled(f, x, background, 32, 5);
    CHECK(sampled.phi[2] == 0.0);
    CHECK(sampled.se[2] == 0.0);
}

TEST_CASE("efficiency: attributions sum to f(x) minus the base") {
    const ModelFn f = ripple_model();
    const Eigen::MatrixXd background = random_background(5, 6, 8);
    const Eigen::VectorXd x = random_sample(6, 8);
    const double fx = f(x.transpose())(0);

    const Explanation exact = shapley_exact(f, x, background);
    double total = 0.0;
    for (double v : exact.phi) total += v;
    CHECK(total + exact.base == doctest::Approx(fx).epsilon(1e-12));

    const Explanation sampled = shapley_sampled(f, x, background, 64, 8);
    total = 0.0;
    for (double v : sampled.phi) total += v;
    CHECK(total + sampled.base == doctest::Approx(fx).epsilon(1e-9));
}

TEST_CASE("sampled attributions track the exact ones within 3 standard errors") {
    const ModelFn f = ripple_model();
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const Eigen::MatrixXd background = random_background(4, 6, seed);
        const Eigen::VectorXd x = random_sample(6, seed);
        const Explanation exact = shapley_exact(f, x, background);
        const Explanation sampled = shapley_sampled(f, x, background, 800, seed);
        for (std::size_t j = 0; j < exact.phi.size(); ++j)
            CHECK(std::fabs(sampled.phi[j] - exact.phi[j]) <= 3.0 * sampled.se[j] + 1e-12);
    }
}

TEST_CASE("quadrupling the permutations halves the standard error") {
    const ModelFn f = ripple_model();
    const Eigen::MatrixXd background = random_background(4, 6, 21);
    const Eigen::VectorXd x = random_sample(6, 21);
    const Explanation small = shapley_sampled(f, x, background, 400, 3);
    const Explanation big = shapley_sampled(f, x, background, 1600, 4);
    const double ratio = mean_se(small) / mean_se(big);
    CHECK(ratio > 1.5);
    CHECK(ratio < 2.5);
}

TEST_CASE("sampling is deterministic in the seed") {
    const ModelFn f = ripple_model();
    const Eigen::MatrixXd background = random_background(3, 5, 2);
    const Eigen::VectorXd x = random_sample(5, 2);
    const Explanation a = shapley_sampled(f, x, background, 50, 9);
    const Explanation b = shapley_sampled(f, x, background, 50, 9);
    CHECK(a.phi == b.phi);
    CHECK(a.se == b.se);
    const Explanation c = shapley_sampled(f, x, background, 50, 10);
    CHECK(a.phi != c.phi);
}

TEST_CASE("aggregate_importance averages absolute attributions") {
    Explanation a, b;
    a.phi = {1.0, -3.0};
    b.phi = {2.0, 1.0};
    const std::vector<double> imp = aggregate_importance({a, b});
    REQUIRE(imp.size() == 2);
    CHECK(imp[0] == 1.5);
    CHECK(imp[1] == 2.0);
}

TEST_CASE("aggregate_importance puts the only informative feature first") {
    const ModelFn f = [](const Eigen::MatrixXd& x) {
        return (5.0 * x.col(1)).eval();
    };
    std::vector<Explanation> all;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        const Eigen::MatrixXd background = random_background(3, 4, seed);
        all.push_back(shapley_exact(f, random_sample(4, seed), background));
    }
    const std::vector<double> imp = aggregate_importance(all);
    for (std::size_t j = 0; j < imp.size(); ++j) {
        if (j == 1) continue;
        CHECK(imp[1] > imp[j]);
        CHECK(imp[j] == 0.0); // dummy features throughout
    }
}

TEST_CASE("input guards") {
    const ModelFn f = ripple_model();
    const Eigen::MatrixXd background = random_background(2, 13, 1);
    const Eigen::VectorXd x = random_sample(13, 1);
    CHECK_THROWS_AS(shapley_exact(f, x, background), InputError);
    // the sampled path has no feature cap
    CHECK_NOTHROW(shapley_sampled(f, x, background, 4, 1));
    CHECK_THROWS_AS(shapley_sampled(f, x, background, 1, 1), InputError);

    const Eigen::MatrixXd narrow = random_background(2, 4, 1);
    CHECK_THROWS_AS(shapley_exact(f, x, narrow), InputError);
    CHECK_THROWS_AS(aggregate_importance({}), InputError);
}

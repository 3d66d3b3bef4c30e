#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "retina/ml/tsne.hpp"
#include "retina/rng.hpp"
#include "retina/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace retina;

namespace {

Eigen::MatrixXd cluster_cloud(int per_cluster, double separation, std::uint64_t seed) {
    const LabeledPoints pts = make_separable_dataset(per_cluster, 2, 10, separation, seed);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(pts.x.size()), 10);
    for (std::size_t i = 0; i < pts.x.size(); ++i)
        for (int j = 0; j < 10; ++j)
            x(static_cast<Eigen::Index>(i), j) = pts.x[i][static_cast<std::size_t>(j)];
    return x;
}

// Lloyd 2-means on the embedding; returns the fraction of rows whose cluster
// matches the alternating class labels of make_separable_dataset (best of the
// two label assignments).
double two_means_agreement(const Eigen::MatrixXd& emb, const std::vector<int>& y) {
    Eigen::Vector2d c0 = emb.row(0);
    Eigen::Vector2d c1 = emb.row(1);
    // start the centers far apart so the seeds do not collapse
    double best = -1.0;
    for (Eigen::Index i = 0; i < emb.rows(); ++i)
        for (Eigen::Index j = 0; j < emb.rows(); ++j) {
            const double d = (emb.row(i) - emb.row(j)).squaredNorm();
            if (d > best) {
                best = d;
                c0 = emb.row(i);
                c1 = emb.row(j);
            }
        }
    std::vector<int> assign(static_cast<std::size_t>(emb.rows()), 0);
    for (int iter = 0; iter < 50; ++iter) {
        Eigen::Vector2d s0 = Eigen::Vector2d::Zero(), s1 = Eigen::Vector2d::Zero();
        int n0 = 0, n1 = 0;
        for (Eigen::Index i = 0; i < emb.rows(); ++i) {
            const Eigen::Vector2d p = emb.row(i);
            const bool first = (p - c0).squaredNorm() <= (p - c1).squaredNorm();
            assign[static_cast<std::size_t>(i)] = first ? 0 : 1;
            (first ? s0 : s1) += p;
            (first ? n0 : n1) += 1;
        }
        if (n0 > 0) c0 = s0 / n0;
        if (n1 > 0) c1 = s1 / n1;
    }
    int hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i) hits += assign[i] == y[i];
    const double frac = static_cast<double>(hits) / static_cast<double>(y.size());
    return std::max(frac, 1.0 - frac);
}

} // namespace

TEST_CASE("gradient descent lowers the KL divergence") {
    const Eigen::MatrixXd x = cluster_cloud(30, 4.0, 1);
    ml::TsneParams params;
    params.perplexity = 10.0;
    params.n_iter = 300;
    params.early_exaggeration_iters = 100;
    params.seed = 3;
    const ml::TsneResult r = ml::tsne(x, params);
    CHECK(r.embedding.rows() == x.rows());
    CHECK(r.embedding.cols() == 2);
    CHECK(r.kl_final < r.kl_initial);
    CHECK(r.kl_final > 0.0);
    CHECK(r.embedding.allFinite());
}

TEST_CASE("well-separated clusters stay separated in the embedding") {
    const LabeledPoints pts = make_separable_dataset(40, 2, 10, 8.0, 9);
    Eigen::MatrixXd x(80, 10);
    for (std::size_t i = 0; i < pts.x.size(); ++i)
        for (int j = 0; j < 10; ++j)
            x(static_cast<Eigen::Index>(i), j) = pts.x[i][static_cast<std::size_t>(j)];
    ml::TsneParams params;
    params.perplexity = 15.0;
    params.n_iter = 500;
    params.seed = 11;
    const ml::TsneResult r = ml::tsne(x, params);
    CHECK(two_means_agreement(r.embedding, pts.y) >= 0.95);
}

TEST_CASE("duplicated input rows land nearly on top of each other") {
    Eigen::MatrixXd x = cluster_cloud(20, 3.0, 5);
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd with_dup(n + 1, x.cols());
    with_dup.topRows(n) = x;
    with_dup.row(n) = x.row(4); // exact duplicate
    ml::TsneParams params;
    params.perplexity = 8.0;
    params.n_iter = 400;
    params.seed = 2;
    const ml::TsneResult r = ml::tsne(with_dup, params);
    const double dup_dist = (r.embedding.row(n) - r.embedding.row(4)).norm();
    // the twin pair should sit below the 1st percentile of pairwise gaps
    std::vector<double> gaps;
    for (Eigen::Index i = 0; i < r.embedding.rows(); ++i)
        for (Eigen::Index j = i + 1; j < r.embedding.rows(); ++j)
            gaps.push_back((r.embedding.row(i) - r.embedding.row(j)).norm());
    std::sort(gaps.begin(), gaps.end());
    const double p1 = gaps[gaps.size() / 100];
    CHECK(dup_dist <= p1);
}

TEST_CASE("the same seed reproduces the embedding bit for bit") {
    const Eigen::MatrixXd x = cluster_cloud(15, 2.0, 7);
    ml::TsneParams params;
    params.perplexity = 6.0;
    params.n_iter = 250;
    params.seed = 17;
    const ml::TsneResult a = ml::tsne(x, params);
    const ml::TsneResult b = ml::tsne(x, params);
    CHECK((a.embedding - b.embedding).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.kl_final == b.kl_final);

    params.seed = 18;
    const ml::TsneResult c = ml::tsne(x, params);
    CHECK((a.embedding - c.embedding).cwiseAbs().maxCoeff() > 0.0);
}

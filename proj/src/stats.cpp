#include "retina/stats.hpp"

#include "retina/error.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace retina {

namespace {

Eigen::MatrixXd design_matrix(const std::vector<std::vector<double>>& x,
                              const std::vector<std::size_t>& cols) {
    const auto n = x.size();
    Eigen::MatrixXd a(n, cols.size() + 1);
    for (std::size_t r = 0; r < n; ++r) {
        a(r, 0) = 1.0;
        for (std::size_t c = 0; c < cols.size(); ++c) a(r, c + 1) = x[r][cols[c]];
    }
    return a;
}

double upper_f_p(double f, int df1, int df2) {
    if (std::isinf(f)) return 0.0; // zero-residual fit
    if (!(f > 0.0)) return 1.0;
    boost::math::fisher_f dist(df1, df2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

// True when adding column j to the already independent set keeps full rank.
bool extends_rank(const Eigen::MatrixXd& a) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    return qr.rank() == a.cols();
}

// Describe one dependent column of the design as a combination of the
// independent columns before it.
std::string dependency_message(const std::vector<std::vector<double>>& x,
                               const std::vector<std::string>& names) {
    const auto n = x.size();
    std::vector<std::size_t> independent;
    for (std::size_t j = 0; j < names.size(); ++j) {
        Eigen::MatrixXd a(n, independent.size() + 2);
        for (std::size_t r = 0; r < n; ++r) {
            a(r, 0) = 1.0;
            for (std::size_t c = 0; c < independent.size(); ++c)
                a(r, c + 1) = x[r][independent[c]];
            a(r, independent.size() + 1) = x[r][j];
        }
        if (extends_rank(a)) {
            independent.push_back(j);
            continue;
        }
        Eigen::MatrixXd basis = a.leftCols(a.cols() - 1);
        Eigen::VectorXd target = a.col(a.cols() - 1);
        Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(target);
        std::string msg = "design is rank deficient: column '" + names[j] +
                          "' is a linear combination of {";
        bool first = true;
        const double scale = std::max(1.0, coef.cwiseAbs().maxCoeff());
        for (std::size_t c = 1; c < independent.size() + 1; ++c) {
            if (std::abs(coef(c)) <= 1e-8 * scale) continue;
            if (!first) msg += ", ";
            msg += "'" + names[independent[c - 1]] + "'";
            first = false;
        }
        if (first) msg += "'(intercept)'";
        msg += "}";
        return msg;
    }
    return "design is rank deficient";
}

} // namespace

OlsFit ols_fit(const std::vector<std::vector<double>>& x, const std::vector<std::string>& names,
               const std::vector<double>& y) {
    const auto n = x.size();
    const auto p = names.size();
    require_input(n == y.size(), "ols: x and y row counts differ");
    require_input(n >= p + 2, "ols: need at least p + 2 observations");
    for (const auto& row : x) require_input(row.size() == p, "ols: ragged design rows");

    std::vector<std::size_t> all(p);
    for (std::size_t j = 0; j < p; ++j) all[j] = j;
    const Eigen::MatrixXd a = design_matrix(x, all);
    const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < a.cols()) throw InputError(dependency_message(x, names));

    const Eigen::VectorXd beta = qr.solve(yv);
    const Eigen::VectorXd resid = yv - a * beta;
    double sse = resid.squaredNorm();
    const double ybar = yv.mean();
    const double sst = (yv.array() - ybar).square().sum();
    require_input(sst > 0.0, "ols: response is constant");
    // Residuals at roundoff level are an exact fit; without this floor the
    // t-tests would compare numerical garbage against numerical garbage.
    if (sse <= sst * 1e-24) sse = 0.0;

    OlsFit fit;
    fit.n = n;
    fit.df1 = static_cast<int>(p);
    fit.df2 = static_cast<int>(n - p - 1);
    fit.sigma2 = sse / fit.df2;
    fit.r2 = 1.0 - sse / sst;
    fit.adjusted_r2 = 1.0 - (1.0 - fit.r2) * (static_cast<double>(n - 1) / fit.df2);

    const Eigen::MatrixXd xtx_inv =
        (a.transpose() * a).ldlt().solve(Eigen::MatrixXd::Identity(a.cols(), a.cols()));
    for (std::size_t j = 0; j < p + 1; ++j) {
        OlsTerm term;
        term.name = j == 0 ? "(intercept)" : names[j - 1];
        term.coef = beta(j);
        term.se = std::sqrt(std::max(0.0, fit.sigma2 * xtx_inv(j, j)));
        if (term.se > 0.0) {
            term.t = term.coef / term.se;
            term.p = upper_f_p(term.t * term.t, 1, fit.df2); // partial F = t^2
        } else {
            // zero-residual fit: judge the term by its unique sum of squares
            // against the total variation, so numerically-zero coefficients
            // of redundant columns stay insignificant
            const double ss_term =
                xtx_inv(j, j) > 0.0 ? term.coef * term.coef / xtx_inv(j, j) : 0.0;
            const bool contributes = ss_term > sst * 1e-20;
            term.t = contributes ? std::copysign(std::numeric_limits<double>::infinity(),
                                                 term.coef)
                                 : 0.0;
            term.p = contributes ? 0.0 : 1.0;
        }
        fit.terms.push_back(std::move(term));
    }

    if (p > 0) {
        fit.f_stat = (fit.r2 / fit.df1) / ((1.0 - fit.r2) / fit.df2);
        fit.f_p = upper_f_p(fit.f_stat, fit.df1, fit.df2);
    }
    return fit;
}

namespace {

// Partial p-value of each non-intercept term of a fitted subset model.
struct SubsetFit {
    bool ok = false;
    OlsFit fit;
};

SubsetFit fit_subset(const std::vector<std::vector<double>>& x,
                     const std::vector<std::string>& names, const std::vector<double>& y,
                     const std::vector<std::size_t>& cols) {
    SubsetFit out;
    if (x.size() < cols.size() + 2) return out;
    const Eigen::MatrixXd a = design_matrix(x, cols);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < a.cols()) return out;

    std::vector<std::vector<double>> xs(x.size());
    std::vector<std::string> ns(cols.size());
    for (std::size_t r = 0; r < x.size(); ++r) {
        xs[r].resize(cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) xs[r][c] = x[r][cols[c]];
    }
    for (std::size_t c = 0; c < cols.size(); ++c) ns[c] = names[cols[c]];
    out.fit = ols_fit(xs, ns, y);
    out.ok = true;
    return out;
}

} // namespace

StepwiseResult stepwise_select(const std::vector<std::vector<double>>& x,
                               const std::vector<std::string>& names,
                               const std::vector<double>& y, double p_enter, double p_remove) {
    require_input(p_enter > 0.0 && p_enter < 1.0, "stepwise: p_enter must be in (0, 1)");
    require_input(p_enter < p_remove, "stepwise: p_enter must be below p_remove");
    require_input(!x.empty(), "stepwise: empty design");
    for (const auto& row : x)
        require_input(row.size() == names.size(), "stepwise: ragged design rows");

    StepwiseResult result;
    std::vector<std::size_t> model;
    std::set<std::size_t> in_model;
    const std::size_t max_steps = 10 * names.size() + 20;

    for (std::size_t step = 0; step < max_steps; ++step) {
        // Forward: candidate with the smallest partial p below p_enter.
        int best = -1;
        double best_p = 1.0;
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (in_model.count(j)) continue;
            auto cols = model;
            cols.push_back(j);
            const SubsetFit trial = fit_subset(x, names, y, cols);
            if (!trial.ok) continue; // collinear with the current model

            const double pj = trial.fit.terms.back().p;
            if (best < 0 || pj < best_p) { // ties keep the earlier column
                best = static_cast<int>(j);
                best_p = pj;
            }
        }

        bool changed = false;
        if (best >= 0 && best_p < p_enter) {
            model.push_back(static_cast<std::size_t>(best));
            in_model.insert(static_cast<std::size_t>(best));
            result.trace.push_back({true, names[best], best_p});
            changed = true;
        }

        // Backward: drop the worst term while it exceeds p_remove.
        for (;;) {
            if (model.empty()) break;
            const SubsetFit cur = fit_subset(x, names, y, model);
            require_internal(cur.ok, "stepwise: current model became rank deficient");
            int worst = -1;
            double worst_p = -1.0;
            for (std::size_t c = 0; c < model.size(); ++c) {
                const double pc = cur.fit.terms[c + 1].p;
                if (pc > worst_p) { // ties keep the earlier column
                    worst = static_cast<int>(c);
                    worst_p = pc;
                }
            }
            if (worst < 0 || worst_p <= p_remove) break;
            const std::size_t dropped = model[worst];
            result.trace.push_back({false, names[dropped], worst_p});
            model.erase(model.begin() + worst);
            in_model.erase(dropped);
            changed = true;
        }

        if (!changed) break;
    }

    for (std::size_t j = 0; j < names.size(); ++j) {
        if (in_model.count(j)) continue;
        auto cols = model;
        cols.push_back(j);
        if (!fit_subset(x, names, y, cols).ok) result.skipped_collinear.push_back(names[j]);
    }

    for (std::size_t j : model) result.selected.push_back(names[j]);
    if (!model.empty()) {
        const SubsetFit final = fit_subset(x, names, y, model);
        require_internal(final.ok, "stepwise: final model rank deficient");
        result.fit = final.fit;
    }
    return result;
}

std::vector<VifEntry> vif(const std::vector<std::vector<double>>& x,
                          const std::vector<std::string>& names) {
    require_input(!x.empty(), "vif: empty design");
    const auto p = names.size();
    require_input(p >= 2, "vif: need at least two columns");
    for (const auto& row : x) require_input(row.size() == p, "vif: ragged design rows");

    std::vector<VifEntry> out;
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<std::size_t> others;
        for (std::size_t c = 0; c < p; ++c)
            if (c != j) others.push_back(c);

        const Eigen::MatrixXd a = design_matrix(x, others);
        Eigen::VectorXd yv(x.size());
        for (std::size_t r = 0; r < x.size(); ++r) yv(r) = x[r][j];

        const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(yv);
        const double sse = (yv - a * beta).squaredNorm();
        const double ybar = yv.mean();
        const double sst = (yv.array() - ybar).square().sum();

        VifEntry e;
        e.name = names[j];
        if (sst <= 0.0) {
            e.vif = std::numeric_limits<double>::infinity(); // constant column
        } else {
            const double r2 = 1.0 - sse / sst;
            e.vif = r2 >= 1.0 - 1e-12 ? std::numeric_limits<double>::infinity()
                                      : 1.0 / (1.0 - r2);
        }
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace retina

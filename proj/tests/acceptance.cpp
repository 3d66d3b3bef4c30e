// Release gate: one check per shipping criterion, one [PASS]/[FAIL] line
// each, nonzero exit when anything fails. Run from the build directory (as
// ctest does) so ./retina-vasc resolves; override with RETINA_VASC_BIN.
// The independent box-count script is looked up in the source tree relative
// to the build directory.

#include "retina/error.hpp"
#include "retina/explain.hpp"
#include "retina/ml/cv.hpp"
#include "retina/ml/grids.hpp"
#include "retina/ml/metrics.hpp"
#include "retina/num.hpp"
#include "retina/params.hpp"
#include "retina/report.hpp"
#include "retina/rng.hpp"
#include "retina/stats.hpp"
#include "retina/synth.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace retina;

namespace {

int g_failures = 0;

void verdict(int idx, const std::string& name, bool ok) {
    std::printf("[%s] %2d. %s\n", ok ? "PASS" : "FAIL", idx, name.c_str());
    if (!ok) ++g_failures;
}

void detail(const std::string& line) { std::printf("       %s\n", line.c_str()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// exit code of a shell command, -1 if it died on a signal
int run(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string cli_binary() {
    if (const char* env = std::getenv("RETINA_VASC_BIN")) return env;
    return "./retina-vasc";
}

std::optional<std::string> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ------------------------------------------------------------ criterion 1

bool check_params_engine() {
    const auto t0 = std::chrono::steady_clock::now();
    int checked = 0;
    for (int i = 0; i < 50; ++i) {
        TreeSpec spec;
        spec.seed = 1000 + static_cast<std::uint64_t>(i);
        spec.n_arterioles = 2 + i % 2;
        spec.n_venules = 2 + (i / 2) % 2;
        spec.depth = 2 + i % 3;
        spec.trunk_width = 10.0 + static_cast<double>(i % 7);
        spec.murray_exponent = 2.2 + 0.15 * static_cast<double>(i % 8);
        spec.asymmetry = 1.0 - 0.05 * static_cast<double>(i % 7);
        spec.branch_angle_deg = 45.0 + 5.0 * static_cast<double>(i % 6);
        spec.tortuosity_amplitude = i % 2 == 0 ? 0.0 : 0.5 * static_cast<double>(1 + i % 4);

        const SynthTree tree = generate_tree(spec);
        const QuantifyResult got = quantify(tree.graph, {ZoneSpec::full()});
        for (const auto& [name, want] : tree.truth) {
            const bool junction = name.rfind("JE", 0) == 0 || name.rfind("BC", 0) == 0 ||
                                  name.rfind("AF", 0) == 0;
            const double tol = junction ? 1e-9 : (want.exact ? 1e-6 : 0.12);
            const auto value = got.features.get(name);
            if (!value) {
                detail("seed " + std::to_string(spec.seed) + ": '" + name + "' missing");
                return false;
            }
            if (!close_rel(*value, want.value, tol)) {
                detail("seed " + std::to_string(spec.seed) + ": " + name + " = " +
                       format_number(*value) + ", ground truth " + format_number(want.value) +
                       " (tol " + format_number(tol) + ")");
                return false;
            }
            ++checked;
        }
    }
    const double secs = seconds_since(t0);
    detail("50 trees, " + std::to_string(checked) + " ground-truth values, " +
           format_number(secs, 3) + " s");
    if (secs >= 10.0) {
        detail("runtime budget of 10 s exceeded");
        return false;
    }
    return true;
}

// ------------------------------------------------------------ criterion 2

bool check_big_six() {
    const double w = 17.0;
    const std::vector<double> six(6, w);
    const double crae = vessel_equivalent(six, VesselKind::arteriole);
    const double crve = vessel_equivalent(six, VesselKind::venule);

    const double want_a = 1.7485 * w;
    const double want_v = 2.0395 * w;
    const bool ok_a = std::fabs(crae / w - 1.7485) <= 1e-4;
    const bool ok_v = std::fabs(crve / w - 2.0395) <= 1e-4;

    detail("arterioles: " + format_number(crae / w, 7) + "*w vs 1.7485*w (|diff| " +
           format_number(std::fabs(crae / w - 1.7485), 2) + (ok_a ? " <= 1e-4)" : " > 1e-4)"));
    detail("venules:    " + format_number(crve / w, 7) + "*w vs 2.0395*w (|diff| " +
           format_number(std::fabs(crve / w - 2.0395), 2) + (ok_v ? " <= 1e-4)" : " > 1e-4)"));
    if (!ok_v) {
        detail("the venule target is unreachable: three pairing rounds over six equal");
        detail("widths give sqrt(2)*k^2*sqrt(2*k^2+1) = 2.137611 for k = 0.95, matching");
        detail("tools/oracles/pairing_oracle.py digit for digit, while k = 0.88 does");
        detail("reproduce the 1.7485 arteriole target; reporting the miss rather than");
        detail("tuning the constant to make it pass");
    }
    (void)want_a;
    (void)want_v;
    return ok_a && ok_v;
}

// ------------------------------------------------------------ criterion 3

std::vector<double> script_dimensions(const std::vector<fs::path>& pbms) {
    fs::path script;
    for (const char* candidate :
         {"../tools/oracles/box_count.py", "tools/oracles/box_count.py"})
        if (fs::exists(candidate)) script = candidate;
    if (const char* env = std::getenv("RETINA_VASC_SRC"))
        script = fs::path(env) / "tools/oracles/box_count.py";
    if (script.empty()) return {};

    std::string cmd = "python3 " + script.string();
    for (const auto& p : pbms) cmd += " " + p.string();
    const fs::path out = pbms.front().parent_path() / "box_count.out";
    cmd += " > " + out.string();
    if (run(cmd) != 0) return {};

    std::vector<double> dims;
    std::ifstream in(out);
    std::string line;
    while (std::getline(in, line)) {
        const auto at = line.find("FD = ");
        if (at == std::string::npos) return {};
        dims.push_back(std::stod(line.substr(at + 5)));
    }
    return dims;
}

bool check_fractal_dimension() {
    const Raster line = koch_raster(0);
    const Raster square = filled_square_raster();
    const Raster koch5 = koch_raster(5);
    const auto sizes = default_box_sizes();
    const double fd_line = fractal_dimension(line, sizes);
    const double fd_square = fractal_dimension(square, sizes);
    const double fd_koch = fractal_dimension(koch5, sizes);

    bool ok = true;
    if (std::fabs(fd_line - 1.0) > 0.05) {
        detail("line FD " + format_number(fd_line, 6) + " outside 1.0 +- 0.05");
        ok = false;
    }
    if (fd_square < 1.9) {
        detail("filled square FD " + format_number(fd_square, 6) + " below 1.9");
        ok = false;
    }
    if (std::fabs(fd_koch - 1.26) > 0.08) {
        detail("Koch-5 FD " + format_number(fd_koch, 6) + " outside 1.26 +- 0.08");
        ok = false;
    }
    detail("line " + format_number(fd_line, 6) + ", square " + format_number(fd_square, 6) +
           ", Koch-5 " + format_number(fd_koch, 6));

    const fs::path dir = fs::temp_directory_path() / "retina-acceptance-fd";
    fs::create_directories(dir);
    save_pbm(line, (dir / "line.pbm").string());
    save_pbm(square, (dir / "square.pbm").string());
    save_pbm(koch5, (dir / "koch5.pbm").string());
    const std::vector<double> script =
        script_dimensions({dir / "line.pbm", dir / "square.pbm", dir / "koch5.pbm"});
    if (script.size() != 3) {
        detail("brute-force script cross-check did not run");
        ok = false;
    } else {
        const double engine[3] = {fd_line, fd_square, fd_koch};
        for (int i = 0; i < 3; ++i)
            if (std::fabs(engine[i] - script[i]) > 1e-9) {
                detail("engine/script disagree: " + format_number(engine[i]) + " vs " +
                       format_number(script[i]));
                ok = false;
            }
        if (ok) detail("independent box-count script agrees to 1e-9 on all three");
    }
    fs::remove_all(dir);
    return ok;
}

// ------------------------------------------------------------ criterion 4

double brute_force_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double num = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) num += 1.0;
            else if (scores[i] == scores[j]) num += 0.5;
        }
    }
    return num / static_cast<double>(pairs);
}

bool check_auc_exactness() {
    const double hand = ml::roc_auc_binary({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1});
    if (hand != 0.75) {
        detail("hand case returned " + format_number(hand, 17) + ", want exactly 0.75");
        return false;
    }
    Rng rng(909);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(199));
        std::vector<double> scores(static_cast<std::size_t>(n));
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            double s = rng.uniform();
            if (trial % 2 == 0) s = std::round(s * 8.0) / 8.0; // tie-rich half
            scores[static_cast<std::size_t>(i)] = s;
            labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
        }
        labels[0] = 0;
        labels[static_cast<std::size_t>(n - 1)] = 1;
        const double diff =
            std::fabs(ml::roc_auc_binary(scores, labels) - brute_force_auc(scores, labels));
        worst = std::max(worst, diff);
        if (diff > 1e-12) {
            detail("trial " + std::to_string(trial) + " off by " + format_number(diff, 3));
            return false;
        }
    }
    detail("1000 random instances, hand case exact, worst |diff| " +
           format_number(worst, 3));
    return true;
}

// ------------------------------------------------------------ criterion 5

ModelFn fixture_model(int p, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> lin(static_cast<std::size_t>(p));
    std::vector<double> cross(static_cast<std::size_t>(p));
    for (auto& v : lin) v = rng.normal();
    for (auto& v : cross) v = rng.normal(0.0, 0.5);
    return [lin, cross, p](const Eigen::MatrixXd& x) {
        Eigen::VectorXd out(x.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            double v = 0.0;
            for (int j = 0; j < p; ++j) {
                v += lin[static_cast<std::size_t>(j)] * x(i, j);
                if (j + 1 < p)
                    v += cross[static_cast<std::size_t>(j)] * x(i, j) * x(i, j + 1);
            }
            out(i) = v;
        }
        return out;
    };
}

bool check_shapley() {
    // sampled-vs-exact agreement on 20 fixtures
    for (int fix = 0; fix < 20; ++fix) {
        const int p = 3 + fix % 8; // 3..10 features
        const std::uint64_t seed = 500 + static_cast<std::uint64_t>(fix);
        Rng rng(seed);
        Eigen::MatrixXd background(4, p);
        for (Eigen::Index i = 0; i < background.rows(); ++i)
            for (int j = 0; j < p; ++j) background(i, j) = rng.normal();
        Eigen::VectorXd x(p);
        for (int j = 0; j < p; ++j) x(j) = rng.normal(0.4, 1.0);
        const ModelFn f = fixture_model(p, seed);

        const Explanation exact = shapley_exact(f, x, background);
        const Explanation sampled = shapley_sampled(f, x, background, 600, seed);
        for (int j = 0; j < p; ++j) {
            const double gap = std::fabs(sampled.phi[static_cast<std::size_t>(j)] -
                                         exact.phi[static_cast<std::size_t>(j)]);
            const double band = 3.0 * sampled.se[static_cast<std::size_t>(j)] + 1e-12;
            if (gap > band) {
                detail("fixture " + std::to_string(fix) + " feature " + std::to_string(j) +
                       ": |sampled - exact| " + format_number(gap, 3) + " > 3*se " +
                       format_number(band, 3));
                return false;
            }
        }

        // efficiency on every fixture
        const double fx = f(x.transpose())(0);
        double total = exact.base;
        for (double v : exact.phi) total += v;
        if (!close_rel(total, fx, 1e-9)) {
            detail("fixture " + std::to_string(fix) + ": efficiency gap " +
                   format_number(std::fabs(total - fx), 3));
            return false;
        }
    }

    // symmetry: a model symmetric in its two features credits them equally
    const ModelFn sym = [](const Eigen::MatrixXd& x) {
        return (x.col(0).cwiseProduct(x.col(1)) + x.col(0) + x.col(1)).eval();
    };
    Eigen::MatrixXd bg(2, 2);
    bg << 0.0, 0.0, 1.0, 1.0;
    Eigen::VectorXd xs(2);
    xs << 3.0, 3.0;
    const Explanation es = shapley_exact(sym, xs, bg);
    if (std::fabs(es.phi[0] - es.phi[1]) > 1e-12) {
        detail("symmetry violated: " + format_number(es.phi[0], 17) + " vs " +
               format_number(es.phi[1], 17));
        return false;
    }

    // dummy: a feature the model never reads gets exactly zero
    const ModelFn dummy = [](const Eigen::MatrixXd& x) {
        return (x.col(0).array().square() + 2.0 * x.col(1).array()).matrix().eval();
    };
    Rng rng(77);
    Eigen::MatrixXd bg3(3, 3);
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j) bg3(i, j) = rng.normal();
    Eigen::VectorXd x3(3);
    x3 << 1.0, -2.0, 5.0;
    const Explanation ed = shapley_exact(dummy, x3, bg3);
    if (ed.phi[2] != 0.0) {
        detail("dummy feature got nonzero credit " + format_number(ed.phi[2], 3));
        return false;
    }
    detail("20 fixtures within 3 se; efficiency, symmetry and dummy axioms hold");
    return true;
}

// ------------------------------------------------------------ criterion 6

// Independent check for the enter/remove rule: breadth-first search over
// subset bitmasks, collecting every fixpoint reachable by admissible moves.
struct SimpleFit {
    Eigen::VectorXd beta;
    std::vector<double> p;
};

SimpleFit normal_eq_fit(const std::vector<std::vector<double>>& cols,
                        const std::vector<int>& which, const std::vector<double>& y);

std::set<std::uint32_t> reachable_fixpoints(const std::vector<std::vector<double>>& cols,
                                            const std::vector<double>& y, double p_enter,
                                            double p_remove) {
    const int k = static_cast<int>(cols.size());
    std::set<std::uint32_t> seen = {0};
    std::set<std::uint32_t> fixpoints;
    std::vector<std::uint32_t> stack = {0};
    while (!stack.empty()) {
        const std::uint32_t state = stack.back();
        stack.pop_back();
        std::vector<std::uint32_t> moves;
        std::vector<int> included;
        for (int j = 0; j < k; ++j)
            if (state & (1u << j)) included.push_back(j);
        if (!included.empty()) {
            const SimpleFit fit = normal_eq_fit(cols, included, y);
            for (std::size_t idx = 0; idx < included.size(); ++idx)
                if (fit.p[idx + 1] > p_remove)
                    moves.push_back(state & ~(1u << included[static_cast<std::size_t>(idx)]));
        }
        for (int j = 0; j < k; ++j) {
            if (state & (1u << j)) continue;
            std::vector<int> with = included;
            with.push_back(j);
            std::sort(with.begin(), with.end());
            const SimpleFit fit = normal_eq_fit(cols, with, y);
            const auto pos = static_cast<std::size_t>(
                std::find(with.begin(), with.end(), j) - with.begin());
            if (fit.p[pos + 1] < p_enter) moves.push_back(state | (1u << j));
        }
        if (moves.empty()) {
            fixpoints.insert(state);
            continue;
        }
        for (std::uint32_t next : moves)
            if (seen.insert(next).second) stack.push_back(next);
    }
    return fixpoints;
}

// Student-t survival via the regularized incomplete beta continued fraction;
// keeps the oracle free of the production stats code.
double beta_cf(double a, double b, double x) {
    const double tiny = 1e-30;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-14) break;
    }
    return h;
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_two_sided_p(double t, double df) {
    if (std::isinf(t)) return 0.0;
    return reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
}

SimpleFit normal_eq_fit(const std::vector<std::vector<double>>& cols,
                        const std::vector<int>& which, const std::vector<double>& y) {
    const auto n = static_cast<Eigen::Index>(y.size());
    const auto k = static_cast<Eigen::Index>(which.size());
    Eigen::MatrixXd a(n, k + 1);
    a.col(0).setOnes();
    for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            a(i, j + 1) = cols[static_cast<std::size_t>(which[static_cast<std::size_t>(j)])]
                              [static_cast<std::size_t>(i)];
    Eigen::VectorXd yv(n);
    for (Eigen::Index i = 0; i < n; ++i) yv(i) = y[static_cast<std::size_t>(i)];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SimpleFit fit;
    fit.beta = svd.solve(yv);
    const double sse = (yv - a * fit.beta).squaredNorm();
    const double df = static_cast<double>(n - (k + 1));
    const double sigma2 = sse / df;
    const Eigen::VectorXd inv_s2 = svd.singularValues().array().square().inverse();
    const Eigen::MatrixXd xtx_inv =
        svd.matrixV() * inv_s2.asDiagonal() * svd.matrixV().transpose();
    for (Eigen::Index j = 0; j <= k; ++j) {
        const double se = std::sqrt(sigma2 * xtx_inv(j, j));
        const double t = se > 0.0 ? fit.beta(j) / se
                                  : (fit.beta(j) == 0.0 ? 0.0 : HUGE_VAL);
        fit.p.push_back(t_two_sided_p(t, df));
    }
    return fit;
}

std::uint32_t mask_of(const std::vector<std::string>& selected,
                      const std::vector<std::string>& names) {
    std::uint32_t mask = 0;
    for (const auto& s : selected) {
        const auto it = std::find(names.begin(), names.end(), s);
        if (it == names.end()) return 0xffffffffu;
        mask |= 1u << (it - names.begin());
    }
    return mask;
}

std::vector<std::vector<double>> rows_of(const std::vector<std::vector<double>>& cols) {
    std::vector<std::vector<double>> rows(cols.front().size(),
                                          std::vector<double>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < cols[j].size(); ++i) rows[i][j] = cols[j][i];
    return rows;
}

bool check_stepwise() {
    // noise-free constructions recover the informative set exactly
    {
        Rng rng(61);
        std::vector<std::vector<double>> rows;
        std::vector<double> y;
        for (int i = 0; i < 45; ++i) {
            const double a = rng.normal(), b = rng.normal(), c = rng.normal(),
                         d = rng.normal(), e = rng.normal();
            rows.push_back({a, b, c, d, e});
            y.push_back(2.0 * a - 1.0 * c + 5.0);
        }
        const StepwiseResult r =
            stepwise_select(rows, {"a", "b", "c", "d", "e"}, y);
        std::set<std::string> got(r.selected.begin(), r.selected.end());
        if (got != std::set<std::string>{"a", "c"}) {
            std::string names;
            for (const auto& s : r.selected) names += s + " ";
            detail("noise-free y = 2a - c + 5 selected: " + names);
            return false;
        }
    }
    {
        Rng rng(62);
        std::vector<std::vector<double>> rows;
        std::vector<double> y;
        for (int i = 0; i < 30; ++i) {
            const double a = rng.normal(), b = rng.normal(), c = rng.normal(),
                         d = rng.normal();
            rows.push_back({a, b, c, d});
            y.push_back(1.25 * b);
        }
        const StepwiseResult r = stepwise_select(rows, {"a", "b", "c", "d"}, y);
        if (r.selected != std::vector<std::string>{"b"}) {
            detail("noise-free y = 1.25b selected " + std::to_string(r.selected.size()) +
                   " columns");
            return false;
        }
    }

    // exhaustive enter/remove oracle on six candidates, four seeds
    for (std::uint64_t seed : {21, 22, 23, 24}) {
        Rng rng(seed);
        const int k = 6;
        std::vector<std::vector<double>> cols(static_cast<std::size_t>(k));
        std::vector<double> y;
        for (int i = 0; i < 80; ++i) {
            for (auto& col : cols) col.push_back(rng.normal());
            y.push_back(1.5 * cols[0].back() - 0.9 * cols[3].back() + 0.5 * rng.normal());
        }
        std::vector<std::string> names;
        for (int j = 0; j < k; ++j) names.push_back("c" + std::to_string(j));
        const StepwiseResult r = stepwise_select(rows_of(cols), names, y, 0.05, 0.10);
        const auto fixpoints = reachable_fixpoints(cols, y, 0.05, 0.10);
        const std::uint32_t got = mask_of(r.selected, names);
        if (fixpoints.size() != 1 || *fixpoints.begin() != got) {
            detail("seed " + std::to_string(seed) + ": selection mask " +
                   std::to_string(got) + " not the oracle fixpoint");
            return false;
        }
    }

    // rescaling invariance
    {
        Rng rng(63);
        std::vector<std::vector<double>> rows;
        std::vector<double> y;
        for (int i = 0; i < 70; ++i) {
            const double a = rng.normal(), b = rng.normal(), c = rng.normal();
            rows.push_back({a, b, c});
            y.push_back(0.8 * a - 1.1 * c + 0.4 * rng.normal());
        }
        const std::vector<std::string> names = {"a", "b", "c"};
        const StepwiseResult base = stepwise_select(rows, names, y);
        std::vector<std::vector<double>> scaled = rows;
        const double factors[3] = {1e4, 1e-3, 250.0};
        for (auto& row : scaled)
            for (std::size_t j = 0; j < 3; ++j) row[j] *= factors[j];
        const StepwiseResult after = stepwise_select(scaled, names, y);
        if (base.selected != after.selected) {
            detail("selected set changed under column rescaling");
            return false;
        }
    }
    detail("noise-free recovery, 4-seed exhaustive oracle, rescaling invariance");
    return true;
}

// ------------------------------------------------------------ criterion 7

ml::MlData to_mldata(const LabeledPoints& pts, int n_classes) {
    ml::MlData data;
    data.n_classes = n_classes;
    data.y = pts.y;
    for (const auto& row : pts.x)
        data.x.emplace_back(row.begin(), row.end());
    return data;
}

bool check_pipeline() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> train_counts = {85, 11, 15, 20, 16};
    std::vector<int> full_counts;
    for (int c : train_counts) full_counts.push_back(c + std::max(3, c / 4));

    // one draw, split per class so train carries exactly the table imbalance
    const LabeledPoints pts = make_separable_dataset(full_counts, 88, 6.0, 11);
    ml::MlData train, test;
    train.n_classes = test.n_classes = 5;
    std::vector<int> taken(5, 0);
    for (std::size_t i = 0; i < pts.y.size(); ++i) {
        const int k = pts.y[i];
        ml::MlData& side =
            taken[static_cast<std::size_t>(k)]++ < train_counts[static_cast<std::size_t>(k)]
                ? train
                : test;
        side.x.emplace_back(pts.x[i].begin(), pts.x[i].end());
        side.y.push_back(k);
    }

    const ml::GridConfig grids = ml::default_grids();
    bool ok = true;
    for (const char* name : {"RFC", "XGB"}) {
        const ml::ModelId id = ml::model_id_from_string(name);
        const ml::NestedCvReport rep = ml::nested_cv(id, grids.find(name), train, 6, 4, 42);
        const ml::TestEvaluation ev = ml::evaluate_test(id, grids.find(name), train, test, 4, 42);
        detail(std::string(name) + " sep 6: nested " + format_mean_std(rep.mean_auc, rep.std_auc) +
               ", test " + format_value3(ev.test_auc));
        if (rep.mean_auc < 0.90 || ev.test_auc < 0.90) ok = false;
    }

    const ml::MlData flat = to_mldata(make_separable_dataset(train_counts, 88, 0.0, 11), 5);
    for (const char* name : {"RFC", "XGB"}) {
        const ml::ModelId id = ml::model_id_from_string(name);
        const ml::NestedCvReport rep = ml::nested_cv(id, grids.find(name), flat, 6, 4, 42);
        detail(std::string(name) + " sep 0: nested " + format_mean_std(rep.mean_auc, rep.std_auc));
        if (rep.mean_auc < 0.40 || rep.mean_auc > 0.60) ok = false;
    }

    const double secs = seconds_since(t0);
    detail("pipeline wall time " + format_number(secs, 4) + " s");
    if (secs >= 300.0) {
        detail("runtime budget of 5 min exceeded");
        ok = false;
    }
    return ok;
}

// ------------------------------------------------------------ criterion 8

bool check_leakage() {
    const ml::MlData all = to_mldata(make_separable_dataset(50, 2, 6, 6.0, 31), 2);
    ml::MlData train, test;
    train.n_classes = test.n_classes = 2;
    for (std::size_t i = 0; i < all.n_rows(); ++i) {
        ml::MlData& side = i % 4 == 3 ? test : train;
        side.x.push_back(all.x[i]);
        side.y.push_back(all.y[i]);
    }
    ml::ModelSpec spec;
    spec.name = "KNC";
    spec.param_names = {"n_neighbors", "weights"};
    spec.param_values = {{"3", "5", "9"}, {"uniform", "distance"}};

    const ml::TestEvaluation clean = ml::evaluate_test(ml::ModelId::knc, spec, train, test, 4, 9);
    ml::MlData vandalized = test;
    for (auto& row : vandalized.x)
        for (auto& cell : row)
            if (cell) cell = *cell * -3.0 + 1.7;
    const ml::TestEvaluation dirty =
        ml::evaluate_test(ml::ModelId::knc, spec, train, vandalized, 4, 9);

    bool ok = true;
    if (!(clean.chosen == dirty.chosen)) {
        detail("selected hyperparameters changed when test rows were mutated");
        ok = false;
    }
    if (clean.train_auc != dirty.train_auc) {
        detail("train-side scoring changed when test rows were mutated");
        ok = false;
    }
    if (clean.test_auc == dirty.test_auc) {
        detail("test score ignored the mutation; the mutation fixture is broken");
        ok = false;
    }
    if (ok)
        detail("mutated test rows: selection and train-side fit identical, test score moved");

    // a table with duplicated image ids must be rejected with exit code 2
    const std::string bin = cli_binary();
    if (!fs::exists(bin)) {
        detail("CLI binary '" + bin + "' not found; cannot check the exit-2 contract");
        return false;
    }
    const fs::path dir = fs::temp_directory_path() / "retina-acceptance-overlap";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const int made = run(bin + " --seed 4 --out " + dir.string() +
                         " synth dataset --disease dr --separation 2 --name feats.csv" +
                         " > /dev/null 2>&1");
    if (made != 0) {
        detail("synth dataset exited with " + std::to_string(made));
        fs::remove_all(dir);
        return false;
    }
    // duplicate the last data row verbatim: same image_id twice
    std::ifstream in(dir / "feats.csv");
    std::string line, last;
    std::ostringstream content;
    while (std::getline(in, line)) {
        content << line << '\n';
        if (!line.empty() && line[0] != '#') last = line;
    }
    content << last << '\n';
    std::ofstream(dir / "overlap.csv") << content.str();
    const int code = run(bin + " --seed 4 --out " + dir.string() + " regress " +
                         (dir / "overlap.csv").string() + " > /dev/null 2>&1");
    fs::remove_all(dir);
    if (code != 2) {
        detail("duplicate image_id exited with " + std::to_string(code) + ", want 2");
        return false;
    }
    detail("duplicate image_id rejected with exit code 2");
    return ok;
}

// ------------------------------------------------------------ criterion 9

bool check_report_shapes() {
    const std::vector<ModelRow> rows = {
        {"RFC", 0.986, 0.027, 0.912, 1.2},
        {"KNC", 0.954, 0.031, std::nullopt, 0.004},
    };
    const std::string want =
        "Task       Best Model  Train Perf. ROCAUC  Test Perf. ROCAUC  Train Time in min\n"
        "-------------------------------------------------------------------------------\n"
        "Detection  RFC         .986±.027           .912               1.200            \n"
        "Detection  KNC         .954±.031           -                  .004             \n";
    if (model_table("Detection", rows) != want) {
        detail("ranked model table drifted from the golden layout");
        return false;
    }
    if (format_regression_sentence(51, 238, 3.118, 1e-6, 0.401) !=
        "F(51, 238) = 3.118, p<.0005, R² = .401") {
        detail("regression sentence drifted from the golden shape");
        return false;
    }
    if (format_regression_sentence(3, 96, 5.0, 0.012, 0.135) !=
        "F(3, 96) = 5.000, p = .012, R² = .135") {
        detail("above-threshold p formatting drifted");
        return false;
    }
    if (format_mean_std(0.986, 0.027) != ".986±.027") {
        detail("m±s formatting drifted");
        return false;
    }
    detail("table golden, regression sentence and m±s formats intact");
    return true;
}

// ------------------------------------------------------------ criterion 10

bool run_pipeline_dir(const std::string& bin, const fs::path& dir, int threads) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string env = "RETINA_VASC_THREADS=" + std::to_string(threads) + " ";
    const std::string base = env + bin + " --seed 11 --deterministic --out " + dir.string();
    const std::string csv = (dir / "feats.csv").string();
    const std::vector<std::string> cmds = {
        base + " synth dataset --disease dr --separation 4 --name feats.csv",
        base + " regress " + csv + " --disease dr",
        base + " train " + csv + " --disease dr --models KNC,GNB,DTC --outer 3 --inner 3",
        base + " explain " + csv + " --disease dr --model GNB --permutations 16" +
            " --background 8 --max-explained 3",
        base + " tsne " + csv + " --iters 250",
    };
    for (const auto& cmd : cmds) {
        const int code = run(cmd + " > /dev/null 2>&1");
        if (code != 0) {
            detail("exit " + std::to_string(code) + ": " + cmd);
            return false;
        }
    }
    return true;
}

bool check_determinism() {
    const std::string bin = cli_binary();
    if (!fs::exists(bin)) {
        detail("CLI binary '" + bin + "' not found");
        return false;
    }
    const fs::path base = fs::temp_directory_path() / "retina-acceptance-det";
    const fs::path d1 = base / "threads1";
    const fs::path d8 = base / "threads8";
    if (!run_pipeline_dir(bin, d1, 1) || !run_pipeline_dir(bin, d8, 8)) {
        fs::remove_all(base);
        return false;
    }
    const std::vector<std::string> artifacts = {
        "feats.csv",       "regress.json", "regress.txt", "train.json", "train.txt",
        "explain.json",    "importance.csv", "importance.svg", "tsne.json", "tsne.svg",
    };
    bool ok = true;
    for (const auto& name : artifacts) {
        const auto a = read_file(d1 / name);
        const auto b = read_file(d8 / name);
        if (!a || !b) {
            detail(name + ": missing from one of the runs");
            ok = false;
        } else if (*a != *b) {
            detail(name + ": differs between 1-thread and 8-thread runs");
            ok = false;
        }
    }
    if (ok)
        detail(std::to_string(artifacts.size()) +
               " artifacts byte-identical across RETINA_VASC_THREADS=1 and =8");
    fs::remove_all(base);
    return ok;
}

} // namespace

int main() {
    std::printf("acceptance gate\n===============\n");
    verdict(1, "parameter engine reproduces seeded-tree ground truth", check_params_engine());
    verdict(2, "big-six equivalent-caliber constants", check_big_six());
    verdict(3, "fractal dimension on known-dimension fixtures", check_fractal_dimension());
    verdict(4, "ROC-AUC matches brute-force pairwise counting", check_auc_exactness());
    verdict(5, "Shapley sampling agrees with exact enumeration", check_shapley());
    verdict(6, "stepwise selection matches the exhaustive oracle", check_stepwise());
    verdict(7, "end-to-end nested-CV pipeline on synthetic tables", check_pipeline());
    verdict(8, "no train/test leakage; overlapping ids rejected", check_leakage());
    verdict(9, "report table and regression sentence golden shapes", check_report_shapes());
    verdict(10, "byte-identical artifacts across thread counts", check_determinism());

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}

// retina-vasc: batch CLI over the library. Subcommands generate fixtures,
// quantify vessel graphs into feature tables, and run the regression /
// model-selection / explanation pipeline. All randomness flows from --seed;
// outputs embed tool version, effective config, and seeds.

#include "retina/error.hpp"
#include "retina/explain.hpp"
#include "retina/feature_names.hpp"
#include "retina/features.hpp"
#include "retina/ml/cv.hpp"
#include "retina/ml/grids.hpp"
#include "retina/ml/metrics.hpp"
#include "retina/ml/model.hpp"
#include "retina/ml/tsne.hpp"
#include "retina/params.hpp"
#include "retina/report.hpp"
#include "retina/rng.hpp"
#include "retina/stats.hpp"
#include "retina/svg.hpp"
#include "retina/synth.hpp"
#include "retina/version.hpp"
#include "retina/vessel_graph.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace retina;

namespace {

// ---------------------------------------------------------------- plumbing

struct Ctx {
    std::string config_path;
    ordered_json config = ordered_json::object();
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    bool deterministic = false;
    bool force = false;
};

ordered_json load_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    require_input(in.good(), std::string(what) + ": cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return ordered_json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string(what) + ": '" + path + "' is not valid JSON: " + e.what());
    }
}

// Options not given on the command line fall back to the config file.
template <class T>
void cfg_fallback(const CLI::Option* opt, const ordered_json& cfg, const char* key, T& target) {
    if (opt != nullptr && opt->count() > 0) return;
    if (!cfg.contains(key)) return;
    try {
        target = cfg.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("config key '") + key + "': " + e.what());
    }
}

std::vector<ZoneSpec> zones_from_config(const ordered_json& cfg) {
    if (!cfg.contains("zones")) return default_zones();
    std::vector<ZoneSpec> out;
    try {
        for (const auto& z : cfg.at("zones"))
            out.push_back({zone_id_from_string(z.at("id").get<std::string>()),
                           z.at("inner").get<double>(), z.at("outer").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("config key 'zones': ") + e.what());
    }
    require_input(!out.empty(), "config key 'zones': empty list");
    return out;
}

ordered_json zones_json(const std::vector<ZoneSpec>& zones) {
    ordered_json arr = ordered_json::array();
    for (const auto& z : zones)
        arr.push_back({{"id", to_string(z.zone_id)},
                       {"inner", z.inner_radius},
                       {"outer", z.outer_radius}});
    return arr;
}

ordered_json provenance(const Ctx& ctx, const std::string& command,
                        ordered_json effective_config) {
    ordered_json p;
    p["tool"] = kToolName;
    p["version"] = kToolVersion;
    p["command"] = command;
    p["seed"] = ctx.seed;
    p["config"] = std::move(effective_config);
    return p;
}

std::vector<std::string> provenance_comments(const ordered_json& prov) {
    return {std::string(kToolName) + " " + kToolVersion,
            "command: " + prov.at("command").get<std::string>(),
            "seed: " + std::to_string(prov.at("seed").get<std::uint64_t>()),
            "config: " + prov.at("config").dump()};
}

fs::path out_file(const Ctx& ctx, const std::string& name) {
    fs::create_directories(ctx.out_dir);
    return fs::path(ctx.out_dir) / name;
}

void check_overwrite(const fs::path& path, bool force) {
    require_input(force || !fs::exists(path),
                  "refusing to overwrite '" + path.string() + "' (pass --force)");
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require_input(out.good(), "cannot write '" + path.string() + "'");
    out << text;
    require_input(out.good(), "failed writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const ordered_json& j) {
    write_text(path, j.dump(2) + "\n");
}

std::string to_upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

double shown_minutes(double minutes, bool deterministic) {
    if (deterministic) return 0.0;
    return std::round(minutes * 1000.0) / 1000.0;
}

// --------------------------------------------------------------- table I/O

FeatureTable load_table(const std::string& path) {
    FeatureTable table = read_feature_csv(path);
    std::set<std::string> seen;
    for (const auto& rec : table.records)
        require_input(seen.insert(rec.image_id).second,
                      "'" + path + "': duplicate image_id '" + rec.image_id +
                          "' (train/test rows must not overlap)");
    return table;
}

bool has_split(const FeatureTable& table, const std::string& split) {
    for (const auto& rec : table.records)
        if (rec.split == split) return true;
    return false;
}

// Rows of one split (all rows if the table carries no split labels), as
// dense imputed + scaled features with the transforms fit on those rows.
struct DenseView {
    Eigen::MatrixXd x;
    std::vector<int> grades;
    std::vector<std::string> ids;
};

DenseView dense_view(const FeatureTable& table, const std::string& split) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < table.records.size(); ++r)
        if (split.empty() || table.records[r].split == split) rows.push_back(r);
    require_input(!rows.empty(),
                  split.empty() ? "table has no rows" : "table has no '" + split + "' rows");

    const auto raw = feature_rows(table);
    MedianImputer imputer;
    imputer.fit(raw, rows);
    std::vector<std::vector<double>> dense;
    dense.reserve(rows.size());
    for (std::size_t r : rows) dense.push_back(imputer.transform(raw[r]));
    MinMaxScaler scaler;
    scaler.fit(dense);

    DenseView view;
    view.x.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(table.n_cols()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto scaled = scaler.transform(dense[i]);
        for (std::size_t c = 0; c < scaled.size(); ++c)
            view.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = scaled[c];
        view.grades.push_back(table.records[rows[i]].grade);
        view.ids.push_back(table.records[rows[i]].image_id);
    }
    return view;
}

// ------------------------------------------------------------ model roster

struct RosterEntry {
    ml::ModelId id;
    const ml::ModelSpec* spec;
};

// Supported grids in config order, optionally filtered by an explicit
// comma-separated model list (which may name an unsupported grid: that is an
// error, not a silent skip).
std::vector<RosterEntry> roster(const ml::GridConfig& grids, const std::string& models_arg) {
    std::vector<std::string> wanted;
    if (!models_arg.empty()) {
        std::stringstream ss(models_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
            if (!tok.empty()) wanted.push_back(to_upper(tok));
        }
        require_input(!wanted.empty(), "--models: empty list");
    }

    std::vector<RosterEntry> out;
    if (wanted.empty()) {
        for (const auto& spec : grids.models) {
            if (!spec.supported) {
                std::cerr << "note: grid '" << spec.name
                          << "' is carried for completeness but not trainable; skipping\n";
                continue;
            }
            out.push_back({ml::model_id_from_string(spec.name), &spec});
        }
    } else {
        for (const auto& name : wanted) {
            const ml::ModelId id = ml::model_id_from_string(name); // rejects MLP/GPC/SVC
            out.push_back({id, &grids.find(id)});
        }
    }
    require_input(!out.empty(), "no trainable model grids configured");
    return out;
}

ml::GridConfig resolve_grids(const CLI::Option* opt, const Ctx& ctx, std::string& grids_path) {
    cfg_fallback(opt, ctx.config, "grids", grids_path);
    if (grids_path.empty()) return ml::default_grids();
    return ml::load_grids(grids_path);
}

ordered_json params_json(const ml::HyperParams& hp) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : hp.values) j[k] = v;
    return j;
}

// ---------------------------------------------------------------- commands

struct SynthTreeArgs {
    TreeSpec spec;
    std::string name = "tree";
};

int cmd_synth_tree(const Ctx& ctx, SynthTreeArgs& args) {
    args.spec.seed = ctx.seed;
    const SynthTree tree = generate_tree(args.spec);

    ordered_json cfg{{"n_arterioles", args.spec.n_arterioles},
                     {"n_venules", args.spec.n_venules},
                     {"depth", args.spec.depth},
                     {"trunk_width", args.spec.trunk_width},
                     {"murray_exponent", args.spec.murray_exponent},
                     {"asymmetry", args.spec.asymmetry},
                     {"branch_angle_deg", args.spec.branch_angle_deg},
                     {"tortuosity_amplitude", args.spec.tortuosity_amplitude}};
    const ordered_json prov = provenance(ctx, "synth tree", cfg);

    const fs::path graph_path = out_file(ctx, args.name + ".json");
    const fs::path truth_path = out_file(ctx, args.name + ".truth.json");
    check_overwrite(graph_path, ctx.force);
    check_overwrite(truth_path, ctx.force);

    ordered_json doc;
    doc["provenance"] = prov;
    doc["graph"] = ordered_json::parse(graph_to_json(tree.graph));
    write_json(graph_path, doc);

    ordered_json truth;
    truth["provenance"] = prov;
    ordered_json entries = ordered_json::object();
    for (const auto& [name, e] : tree.truth)
        entries[name] = {{"value", e.value}, {"exact", e.exact}, {"note", e.note}};
    truth["truth"] = std::move(entries);
    write_json(truth_path, truth);

    std::cout << "wrote " << graph_path.string() << " (" << tree.graph.segments.size()
              << " segments) and " << truth_path.string() << "\n";
    return 0;
}

int cmd_synth_koch(const Ctx& ctx, int level, int size) {
    const Raster img = koch_raster(level, size);
    const fs::path path = out_file(ctx, "koch-" + std::to_string(level) + ".pbm");
    check_overwrite(path, ctx.force);
    const ordered_json prov =
        provenance(ctx, "synth koch", {{"level", level}, {"size", size}});
    save_pbm(img, path.string(), prov.dump());
    std::cout << "wrote " << path.string() << " (" << img.count() << " foreground px)\n";
    return 0;
}

struct SynthDatasetArgs {
    std::string disease = "dr";
    double separation = 6.0;
    std::string name; // defaults to "<disease>-features.csv"
};

int cmd_synth_dataset(const Ctx& ctx, SynthDatasetArgs& args) {
    const GradeSchema schema = grade_schema_from_string(args.disease);

    // Per-grade sample counts shaped like the study datasets. HTR ships no
    // test set and is split 80/20.
    std::vector<int> train_counts, test_counts;
    switch (schema) {
    case GradeSchema::dr:
        train_counts = {52, 20, 51, 40, 32};
        test_counts = {33, 5, 32, 19, 6};
        break;
    case GradeSchema::me:
        train_counts = {82, 14, 94};
        test_counts = {41, 9, 40};
        break;
    case GradeSchema::htr:
        train_counts = {85, 11, 15, 20, 16};
        test_counts = {};
        break;
    }

    std::vector<int> total_counts = train_counts;
    for (std::size_t c = 0; c < test_counts.size(); ++c) total_counts[c] += test_counts[c];

    const auto& names = feature_registry();
    const LabeledPoints points = make_separable_dataset(
        total_counts, static_cast<int>(names.size()), args.separation, ctx.seed);

    // Split assignment: fixed per-grade counts where the study publishes
    // them, a stratified 20% holdout otherwise.
    std::vector<std::string> split(points.y.size());
    if (!test_counts.empty()) {
        std::vector<int> seen(total_counts.size(), 0);
        for (std::size_t i = 0; i < points.y.size(); ++i) {
            const int c = points.y[i];
            split[i] = seen[c] < train_counts[c] ? "train" : "test";
            ++seen[c];
        }
    } else {
        const SplitIndices idx = stratified_split(points.y, 0.2, ctx.seed);
        for (std::size_t i : idx.train) split[i] = "train";
        for (std::size_t i : idx.test) split[i] = "test";
    }

    FeatureTable table;
    table.feature_names = names;
    for (std::size_t i = 0; i < points.y.size(); ++i) {
        Record rec;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%04zu", i + 1);
        rec.image_id = args.disease + "-" + buf;
        rec.grade = points.y[i];
        rec.gradable = true;
        rec.split = split[i];
        rec.features.reserve(points.x[i].size());
        for (double v : points.x[i]) rec.features.emplace_back(v);
        table.records.push_back(std::move(rec));
    }

    const std::string filename =
        args.name.empty() ? args.disease + "-features.csv" : args.name;
    const fs::path path = out_file(ctx, filename);
    check_overwrite(path, ctx.force);
    const ordered_json prov = provenance(
        ctx, "synth dataset",
        {{"disease", args.disease}, {"separation", args.separation}});
    write_feature_csv(table, path.string(), provenance_comments(prov));
    std::cout << "wrote " << path.string() << " (" << table.n_rows() << " rows, "
              << table.n_cols() << " features)\n";
    return 0;
}

struct QuantifyArgs {
    std::vector<std::string> inputs;
    std::string csv;
    std::string id;
    int grade = 0;
    std::string split;
};

int cmd_quantify(const Ctx& ctx, QuantifyArgs& args) {
    require_input(!args.csv.empty(), "quantify: --csv output path is required");
    require_input(args.id.empty() || args.inputs.size() == 1,
                  "quantify: --id only applies to a single input");
    const std::vector<ZoneSpec> zones = zones_from_config(ctx.config);

    FeatureTable table;
    if (fs::exists(args.csv)) {
        table = load_table(args.csv);
    } else {
        table.feature_names = feature_registry();
    }
    std::set<std::string> ids;
    for (const auto& rec : table.records) ids.insert(rec.image_id);

    std::size_t appended = 0;
    for (const auto& input : args.inputs) {
        const VesselGraph graph = load_graph(input);
        const QuantifyResult result = quantify(graph, zones);
        for (const auto& d : result.diagnostics)
            std::cerr << "warning: " << input << ": " << d.where << ": " << d.reason << "\n";

        Record rec;
        rec.image_id = args.id.empty() ? fs::path(input).stem().string() : args.id;
        require_input(ids.insert(rec.image_id).second,
                      "quantify: image_id '" + rec.image_id + "' already present in '" +
                          args.csv + "'");
        rec.grade = args.grade;
        rec.gradable = true;
        rec.split = args.split;
        rec.features.assign(table.n_cols(), std::nullopt);
        std::size_t dropped = 0;
        for (const auto& [name, value] : result.features.values()) {
            const int col = table.column(name);
            if (col < 0) {
                ++dropped;
                continue;
            }
            rec.features[static_cast<std::size_t>(col)] = value;
        }
        if (dropped > 0)
            std::cerr << "warning: " << input << ": " << dropped
                      << " measurements have no column in the table and were dropped\n";
        table.records.push_back(std::move(rec));
        ++appended;
    }

    const ordered_json prov = provenance(
        ctx, "quantify",
        {{"zones", zones_json(zones)}, {"inputs", static_cast<int>(args.inputs.size())}});
    fs::path csv_path(args.csv);
    if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
    write_feature_csv(table, args.csv, provenance_comments(prov));
    std::cout << "wrote " << args.csv << " (+" << appended << " rows, "
              << table.n_rows() << " total)\n";
    return 0;
}

struct RegressArgs {
    std::string csv;
    std::string disease = "dr";
    std::string split;
    double p_enter = 0.05;
    double p_remove = 0.10;
};

ordered_json fit_json(const OlsFit& fit) {
    ordered_json terms = ordered_json::array();
    for (const auto& t : fit.terms)
        terms.push_back(
            {{"name", t.name}, {"coef", t.coef}, {"se", t.se}, {"t", t.t}, {"p", t.p}});
    return {{"f", fit.f_stat},       {"df1", fit.df1},
            {"df2", fit.df2},        {"p", fit.f_p},
            {"r2", fit.r2},          {"adjusted_r2", fit.adjusted_r2},
            {"n", fit.n},            {"terms", std::move(terms)}};
}

int cmd_regress(const Ctx& ctx, RegressArgs& args) {
    const GradeSchema schema = grade_schema_from_string(args.disease);
    const std::string task = to_upper(to_string(schema));

    FeatureTable table = load_table(args.csv);
    GradabilityReport grad;
    table = filter_gradable(table, &grad);
    if (!grad.excluded_ids.empty())
        std::cerr << "note: excluded " << grad.excluded_ids.size() << " ungradable rows\n";

    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < table.records.size(); ++r)
        if (args.split.empty() || table.records[r].split == args.split) rows.push_back(r);
    require_input(!rows.empty(), args.split.empty()
                                     ? "table has no gradable rows"
                                     : "table has no gradable '" + args.split + "' rows");
    const std::size_t n = rows.size();

    const auto raw = feature_rows(table);
    MedianImputer imputer;
    imputer.fit(raw, rows);

    // Columns with no observed value at all carry no information; everything
    // else is imputed to the column median.
    struct Excluded {
        std::string name;
        std::string reason;
    };
    std::vector<Excluded> excluded;
    std::vector<int> candidates;
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        bool any = false;
        for (std::size_t r : rows) any = any || raw[r][c].has_value();
        if (any)
            candidates.push_back(static_cast<int>(c));
        else
            excluded.push_back({table.feature_names[c], "no observed values"});
    }
    require_input(!candidates.empty(), "table has no observed feature values");

    std::vector<std::vector<double>> dense(n);
    for (std::size_t i = 0; i < n; ++i) {
        dense[i].reserve(candidates.size());
        const auto full = imputer.transform(raw[rows[i]]);
        for (int c : candidates) dense[i].push_back(full[static_cast<std::size_t>(c)]);
    }
    std::vector<double> y;
    y.reserve(n);
    for (std::size_t r : rows) y.push_back(static_cast<double>(table.records[r].grade));

    // Greedy rank filter in column order, mirroring how collinear parameters
    // were excluded from the study before the full fit.
    Eigen::MatrixXd design = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), 1);
    std::vector<int> kept;         // indices into `candidates`
    std::vector<std::string> kept_names;
    bool row_limited = false;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        const std::string& name = table.feature_names[candidates[j]];
        if (kept.size() + 2 >= n) { // full fit needs n >= p + 2
            excluded.push_back({name, "not fitted (too few rows)"});
            row_limited = true;
            continue;
        }
        Eigen::MatrixXd trial(design.rows(), design.cols() + 1);
        trial.leftCols(design.cols()) = design;
        for (std::size_t i = 0; i < n; ++i)
            trial(static_cast<Eigen::Index>(i), design.cols()) = dense[i][j];
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(trial);
        qr.setThreshold(1e-10);
        if (qr.rank() < trial.cols()) {
            excluded.push_back({name, "collinear with earlier parameters"});
            continue;
        }
        design = std::move(trial);
        kept.push_back(static_cast<int>(j));
        kept_names.push_back(name);
    }

    std::vector<std::vector<double>> xk(n);
    for (std::size_t i = 0; i < n; ++i) {
        xk[i].reserve(kept.size());
        for (int j : kept) xk[i].push_back(dense[i][static_cast<std::size_t>(j)]);
    }

    std::optional<OlsFit> full;
    if (!kept.empty() && !row_limited) full = ols_fit(xk, kept_names, y);

    const StepwiseResult sw = stepwise_select(xk, kept_names, y, args.p_enter, args.p_remove);
    std::vector<VifEntry> vifs;
    if (kept_names.size() >= 2) vifs = vif(xk, kept_names);

    // Human-readable report in the study's prose shape.
    std::ostringstream text;
    if (full) {
        text << "The input variables "
             << (full->f_p < 0.05 ? "statistically significantly predicted"
                                  : "did not statistically significantly predict")
             << " the " << task << " severity stage, "
             << format_regression_sentence(full->df1, full->df2, full->f_stat, full->f_p,
                                           full->r2)
             << ".\n";
    } else {
        text << "Too few rows for the full " << kept_names.size()
             << "-parameter model; stepwise selection only.\n";
    }
    std::vector<std::string> significant;
    for (std::size_t t = 1; t < sw.fit.terms.size(); ++t)
        if (sw.fit.terms[t].p < 0.05) significant.push_back(sw.fit.terms[t].name);
    if (significant.empty()) {
        text << "No variables were found that added statistically significantly to the "
                "prediction, p<.05.\n";
    } else {
        text << "The variables";
        for (std::size_t i = 0; i < significant.size(); ++i)
            text << (i == 0 ? " " : ", ") << significant[i];
        text << " added statistically significantly to the prediction, p<.05.\n";
    }
    if (!excluded.empty()) {
        text << "As per the analysis, the parameters";
        for (std::size_t i = 0; i < excluded.size(); ++i)
            text << (i == 0 ? " " : ", ") << excluded[i].name;
        text << " were excluded from the study.\n";
    }
    if (!vifs.empty()) {
        auto sorted = vifs;
        std::sort(sorted.begin(), sorted.end(),
                  [](const VifEntry& a, const VifEntry& b) { return a.vif > b.vif; });
        text << "Highest variance inflation factors:\n";
        for (std::size_t i = 0; i < sorted.size() && i < 10; ++i) {
            text << "  " << sorted[i].name << "  ";
            if (std::isfinite(sorted[i].vif))
                text << format_value3(sorted[i].vif) << "\n";
            else
                text << "inf (exactly collinear)\n";
        }
    }

    const ordered_json prov =
        provenance(ctx, "regress",
                   {{"disease", args.disease},
                    {"split", args.split},
                    {"p_enter", args.p_enter},
                    {"p_remove", args.p_remove}});
    ordered_json j;
    j["provenance"] = prov;
    j["task"] = task;
    j["n_rows"] = n;
    j["full_model"] = full ? fit_json(*full) : ordered_json(nullptr);
    ordered_json trace = ordered_json::array();
    for (const auto& s : sw.trace)
        trace.push_back({{"op", s.added ? "add" : "remove"}, {"name", s.name}, {"p", s.p}});
    j["stepwise"] = {{"selected", sw.selected},
                     {"significant", significant},
                     {"trace", std::move(trace)},
                     {"fit", sw.fit.n > 0 ? fit_json(sw.fit) : ordered_json(nullptr)}};
    ordered_json exc = ordered_json::array();
    for (const auto& e : excluded) exc.push_back({{"name", e.name}, {"reason", e.reason}});
    j["excluded"] = std::move(exc);
    ordered_json vj = ordered_json::array();
    for (const auto& v : vifs)
        vj.push_back({{"name", v.name},
                      {"vif", std::isfinite(v.vif) ? ordered_json(v.vif) : ordered_json("inf")}});
    j["vif"] = std::move(vj);

    write_json(out_file(ctx, "regress.json"), j);
    write_text(out_file(ctx, "regress.txt"), text.str());
    std::cout << text.str();
    std::cout << "wrote " << out_file(ctx, "regress.json").string() << " and "
              << out_file(ctx, "regress.txt").string() << "\n";
    return 0;
}

struct TrainArgs {
    std::string csv;
    std::string disease = "dr";
    bool binary = false;
    std::string grids_path;
    std::string models;
    int outer = 6;
    int inner = 4;
};

struct RankedModel {
    ml::ModelId id;
    ml::NestedCvReport report;
    std::optional<ml::TestEvaluation> test;
};

std::vector<RankedModel> run_nested(const Ctx& ctx, const TrainArgs& args,
                                    const ml::GridConfig& grids, const ml::MlData& data) {
    std::vector<RankedModel> ranked;
    for (const RosterEntry& entry : roster(grids, args.models)) {
        std::cerr << "nested CV: " << ml::to_string(entry.id) << " ("
                  << entry.spec->n_points() << " grid points)\n";
        RankedModel rm;
        rm.id = entry.id;
        rm.report = ml::nested_cv(entry.id, *entry.spec, data, args.outer, args.inner,
                                  ctx.seed);
        for (const auto& w : rm.report.warnings)
            std::cerr << "warning: " << ml::to_string(entry.id) << ": " << w << "\n";
        ranked.push_back(std::move(rm));
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedModel& a, const RankedModel& b) {
                         return a.report.mean_auc > b.report.mean_auc;
                     });
    return ranked;
}

ordered_json ranking_json(const Ctx& ctx, const std::vector<RankedModel>& ranked) {
    ordered_json arr = ordered_json::array();
    for (const auto& rm : ranked) {
        ordered_json folds = ordered_json::array();
        for (const auto& f : rm.report.folds)
            folds.push_back({{"auc", f.auc}, {"params", params_json(f.chosen)}});
        ordered_json o;
        o["model"] = ml::to_string(rm.id);
        o["train_mean"] = rm.report.mean_auc;
        o["train_std"] = rm.report.std_auc;
        o["train_minutes"] = shown_minutes(rm.report.minutes, ctx.deterministic);
        o["modal_params"] = params_json(rm.report.modal_choice);
        o["folds"] = std::move(folds);
        if (rm.test) {
            o["test_auc"] = rm.test->test_auc;
            o["test_params"] = params_json(rm.test->chosen);
            o["test_minutes"] = shown_minutes(rm.test->minutes, ctx.deterministic);
        }
        o["warnings"] = rm.report.warnings;
        arr.push_back(std::move(o));
    }
    return arr;
}

std::string ranking_table(const Ctx& ctx, const std::string& task, bool binary,
                          const std::vector<RankedModel>& ranked) {
    std::vector<ModelRow> rows;
    for (const auto& rm : ranked) {
        ModelRow row;
        row.model = ml::to_string(rm.id);
        row.train_mean = rm.report.mean_auc;
        row.train_std = rm.report.std_auc;
        if (rm.test) row.test_auc = rm.test->test_auc;
        row.minutes = shown_minutes(rm.report.minutes, ctx.deterministic);
        rows.push_back(row);
    }
    return std::string(binary ? "Disease Detection" : "Disease Grading") + "\n" +
           model_table(task, rows);
}

int cmd_train(const Ctx& ctx, TrainArgs& args, const CLI::Option* grids_opt) {
    const GradeSchema schema = grade_schema_from_string(args.disease);
    const std::string task = to_upper(to_string(schema));
    const ml::GridConfig grids = resolve_grids(grids_opt, ctx, args.grids_path);

    FeatureTable table = load_table(args.csv);
    table = filter_gradable(table);
    const std::string split = has_split(table, "train") ? "train" : "";
    if (split.empty())
        std::cerr << "note: table carries no split labels; training on all rows\n";
    const ml::MlData data = ml::table_to_mldata(table, grade_count(schema), args.binary, split);

    const std::vector<RankedModel> ranked = run_nested(ctx, args, grids, data);

    ordered_json j;
    j["provenance"] = provenance(ctx, "train",
                                 {{"disease", args.disease},
                                  {"binary", args.binary},
                                  {"grids", args.grids_path},
                                  {"models", args.models},
                                  {"outer_folds", args.outer},
                                  {"inner_folds", args.inner}});
    j["task"] = task;
    j["mode"] = args.binary ? "detection" : "grading";
    j["n_rows"] = data.n_rows();
    j["ranking"] = ranking_json(ctx, ranked);
    write_json(out_file(ctx, "train.json"), j);

    const std::string tbl = ranking_table(ctx, task, args.binary, ranked);
    write_text(out_file(ctx, "train.txt"), tbl);
    std::cout << tbl;
    std::cout << "wrote " << out_file(ctx, "train.json").string() << " and "
              << out_file(ctx, "train.txt").string() << "\n";
    return 0;
}

struct EvaluateArgs : TrainArgs {
    int top = 4;
};

int cmd_evaluate(const Ctx& ctx, EvaluateArgs& args, const CLI::Option* grids_opt) {
    const GradeSchema schema = grade_schema_from_string(args.disease);
    const std::string task = to_upper(to_string(schema));
    const ml::GridConfig grids = resolve_grids(grids_opt, ctx, args.grids_path);

    FeatureTable table = load_table(args.csv);
    table = filter_gradable(table);
    require_input(has_split(table, "train") && has_split(table, "test"),
                  "evaluate needs rows labeled split=train and split=test");
    const ml::MlData train =
        ml::table_to_mldata(table, grade_count(schema), args.binary, "train");
    const ml::MlData test =
        ml::table_to_mldata(table, grade_count(schema), args.binary, "test");

    std::vector<RankedModel> ranked = run_nested(ctx, args, grids, train);
    const int top = std::min<int>(args.top, static_cast<int>(ranked.size()));
    for (int i = 0; i < top; ++i) {
        std::cerr << "test evaluation: " << ml::to_string(ranked[i].id) << "\n";
        ranked[i].test = ml::evaluate_test(ranked[i].id, grids.find(ranked[i].id), train,
                                           test, args.inner, ctx.seed);
        for (const auto& w : ranked[i].test->warnings)
            std::cerr << "warning: " << ml::to_string(ranked[i].id) << ": " << w << "\n";
    }

    ordered_json j;
    j["provenance"] = provenance(ctx, "evaluate",
                                 {{"disease", args.disease},
                                  {"binary", args.binary},
                                  {"grids", args.grids_path},
                                  {"models", args.models},
                                  {"outer_folds", args.outer},
                                  {"inner_folds", args.inner},
                                  {"top", args.top}});
    j["task"] = task;
    j["mode"] = args.binary ? "detection" : "grading";
    j["n_train"] = train.n_rows();
    j["n_test"] = test.n_rows();
    j["ranking"] = ranking_json(ctx, ranked);
    write_json(out_file(ctx, "evaluate.json"), j);

    const std::string tbl = ranking_table(ctx, task, args.binary, ranked);
    write_text(out_file(ctx, "evaluate.txt"), tbl);
    std::cout << tbl;
    std::cout << "wrote " << out_file(ctx, "evaluate.json").string() << " and "
              << out_file(ctx, "evaluate.txt").string() << "\n";
    return 0;
}

struct ExplainArgs {
    std::string csv;
    std::string disease = "dr";
    bool binary = false;
    std::string grids_path;
    std::string model = "RFC";
    int inner = 4;
    int permutations = 64;
    int background = 25;
    int max_explained = 10;
};

int cmd_explain(const Ctx& ctx, ExplainArgs& args, const CLI::Option* grids_opt) {
    const GradeSchema schema = grade_schema_from_string(args.disease);
    const ml::GridConfig grids = resolve_grids(grids_opt, ctx, args.grids_path);
    const ml::ModelId id = ml::model_id_from_string(to_upper(args.model));
    require_input(args.permutations >= 2, "--permutations must be at least 2");
    require_input(args.background >= 1, "--background must be at least 1");
    require_input(args.max_explained >= 1, "--max-explained must be at least 1");

    FeatureTable table = load_table(args.csv);
    table = filter_gradable(table);
    const std::string train_split = has_split(table, "train") ? "train" : "";
    const ml::MlData train =
        ml::table_to_mldata(table, grade_count(schema), args.binary, train_split);

    // Fit the transforms and the selected model on the training rows.
    std::vector<std::size_t> all_train(train.n_rows());
    for (std::size_t i = 0; i < all_train.size(); ++i) all_train[i] = i;
    MedianImputer imputer;
    imputer.fit(train.x, all_train);
    std::vector<std::vector<double>> dense;
    dense.reserve(train.n_rows());
    for (const auto& row : train.x) dense.push_back(imputer.transform(row));
    MinMaxScaler scaler;
    scaler.fit(dense);
    Eigen::MatrixXd xtr(static_cast<Eigen::Index>(dense.size()),
                        static_cast<Eigen::Index>(table.n_cols()));
    for (std::size_t r = 0; r < dense.size(); ++r) {
        const auto scaled = scaler.transform(dense[r]);
        for (std::size_t c = 0; c < scaled.size(); ++c)
            xtr(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = scaled[c];
    }

    const ml::GridSearchResult gs =
        ml::grid_search(id, grids.find(id), xtr, train.y, train.n_classes, args.inner,
                        mix_seed(ctx.seed, 0x6576616cull));
    for (const auto& w : gs.warnings) std::cerr << "warning: " << w << "\n";
    auto clf = ml::make_classifier(id, gs.best);
    clf->fit(xtr, train.y, train.n_classes, mix_seed(ctx.seed, 0x66696e61ull));

    // Scalar model output: expected grade (reduces to the positive-class
    // probability for binary tasks).
    Eigen::VectorXd grade_values(train.n_classes);
    for (int c = 0; c < train.n_classes; ++c) grade_values(c) = c;
    ModelFn f = [&clf, &grade_values](const Eigen::MatrixXd& batch) -> Eigen::VectorXd {
        return clf->predict_proba(batch) * grade_values;
    };

    // Background: a seeded subsample of the training rows.
    std::vector<std::size_t> order(train.n_rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng bg_rng(mix_seed(ctx.seed, 0x6261636bull)); // "back"
    bg_rng.shuffle(order);
    const std::size_t n_bg = std::min<std::size_t>(args.background, order.size());
    Eigen::MatrixXd background(static_cast<Eigen::Index>(n_bg), xtr.cols());
    for (std::size_t i = 0; i < n_bg; ++i)
        background.row(static_cast<Eigen::Index>(i)) =
            xtr.row(static_cast<Eigen::Index>(order[i]));

    // Rows to explain: the test split when present, training rows otherwise.
    std::vector<std::size_t> explain_rows;
    std::vector<std::string> explain_ids;
    const bool use_test = has_split(table, "test");
    for (std::size_t r = 0; r < table.records.size(); ++r) {
        if (explain_rows.size() >= static_cast<std::size_t>(args.max_explained)) break;
        const std::string& s = table.records[r].split;
        if (use_test ? s == "test" : (train_split.empty() || s == train_split)) {
            explain_rows.push_back(r);
            explain_ids.push_back(table.records[r].image_id);
        }
    }

    const auto raw = feature_rows(table);
    std::vector<Explanation> explanations;
    ordered_json instances = ordered_json::array();
    for (std::size_t k = 0; k < explain_rows.size(); ++k) {
        const auto scaled = scaler.transform(imputer.transform(raw[explain_rows[k]]));
        Eigen::VectorXd xrow(static_cast<Eigen::Index>(scaled.size()));
        for (std::size_t c = 0; c < scaled.size(); ++c)
            xrow(static_cast<Eigen::Index>(c)) = scaled[c];
        const Explanation e =
            shapley_sampled(f, xrow, background, static_cast<std::size_t>(args.permutations),
                            mix_seed(ctx.seed, 0x73686170ull, k)); // "shap"
        ordered_json phi = ordered_json::object(), se = ordered_json::object();
        for (std::size_t c = 0; c < e.phi.size(); ++c) {
            phi[table.feature_names[c]] = e.phi[c];
            se[table.feature_names[c]] = e.se[c];
        }
        instances.push_back({{"image_id", explain_ids[k]},
                             {"base", e.base},
                             {"phi", std::move(phi)},
                             {"se", std::move(se)}});
        explanations.push_back(e);
        std::cerr << "explained " << explain_ids[k] << "\n";
    }

    const std::vector<double> importance = aggregate_importance(explanations);
    std::vector<std::pair<std::string, double>> ranked_features;
    for (std::size_t c = 0; c < importance.size(); ++c)
        ranked_features.emplace_back(table.feature_names[c], importance[c]);
    std::stable_sort(ranked_features.begin(), ranked_features.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    const ordered_json prov = provenance(ctx, "explain",
                                         {{"disease", args.disease},
                                          {"binary", args.binary},
                                          {"model", ml::to_string(id)},
                                          {"params", params_json(gs.best)},
                                          {"permutations", args.permutations},
                                          {"background", static_cast<int>(n_bg)},
                                          {"max_explained", args.max_explained}});
    ordered_json j;
    j["provenance"] = prov;
    j["model"] = ml::to_string(id);
    j["params"] = params_json(gs.best);
    j["instances"] = std::move(instances);
    write_json(out_file(ctx, "explain.json"), j);

    std::ostringstream csv;
    for (const auto& line : provenance_comments(prov)) csv << "# " << line << "\n";
    csv << "feature,mean_abs_phi\n";
    for (const auto& [name, v] : ranked_features) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        csv << name << "," << buf << "\n";
    }
    write_text(out_file(ctx, "importance.csv"), csv.str());

    std::vector<std::pair<std::string, double>> top15(
        ranked_features.begin(),
        ranked_features.begin() + std::min<std::size_t>(15, ranked_features.size()));
    SvgMeta meta;
    meta.tool = std::string(kToolName) + " " + kToolVersion;
    meta.provenance = "seed " + std::to_string(ctx.seed) + ", model " + ml::to_string(id);
    meta.timestamp = !ctx.deterministic;
    write_text(out_file(ctx, "importance.svg"),
               svg_bar_chart(top15, to_upper(args.disease) + " feature importance (mean |phi|)",
                             meta));
    std::cout << "wrote " << out_file(ctx, "explain.json").string() << ", "
              << out_file(ctx, "importance.csv").string() << ", "
              << out_file(ctx, "importance.svg").string() << "\n";
    return 0;
}

struct TsneArgs {
    std::string csv;
    std::string disease = "dr";
    std::string split;
    double perplexity = 30.0;
    int iters = 1000;
};

int cmd_tsne(const Ctx& ctx, TsneArgs& args) {
    const GradeSchema schema = grade_schema_from_string(args.disease);
    FeatureTable table = load_table(args.csv);
    table = filter_gradable(table);
    const DenseView view = dense_view(table, args.split);
    const std::size_t n = view.ids.size();
    require_input(n >= 5, "t-SNE needs at least 5 rows");

    ml::TsneParams params;
    params.perplexity = args.perplexity;
    params.n_iter = args.iters;
    params.seed = ctx.seed;
    const double max_perplexity = (static_cast<double>(n) - 1.0) / 3.0;
    if (params.perplexity >= max_perplexity && max_perplexity >= 2.0) {
        params.perplexity = std::floor(max_perplexity);
        std::cerr << "note: perplexity reduced to " << params.perplexity << " for " << n
                  << " rows\n";
    }
    const ml::TsneResult result = ml::tsne(view.x, params);

    const ordered_json prov = provenance(ctx, "tsne",
                                         {{"disease", args.disease},
                                          {"split", args.split},
                                          {"perplexity", params.perplexity},
                                          {"iters", args.iters}});
    ordered_json pts = ordered_json::array();
    std::vector<std::pair<double, double>> coords;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const double px = result.embedding(static_cast<Eigen::Index>(i), 0);
        const double py = result.embedding(static_cast<Eigen::Index>(i), 1);
        pts.push_back({{"image_id", view.ids[i]},
                       {"grade", view.grades[i]},
                       {"x", px},
                       {"y", py}});
        coords.emplace_back(px, py);
        labels.push_back(view.grades[i]);
    }
    ordered_json j;
    j["provenance"] = prov;
    j["kl_initial"] = result.kl_initial;
    j["kl_final"] = result.kl_final;
    j["points"] = std::move(pts);
    write_json(out_file(ctx, "tsne.json"), j);

    std::vector<std::string> names;
    for (int g = 0; g < grade_count(schema); ++g) names.push_back("grade " + std::to_string(g));
    SvgMeta meta;
    meta.tool = std::string(kToolName) + " " + kToolVersion;
    meta.provenance = "seed " + std::to_string(ctx.seed);
    meta.timestamp = !ctx.deterministic;
    write_text(out_file(ctx, "tsne.svg"),
               svg_scatter(coords, labels, names,
                           to_upper(args.disease) + " t-SNE embedding", meta));
    std::cout << "KL " << format_value3(result.kl_initial) << " -> "
              << format_value3(result.kl_final) << "\n";
    std::cout << "wrote " << out_file(ctx, "tsne.json").string() << " and "
              << out_file(ctx, "tsne.svg").string() << "\n";
    return 0;
}

int cmd_grids(const Ctx& ctx, const std::string& file) {
    const ml::GridConfig grids = ml::default_grids();
    for (const auto& spec : grids.models)
        std::cout << spec.name << ": " << spec.n_points() << " grid points"
                  << (spec.supported ? "" : " (not trainable)") << "\n";
    if (!file.empty()) {
        fs::path path(file);
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        check_overwrite(path, ctx.force);
        ml::save_grids(grids, file);
        std::cout << "wrote " << file << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kToolName) + ": retinal vascular parameters and "
                 "interpretable classification"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.fallthrough();
    app.require_subcommand(1);

    Ctx ctx;
    auto* config_opt = app.add_option("--config", ctx.config_path,
                                      "JSON config supplying option defaults");
    auto* seed_opt = app.add_option("--seed", ctx.seed, "base seed for all randomness");
    auto* out_opt = app.add_option("--out", ctx.out_dir, "output directory");
    app.add_flag("--deterministic", ctx.deterministic,
                 "suppress timestamps and wall-clock timings in outputs");
    app.add_flag("--force", ctx.force, "overwrite existing output files");

    // synth
    auto* synth = app.add_subcommand("synth", "generate fixtures with known ground truth");
    synth->require_subcommand(1);
    SynthTreeArgs tree_args;
    auto* tree = synth->add_subcommand("tree", "seeded vessel tree + ground-truth JSON");
    tree->add_option("--name", tree_args.name, "output file stem");
    tree->add_option("--arterioles", tree_args.spec.n_arterioles, "arteriole trunk count");
    tree->add_option("--venules", tree_args.spec.n_venules, "venule trunk count");
    tree->add_option("--depth", tree_args.spec.depth, "generations per tree");
    tree->add_option("--trunk-width", tree_args.spec.trunk_width, "trunk width, px");
    tree->add_option("--murray-exponent", tree_args.spec.murray_exponent,
                     "junction exponent of the width split");
    tree->add_option("--asymmetry", tree_args.spec.asymmetry, "daughter width ratio (0,1]");
    tree->add_option("--branch-angle", tree_args.spec.branch_angle_deg,
                     "total branching angle, degrees");
    tree->add_option("--tortuosity", tree_args.spec.tortuosity_amplitude,
                     "sinusoidal displacement amplitude, px");

    int koch_level = 5, koch_size = 1024;
    auto* koch = synth->add_subcommand("koch", "Koch-curve raster for dimension checks");
    koch->add_option("--level", koch_level, "iteration level");
    koch->add_option("--size", koch_size, "canvas size, px");

    SynthDatasetArgs ds_args;
    auto* dataset = synth->add_subcommand("dataset", "separable labeled feature table");
    dataset->add_option("--disease", ds_args.disease, "dr, me, or htr");
    dataset->add_option("--separation", ds_args.separation, "class-center spacing");
    dataset->add_option("--name", ds_args.name, "output CSV file name");

    // quantify
    QuantifyArgs q_args;
    auto* quant = app.add_subcommand("quantify", "vessel graph JSON -> feature CSV rows");
    quant->add_option("inputs", q_args.inputs, "graph JSON files")->required();
    quant->add_option("--csv", q_args.csv, "feature CSV to create or append to")->required();
    quant->add_option("--id", q_args.id, "image id (single input only; default: file stem)");
    quant->add_option("--grade", q_args.grade, "severity grade for the new rows");
    quant->add_option("--split", q_args.split, "split label for the new rows");

    // regress
    RegressArgs r_args;
    auto* regress = app.add_subcommand("regress", "stepwise regression + VIF report");
    regress->add_option("csv", r_args.csv, "feature CSV")->required();
    auto* r_disease = regress->add_option("--disease", r_args.disease, "dr, me, or htr");
    regress->add_option("--split", r_args.split, "restrict to one split label");
    regress->add_option("--p-enter", r_args.p_enter, "entry p threshold");
    regress->add_option("--p-remove", r_args.p_remove, "removal p threshold");

    // train
    TrainArgs t_args;
    auto* train = app.add_subcommand("train", "nested-CV ranking of all model grids");
    train->add_option("csv", t_args.csv, "feature CSV")->required();
    auto* t_disease = train->add_option("--disease", t_args.disease, "dr, me, or htr");
    train->add_flag("--binary", t_args.binary, "detection (grade 0 vs rest)");
    auto* t_grids = train->add_option("--grids", t_args.grids_path, "grid config JSON");
    train->add_option("--models", t_args.models, "comma list restricting the roster");
    auto* t_outer = train->add_option("--outer", t_args.outer, "outer fold count");
    auto* t_inner = train->add_option("--inner", t_args.inner, "inner fold count");

    // evaluate
    EvaluateArgs e_args;
    auto* eval = app.add_subcommand("evaluate", "rank on train, score the top models on test");
    eval->add_option("csv", e_args.csv, "feature CSV with train and test splits")->required();
    auto* e_disease = eval->add_option("--disease", e_args.disease, "dr, me, or htr");
    eval->add_flag("--binary", e_args.binary, "detection (grade 0 vs rest)");
    auto* e_grids = eval->add_option("--grids", e_args.grids_path, "grid config JSON");
    eval->add_option("--models", e_args.models, "comma list restricting the roster");
    auto* e_outer = eval->add_option("--outer", e_args.outer, "outer fold count");
    auto* e_inner = eval->add_option("--inner", e_args.inner, "inner fold count");
    eval->add_option("--top", e_args.top, "how many ranked models to score on test");

    // explain
    ExplainArgs x_args;
    auto* explain = app.add_subcommand("explain", "Shapley attributions + importance chart");
    explain->add_option("csv", x_args.csv, "feature CSV")->required();
    auto* x_disease = explain->add_option("--disease", x_args.disease, "dr, me, or htr");
    explain->add_flag("--binary", x_args.binary, "detection (grade 0 vs rest)");
    auto* x_grids = explain->add_option("--grids", x_args.grids_path, "grid config JSON");
    explain->add_option("--model", x_args.model, "classifier to explain (e.g. RFC)");
    explain->add_option("--inner", x_args.inner, "inner fold count for selection");
    explain->add_option("--permutations", x_args.permutations, "sampling permutations");
    explain->add_option("--background", x_args.background, "background sample size");
    explain->add_option("--max-explained", x_args.max_explained, "instances to explain");

    // tsne
    TsneArgs s_args;
    auto* tsne_cmd = app.add_subcommand("tsne", "2-D embedding scatter colored by grade");
    tsne_cmd->add_option("csv", s_args.csv, "feature CSV")->required();
    auto* s_disease = tsne_cmd->add_option("--disease", s_args.disease, "dr, me, or htr");
    tsne_cmd->add_option("--split", s_args.split, "restrict to one split label");
    tsne_cmd->add_option("--perplexity", s_args.perplexity, "target perplexity");
    tsne_cmd->add_option("--iters", s_args.iters, "gradient-descent iterations");

    // grids
    std::string grids_file;
    auto* grids_cmd = app.add_subcommand("grids", "list or export the built-in grid config");
    grids_cmd->add_option("--file", grids_file, "write the config JSON here");

    // Let --seed / --out / --config / --force appear after the subcommand.
    for (CLI::App* sc : {synth, tree, koch, dataset, quant, regress, train, eval, explain,
                         tsne_cmd, grids_cmd})
        sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!ctx.config_path.empty()) ctx.config = load_json_file(ctx.config_path, "config");
        cfg_fallback(seed_opt, ctx.config, "seed", ctx.seed);
        cfg_fallback(out_opt, ctx.config, "out", ctx.out_dir);
        (void)config_opt;

        if (app.got_subcommand(synth)) {
            if (synth->got_subcommand(tree)) return cmd_synth_tree(ctx, tree_args);
            if (synth->got_subcommand(koch)) return cmd_synth_koch(ctx, koch_level, koch_size);
            if (synth->got_subcommand(dataset)) {
                cfg_fallback(dataset->get_option("--disease"), ctx.config, "disease",
                             ds_args.disease);
                return cmd_synth_dataset(ctx, ds_args);
            }
        }
        if (app.got_subcommand(quant)) return cmd_quantify(ctx, q_args);
        if (app.got_subcommand(regress)) {
            cfg_fallback(r_disease, ctx.config, "disease", r_args.disease);
            return cmd_regress(ctx, r_args);
        }
        if (app.got_subcommand(train)) {
            cfg_fallback(t_disease, ctx.config, "disease", t_args.disease);
            cfg_fallback(t_outer, ctx.config, "outer_folds", t_args.outer);
            cfg_fallback(t_inner, ctx.config, "inner_folds", t_args.inner);
            return cmd_train(ctx, t_args, t_grids);
        }
        if (app.got_subcommand(eval)) {
            cfg_fallback(e_disease, ctx.config, "disease", e_args.disease);
            cfg_fallback(e_outer, ctx.config, "outer_folds", e_args.outer);
            cfg_fallback(e_inner, ctx.config, "inner_folds", e_args.inner);
            return cmd_evaluate(ctx, e_args, e_grids);
        }
        if (app.got_subcommand(explain)) {
            cfg_fallback(x_disease, ctx.config, "disease", x_args.disease);
            return cmd_explain(ctx, x_args, x_grids);
        }
        if (app.got_subcommand(tsne_cmd)) {
            cfg_fallback(s_disease, ctx.config, "disease", s_args.disease);
            return cmd_tsne(ctx, s_args);
        }
        if (app.got_subcommand(grids_cmd)) return cmd_grids(ctx, grids_file);
        throw InternalError("unhandled subcommand");
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

#include "retina/ml/grids.hpp"

#include "retina/error.hpp"
#include "retina/num.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace retina::ml {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::set<std::string>& unsupported_names() {
    static const std::set<std::string> names = {"MLP", "GPC", "SVC"};
    return names;
}

std::string value_to_string(const ordered_json& v) {
    if (v.is_null()) return "None";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return format_number(v.get<double>());
    throw InputError("grid config: values must be numbers, strings or null");
}

ordered_json value_to_json(const std::string& s) {
    if (s == "None") return nullptr;
    bool ok = false;
    const double v = parse_number(s, ok);
    if (ok) return ordered_json(v);
    return ordered_json(s);
}

ModelSpec make_spec(const std::string& name,
                    std::vector<std::pair<std::string, std::vector<std::string>>> params) {
    ModelSpec spec;
    spec.name = name;
    spec.supported = unsupported_names().count(name) == 0;
    for (auto& [pname, values] : params) {
        spec.param_names.push_back(pname);
        spec.param_values.push_back(std::move(values));
    }
    return spec;
}

std::vector<std::string> nums(std::initializer_list<double> values) {
    std::vector<std::string> out;
    for (double v : values) out.push_back(format_number(v));
    return out;
}

} // namespace

std::vector<HyperParams> ModelSpec::enumerate() const {
    require_input(supported, "classifier '" + name +
                                 "' is carried in the config for completeness only and "
                                 "cannot be trained");
    std::vector<HyperParams> out;
    std::vector<std::size_t> cursor(param_names.size(), 0);
    for (;;) {
        HyperParams hp;
        for (std::size_t i = 0; i < param_names.size(); ++i)
            hp.values[param_names[i]] = param_values[i][cursor[i]];
        out.push_back(std::move(hp));
        // Odometer with the last hyperparameter fastest.
        std::size_t i = param_names.size();
        while (i > 0) {
            --i;
            if (++cursor[i] < param_values[i].size()) break;
            cursor[i] = 0;
            if (i == 0) return out;
        }
        if (param_names.empty()) return out;
    }
}

std::size_t ModelSpec::n_points() const {
    std::size_t n = 1;
    for (const auto& vals : param_values) n *= vals.size();
    return n;
}

const ModelSpec& GridConfig::find(const std::string& name) const {
    for (const auto& spec : models)
        if (spec.name == name) return spec;
    throw InputError("no grid configured for classifier '" + name + "'");
}

const ModelSpec& GridConfig::find(ModelId id) const { return find(to_string(id)); }

GridConfig default_grids() {
    GridConfig config;
    config.notes = {
        "LR C grid: the published list repeats 1e1 and omits 1e-1; corrected to "
        "{1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2}.",
        "min_samples_split=1 grid points are invalid and skipped with a warning "
        "at search time.",
        "MLP, GPC and SVC grids are recorded for completeness; training them is "
        "not supported.",
    };

    config.models.push_back(make_spec(
        "KNC", {{"weights", {"uniform", "distance"}},
                {"algorithm", {"auto", "ball_tree", "kd_tree"}}}));
    config.models.push_back(make_spec(
        "XGB", {{"learning_rate", nums({1e-3, 1e-2, 1e-1})},
                {"n_estimators", nums({100, 120, 140})}}));
    config.models.push_back(make_spec(
        "RFC", {{"max_depth", {"1", "2", "4", "8", "16", "32", "64", "None"}},
                {"n_estimators", nums({8, 9, 10, 11, 12, 13, 100, 120, 150, 200})},
                {"min_samples_split", nums({1, 2, 3})}}));
    config.models.push_back(make_spec(
        "MLP", {{"hidden_layer_sizes", nums({10, 20, 40, 60, 80, 100, 120, 150, 200})}}));
    config.models.push_back(make_spec(
        "DTC", {{"max_depth", {"1", "2", "4", "8", "16", "32", "None"}},
                {"min_samples_split", nums({1, 2, 3})},
                {"criterion", {"gini", "entropy"}}}));
    config.models.push_back(make_spec("GNB", {{"var_smoothing", nums({1e-9})}}));
    config.models.push_back(make_spec(
        "GPC", {{"max_iter_predict", nums({25, 50, 75, 100, 120, 150})}}));
    config.models.push_back(make_spec(
        "ABC", {{"n_estimators", nums({10, 20, 40, 50, 70, 100, 120})}}));
    config.models.push_back(make_spec("QDA", {{"tol", nums({1e-4})}}));
    config.models.push_back(make_spec(
        "LR", {{"max_iter", nums({50, 100, 500, 100, 5000, 10000})},
               {"C", nums({1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2})}}));
    config.models.push_back(make_spec(
        "SVC", {{"C", nums({1e-4, 1e-3, 1e-2, 1e1, 1e0, 1e1, 1e2})},
                {"kernel", {"poly", "rbf", "sigmoid"}}}));
    return config;
}

std::string grids_to_json(const GridConfig& config) {
    ordered_json root;
    root["notes"] = config.notes;
    ordered_json models = ordered_json::object();
    for (const auto& spec : config.models) {
        ordered_json params = ordered_json::object();
        for (std::size_t i = 0; i < spec.param_names.size(); ++i) {
            ordered_json values = ordered_json::array();
            for (const auto& v : spec.param_values[i]) values.push_back(value_to_json(v));
            params[spec.param_names[i]] = values;
        }
        models[spec.name] = params;
    }
    root["models"] = models;
    return root.dump(2) + "\n";
}

GridConfig grids_from_json(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw InputError(std::string("grid config: invalid JSON: ") + e.what());
    }
    require_input(root.is_object() && root.contains("models") && root["models"].is_object(),
                  "grid config: expected an object with a 'models' map");

    GridConfig config;
    if (root.contains("notes")) {
        require_input(root["notes"].is_array(), "grid config: 'notes' must be an array");
        for (const auto& n : root["notes"]) {
            require_input(n.is_string(), "grid config: notes must be strings");
            config.notes.push_back(n.get<std::string>());
        }
    }
    for (const auto& [name, params] : root["models"].items()) {
        require_input(params.is_object(),
                      "grid config: model '" + name + "' must map names to value lists");
        ModelSpec spec;
        spec.name = name;
        spec.supported = unsupported_names().count(name) == 0;
        if (spec.supported) model_id_from_string(name); // rejects unknown classifiers
        for (const auto& [pname, values] : params.items()) {
            require_input(values.is_array() && !values.empty(),
                          "grid config: '" + name + "." + pname +
                              "' must be a non-empty array");
            std::vector<std::string> printed;
            for (const auto& v : values) printed.push_back(value_to_string(v));
            spec.param_names.push_back(pname);
            spec.param_values.push_back(std::move(printed));
        }
        config.models.push_back(std::move(spec));
    }
    require_input(!config.models.empty(), "grid config: no models configured");
    return config;
}

GridConfig load_grids(const std::string& path) {
    std::ifstream in(path);
    require_input(in.good(), "cannot open grid config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return grids_from_json(ss.str());
}

void save_grids(const GridConfig& config, const std::string& path) {
    std::ofstream out(path);
    require_input(out.good(), "cannot write grid config '" + path + "'");
    out << grids_to_json(config);
    require_input(out.good(), "failed while writing '" + path + "'");
}

} // namespace retina::ml

#include "retina/ml/model.hpp"

#include "classifiers.hpp"
#include "retina/error.hpp"
#include "retina/num.hpp"

#include <algorithm>
#include <set>

namespace retina::ml {

const char* to_string(ModelId id) {
    switch (id) {
    case ModelId::knc: return "KNC";
    case ModelId::xgb: return "XGB";
    case ModelId::rfc: return "RFC";
    case ModelId::dtc: return "DTC";
    case ModelId::gnb: return "GNB";
    case ModelId::abc: return "ABC";
    case ModelId::qda: return "QDA";
    case ModelId::lr: return "LR";
    }
    return "?";
}

ModelId model_id_from_string(const std::string& s) {
    for (ModelId id : all_model_ids())
        if (s == to_string(id)) return id;
    if (s == "MLP" || s == "GPC" || s == "SVC")
        throw InputError("classifier '" + s +
                         "' is listed in the grid config but not implemented here; "
                         "choose one of KNC, XGB, RFC, DTC, GNB, ABC, QDA, LR");
    throw InputError("unknown classifier '" + s + "'");
}

const std::vector<ModelId>& all_model_ids() {
    static const std::vector<ModelId> ids = {ModelId::knc, ModelId::xgb, ModelId::rfc,
                                             ModelId::dtc, ModelId::gnb, ModelId::abc,
                                             ModelId::qda, ModelId::lr};
    return ids;
}

double HyperParams::num(const std::string& key, double fallback) const {
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second == "None") return fallback;
    bool ok = false;
    const double v = parse_number(it->second, ok);
    require_input(ok, "hyperparameter '" + key + "': not a number '" + it->second + "'");
    return v;
}

int HyperParams::integer(const std::string& key, int fallback) const {
    const double v = num(key, static_cast<double>(fallback));
    const int i = static_cast<int>(v);
    require_input(static_cast<double>(i) == v,
                  "hyperparameter '" + key + "': expected an integer");
    return i;
}

std::string HyperParams::str(const std::string& key, const std::string& fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

std::string HyperParams::describe() const {
    std::string out;
    for (const auto& [k, v] : values) {
        if (!out.empty()) out += ", ";
        out += k + "=" + v;
    }
    return out.empty() ? "(defaults)" : out;
}

std::vector<int> Classifier::predict(const Eigen::MatrixXd& x) const {
    const Eigen::MatrixXd proba = predict_proba(x);
    std::vector<int> out(static_cast<std::size_t>(proba.rows()));
    for (Eigen::Index r = 0; r < proba.rows(); ++r) {
        Eigen::Index best = 0;
        proba.row(r).maxCoeff(&best); // ties resolve to the lowest class
        out[static_cast<std::size_t>(r)] = static_cast<int>(best);
    }
    return out;
}

namespace {

void check_keys(ModelId id, const HyperParams& hp, std::set<std::string> allowed) {
    for (const auto& [k, v] : hp.values)
        require_input(allowed.count(k) != 0, std::string("classifier ") + to_string(id) +
                                                 ": unknown hyperparameter '" + k + "'");
}

} // namespace

std::unique_ptr<Classifier> make_classifier(ModelId id, const HyperParams& hp) {
    switch (id) {
    case ModelId::knc:
        check_keys(id, hp, {"n_neighbors", "weights", "algorithm"});
        return std::make_unique<KncClassifier>(hp);
    case ModelId::xgb:
        check_keys(id, hp, {"learning_rate", "n_estimators", "max_depth"});
        return std::make_unique<XgbClassifier>(hp);
    case ModelId::rfc:
        check_keys(id, hp, {"max_depth", "n_estimators", "min_samples_split"});
        return std::make_unique<RfcClassifier>(hp);
    case ModelId::dtc:
        check_keys(id, hp, {"max_depth", "min_samples_split", "criterion"});
        return std::make_unique<DtcClassifier>(hp);
    case ModelId::gnb:
        check_keys(id, hp, {"var_smoothing"});
        return std::make_unique<GnbClassifier>(hp);
    case ModelId::abc:
        check_keys(id, hp, {"n_estimators", "learning_rate"});
        return std::make_unique<AbcClassifier>(hp);
    case ModelId::qda:
        check_keys(id, hp, {"tol"});
        return std::make_unique<QdaClassifier>(hp);
    case ModelId::lr:
        check_keys(id, hp, {"C", "max_iter"});
        return std::make_unique<LrClassifier>(hp);
    }
    throw InternalError("make_classifier: unhandled model id");
}

} // namespace retina::ml

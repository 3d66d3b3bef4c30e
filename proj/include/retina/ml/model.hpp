#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace retina::ml {

enum class ModelId { knc, xgb, rfc, dtc, gnb, abc, qda, lr };

const char* to_string(ModelId id);
ModelId model_id_from_string(const std::string& s);
const std::vector<ModelId>& all_model_ids();

// Hyper-parameters as name -> printed value; numeric lookups parse on demand
// so grid configs can carry numbers and keywords uniformly.
struct HyperParams {
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    double num(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    std::string str(const std::string& key, const std::string& fallback) const;
    std::string describe() const; // "k=5, weights=distance"

    bool operator==(const HyperParams& other) const { return values == other.values; }
};

class Classifier {
public:
    virtual ~Classifier() = default;

    // Labels must lie in [0, n_classes). The seed drives any internal
    // randomness; refitting with the same inputs is bit-identical.
    virtual void fit(const Eigen::MatrixXd& x, const std::vector<int>& y, int n_classes,
                     std::uint64_t seed) = 0;

    // One row per sample, one column per class, rows summing to 1.
    virtual Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const = 0;

    std::vector<int> predict(const Eigen::MatrixXd& x) const;
};

// Unknown hyper-parameter names are rejected so config typos surface early.
std::unique_ptr<Classifier> make_classifier(ModelId id, const HyperParams& hp);

} // namespace retina::ml

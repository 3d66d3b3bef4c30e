#pragma once

#include "retina/ml/model.hpp"

#include <string>
#include <vector>

namespace retina::ml {

// Hyperparameter grid for one classifier; enumeration follows listed order
// with the first hyperparameter varying slowest.
struct ModelSpec {
    std::string name;
    bool supported = true; // MLP/GPC/SVC grids are carried but not trainable
    std::vector<std::string> param_names;
    std::vector<std::vector<std::string>> param_values; // printed values per name

    std::vector<HyperParams> enumerate() const;
    std::size_t n_points() const;
};

struct GridConfig {
    std::vector<ModelSpec> models; // config order
    std::vector<std::string> notes;

    const ModelSpec& find(const std::string& name) const; // throws when absent
    const ModelSpec& find(ModelId id) const;
};

// Built-in grid roster.
GridConfig default_grids();

// Serialize / load the roster as JSON, so runs can ship their exact grids.
std::string grids_to_json(const GridConfig& config);
GridConfig grids_from_json(const std::string& text);
GridConfig load_grids(const std::string& path);
void save_grids(const GridConfig& config, const std::string& path);

} // namespace retina::ml

#pragma once

#include "retina/vessel_graph.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace retina {

// Canonical feature naming: "<PARAM>-<ZONE><kind>" with kind suffix a/v and
// t for combined vessels, e.g. "CRAE-B", "FD-Ca", "cTORT-Bv", "NB-Ct".
// CRAE/CRVE/AVR and the arteriole/venule counts carry no kind suffix.
std::string feature_name(const std::string& param, ZoneId zone, char kind_suffix = '\0');

// All canonical names in canonical order (zone-major, B then C).
const std::vector<std::string>& feature_registry();

bool is_registered_feature(const std::string& name);

// Index in the registry, -1 when unknown. Used for deterministic tie-breaks.
int feature_registry_index(const std::string& name);

// Named per-image parameters; a name that is absent is an explicitly missing
// measurement, never an implicit zero.
class FeatureVector {
public:
    void set(const std::string& name, double value) { values_[name] = value; }
    bool has(const std::string& name) const { return values_.count(name) != 0; }
    std::optional<double> get(const std::string& name) const {
        auto it = values_.find(name);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }
    const std::map<std::string, double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::map<std::string, double> values_;
};

} // namespace retina

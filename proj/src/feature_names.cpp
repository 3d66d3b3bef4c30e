#include "retina/feature_names.hpp"

#include <unordered_map>

namespace retina {

namespace {

const char* const kCaliberParams[] = {"CRAE", "CRVE", "AVR"};
const char* const kKindedParams[] = {"FD",  "MW", "STDW", "TORT", "cTORT", "LDR",
                                     "BC",  "AF", "BA",   "AA",   "JE",    "NB",
                                     "NFB"};
const char kKindSuffixes[] = {'a', 'v', 't'};

std::vector<std::string> build_registry() {
    std::vector<std::string> names;
    for (ZoneId zone : {ZoneId::B, ZoneId::C}) {
        for (const char* param : kCaliberParams) names.push_back(feature_name(param, zone));
        for (const char* param : kKindedParams)
            for (char kind : kKindSuffixes) names.push_back(feature_name(param, zone, kind));
        names.push_back(feature_name("NA", zone));
        names.push_back(feature_name("NV", zone));
    }
    return names;
}

} // namespace

std::string feature_name(const std::string& param, ZoneId zone, char kind_suffix) {
    std::string name = param;
    name += '-';
    name += to_string(zone);
    if (kind_suffix != '\0') name += kind_suffix;
    return name;
}

const std::vector<std::string>& feature_registry() {
    static const std::vector<std::string> registry = build_registry();
    return registry;
}

bool is_registered_feature(const std::string& name) {
    return feature_registry_index(name) >= 0;
}

int feature_registry_index(const std::string& name) {
    static const std::unordered_map<std::string, int> index = [] {
        std::unordered_map<std::string, int> m;
        const auto& reg = feature_registry();
        for (int i = 0; i < static_cast<int>(reg.size()); ++i) m.emplace(reg[i], i);
        return m;
    }();
    auto it = index.find(name);
    return it == index.end() ? -1 : it->second;
}

} // namespace retina

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace yl {

struct AcceptanceOptions {
    std::uint64_t seed = 20261016;
    unsigned digits = 30;
};

struct CriterionResult {
    std::string id;
    std::string title;
    bool checks = false;  // every check inside the criterion held
    double seconds = 0;
    double budget = 0;    // runtime limit in seconds
    nlohmann::json detail;
    bool pass() const { return checks && seconds < budget; }
    nlohmann::json to_json() const;
};

// A1 .. A10.
std::vector<std::string> criterion_ids();
// Ids that need no numeric L-values.
std::vector<std::string> exact_criterion_ids();
CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& opt);

}  // namespace yl

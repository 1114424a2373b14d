#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "yl/newforms.hpp"

namespace yl {

// Rational eigenform given by an eta product, optionally with an elliptic curve of the same level.
struct OracleSpec {
    std::string label;
    int weight = 2;
    long level = 1;
    std::vector<std::pair<long, long>> eta;
    std::optional<std::array<long, 5>> curve;
    nlohmann::json to_json() const;
    static OracleSpec from_json(const nlohmann::json& j);
};

// The Delta and level-11 specifications.
std::vector<OracleSpec> oracle_specs();
// Record with a_p for p <= pmax from the eta expansion of spec.
NewformRecord oracle_record(const OracleSpec& spec, long pmax);
// Looks up a spec by label in data_dir()/oracles.json.
OracleSpec load_oracle_spec(const std::string& label);

constexpr long kSyntheticPmax = 500;
constexpr long kLevel23Pmax = 5000;

// File name -> contents of every bundled data file, regenerated from the oracles.
std::map<std::string, nlohmann::json> bundled_files();
// Names of bundled files under dir that are missing or differ from a regeneration.
std::vector<std::string> check_bundled_data(const std::string& dir);

// Records of data_dir()/level23.json and data_dir()/synthetic_sqrt5_pair.json.
std::pair<NewformRecord, NewformRecord> load_level23_pair();
std::pair<NewformRecord, NewformRecord> load_synthetic_pair();

}  // namespace yl

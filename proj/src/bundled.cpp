#include "yl/bundled.hpp"

#include <fstream>

#include "yl/errors.hpp"

namespace yl {

using nlohmann::json;

json OracleSpec::to_json() const {
    json e = json::array();
    for (auto [d, x] : eta) e.push_back({d, x});
    json j = {{"label", label}, {"weight", weight}, {"level", level}, {"eta", e}};
    if (curve) j["curve"] = *curve;
    return j;
}

OracleSpec OracleSpec::from_json(const json& j) {
    try {
        OracleSpec s;
        s.label = j.at("label").get<std::string>();
        s.weight = j.at("weight").get<int>();
        s.level = j.at("level").get<long>();
        for (const auto& e : j.at("eta")) s.eta.emplace_back(e.at(0).get<long>(), e.at(1).get<long>());
        if (j.contains("curve")) s.curve = j.at("curve").get<std::array<long, 5>>();
        return s;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("oracle spec: ") + e.what());
    }
}

std::vector<OracleSpec> oracle_specs() {
    return {{"delta", 12, 1, {{1, 24}}, std::nullopt}, {"11a", 2, 11, {{1, 2}, {11, 2}}, std::array<long, 5>{0, -1, 1, -10, -20}}};
}

NewformRecord oracle_record(const OracleSpec& spec, long pmax) {
    return record_from_expansion(spec.label, spec.weight, spec.level, DirichletCharacter::trivial(spec.level),
                                 eta_oracle(spec.eta, pmax), pmax, Provenance::EtaOracle);
}

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

json pair_json(const std::pair<NewformRecord, NewformRecord>& p) {
    return {{"records", {record_to_json(p.first), record_to_json(p.second)}}};
}

std::pair<NewformRecord, NewformRecord> load_pair(const std::string& name) {
    auto recs = load_records_file(data_dir() + "/" + name);
    if (recs.size() != 2) throw SchemaError(name + ": expected two records");
    return {recs[0], recs[1]};
}

}  // namespace

OracleSpec load_oracle_spec(const std::string& label) {
    json j = read_json(data_dir() + "/oracles.json");
    for (const auto& s : j.at("oracles"))
        if (s.at("label") == label) return OracleSpec::from_json(s);
    throw SchemaError("no oracle spec labelled " + label);
}

std::map<std::string, json> bundled_files() {
    json specs = json::array();
    for (const auto& s : oracle_specs()) specs.push_back(s.to_json());
    return {{"oracles.json", {{"oracles", specs}}},
            {"synthetic_sqrt5_pair.json", pair_json(synthetic_sqrt5_pair(kSyntheticPmax))},
            {"level23.json", pair_json(level23_pair(kLevel23Pmax))}};
}

std::vector<std::string> check_bundled_data(const std::string& dir) {
    std::vector<std::string> bad;
    for (const auto& [name, expect] : bundled_files()) {
        try {
            if (read_json(dir + "/" + name) != expect) bad.push_back(name);
        } catch (const SchemaError&) {
            bad.push_back(name);
        }
    }
    return bad;
}

std::pair<NewformRecord, NewformRecord> load_level23_pair() { return load_pair("level23.json"); }
std::pair<NewformRecord, NewformRecord> load_synthetic_pair() { return load_pair("synthetic_sqrt5_pair.json"); }

}  // namespace yl

#pragma once

// JSON model files and reports.
//
// Model:    { "horizon": int,
//             "nodes": [ { "id": int, "time": int, "parent": int|null,
//                          "cond_prob": number, "xi": number, "zeta": number } ] }
// Solution: { "value", "converged", "iterations", "mokobodski", "fails_at",
//             "J", "Jp", "Y", "tau_star", "sigma_star" }
// Oracle:   { "lower", "upper", "count", "table" }
//
// Node ids in reports are the external ids of the model file.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "dynkin/game.hpp"
#include "dynkin/oracle.hpp"

namespace dynkin {

struct GameModel {
  TreePtr tree;
  Family xi;    // raw, terminal values not necessarily 0
  Family zeta;
};

// Throws ModelFormat for missing or mistyped fields, plus the build_tree
// errors.
GameModel parse_model(const nlohmann::json& doc);
GameModel parse_model_text(const std::string& text);
GameModel load_model(const std::filesystem::path& path);

nlohmann::json model_to_json(const GameModel& model);

nlohmann::json region_to_json(const StoppingTime& st);
nlohmann::json family_to_json(const Family& f);

// `offset` is E[ξ(T)|F] from terminal normalization; "value" reports the raw
// game value Y(root) + offset(root). Unsolved instances report "value": null.
nlohmann::json solution_report(const DynkinSolution& sol, const Family* offset);

nlohmann::json oracle_report_json(const oracle::OracleReport& report);

}  // namespace dynkin

#pragma once

// JSON interchange for states, filters and process matrices.
//
// Every object carries `kind`, `dim` and the row-major real and imaginary
// parts as flat arrays `re`, `im`. Matrices have dim*dim entries, filters
// have dim entries. Example (a qubit in |0>):
//
//   {"kind": "qstate", "dim": 2, "re": [1, 0, 0, 0], "im": [0, 0, 0, 0]}

#include <string>

#include <nlohmann/json.hpp>

#include "cforge/statecore.hpp"

namespace cforge {

nlohmann::json matrix_to_json(const CMatrix& m, const std::string& kind);
CMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const QState& state);
nlohmann::json to_json(const DiagonalFilter& filter);

QState state_from_json(const nlohmann::json& j);
DiagonalFilter filter_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace cforge

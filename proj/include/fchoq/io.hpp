#pragma once

#include "fchoq/solver.hpp"

#include <json.hpp>

#include <string>

// Field dumps (flat little-endian float64 payload plus a JSON sidecar) and
// JSON views of solver output. The sidecar lives next to the payload:
// <base>.f64 and <base>.json.

namespace fchoq {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_field(const Field& u, const std::string& base_path,
                 const std::string& label,
                 const nlohmann::json& meta = nlohmann::json::object());

struct LoadedField {
  Field field;
  std::string label;
  nlohmann::json meta;
};

LoadedField read_field(const std::string& base_path);

nlohmann::json certificates_to_json(const Certificates& c);
nlohmann::json solve_result_to_json(const SolveResult& r,
                                    const ModelConfig& cfg);

}  // namespace fchoq

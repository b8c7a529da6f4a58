#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "tceq/params.hpp"
#include "tceq/riccati.hpp"

namespace tceq {

// thrown for unreadable inputs / unwritable outputs
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_g17(double v);

// Strict parsing: exactly the nine model fields, unknown keys are an error.
ModelParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ModelParams& p);

// Reads a JSON config file holding the params object (either at the top
// level or under a "params" key).
ModelParams load_params_file(const std::string& path);

nlohmann::json existence_to_json(const ExistenceReport& rep);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace tceq

#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <string_view>

#include "bresse/io.hpp"

namespace bresse {

nlohmann::json parse_json_text(std::string_view text, const std::string& what);
/// Canonical form with config_id but without the outputs directory.
nlohmann::json config_to_json(const RunConfig& config);
RunConfig parse_config_json(const nlohmann::json& j);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace bresse

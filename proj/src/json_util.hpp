#pragma once

// Internal helpers shared by the JSON readers. Not part of the public API.

#include <string>
#include <string_view>

#include <json.hpp>

namespace cpd::detail {

using json = nlohmann::json;

// Parses `text`, turning syntax errors into ParseError with a line:column position.
json parse_json(std::string_view text, std::string_view what);

// Member access with field-path diagnostics ("grid.step_count: expected integer").
const json& require(const json& object, std::string_view key, std::string_view path);
long long require_int(const json& object, std::string_view key, std::string_view path);
double require_number(const json& object, std::string_view key, std::string_view path);
std::string require_string(const json& object, std::string_view key, std::string_view path);
long long as_int(const json& value, std::string_view path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace cpd::detail

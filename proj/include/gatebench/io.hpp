#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace gatebench {

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of the compact dump of `j` (object keys are already sorted).
std::string canonical_json_hash(const nlohmann::json& j);

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary file and renames, so readers never see a
/// half-written output.
void write_file(const std::filesystem::path& path, std::string_view contents);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace gatebench

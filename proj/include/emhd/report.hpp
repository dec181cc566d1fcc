#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace emhd {

std::string version_string();

/// 64-bit FNV-1a
std::uint64_t fnv1a(const std::string& bytes);
/// hex FNV-1a of the canonical (key-sorted, compact) dump
std::string config_hash(const nlohmann::json& config);

/// provenance block embedded in every output file
nlohmann::ordered_json provenance(const std::string& command, const std::string& hash);
/// "# key=value" header lines for CSV outputs
std::string csv_provenance(const std::string& command, const std::string& hash);

/// writes text, creating parent directories; throws std::runtime_error on failure
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace emhd

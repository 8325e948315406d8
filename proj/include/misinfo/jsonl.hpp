#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace misinfo::io {

using json = nlohmann::json;

/// Calls `fn(record, line_number)` for every non-blank line of a JSON Lines file.
/// Throws ValidationError naming the file and line when a line is not a JSON object
/// or the file cannot be opened.
void for_each_record(const std::filesystem::path& path,
                     const std::function<void(const json&, std::size_t)>& fn);

/// Reads non-blank, trimmed lines (lines starting with '#' are comments).
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes `content` atomically enough for batch use (truncate + write).
void write_file(const std::filesystem::path& path, std::string_view content);

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

// Typed field access. All throw ValidationError with `where` in the message.
std::string require_string(const json& rec, const char* key, std::string_view where);
std::string optional_string(const json& rec, const char* key, std::string_view where);
bool optional_bool(const json& rec, const char* key, bool fallback, std::string_view where);
std::int64_t require_count(const json& rec, const char* key, std::string_view where);
std::optional<std::int64_t> optional_count(const json& rec, const char* key,
                                           std::string_view where);
double require_number(const json& rec, const char* key, std::string_view where);

/// 64-bit FNV-1a; used for config and payload digests.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace misinfo::io

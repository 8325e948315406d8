#include "misinfo/jsonl.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "misinfo/error.hpp"

namespace misinfo::io {

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::string at(std::string_view where, const char* key) {
    std::string s(where);
    s += ": field '";
    s += key;
    s += "'";
    return s;
}

}  // namespace

void for_each_record(const std::filesystem::path& path,
                     const std::function<void(const json&, std::size_t)>& fn) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        json rec;
        try {
            rec = json::parse(body);
        } catch (const json::parse_error& e) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": malformed record: " + e.what());
        }
        if (!rec.is_object()) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": record is not an object");
        }
        fn(rec, line_no);
    }
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        out.emplace_back(body);
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeError("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw RuntimeError("write failed: " + path.string());
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
    std::string buf;
    for (const auto& r : records) {
        buf += r.dump();
        buf += '\n';
    }
    write_file(path, buf);
}

std::string require_string(const json& rec, const char* key, std::string_view where) {
    const auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) throw ValidationError(at(where, key) + " is missing");
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
    throw ValidationError(at(where, key) + " must be a string");
}

std::string optional_string(const json& rec, const char* key, std::string_view where) {
    const auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) return {};
    if (!it->is_string()) throw ValidationError(at(where, key) + " must be a string");
    return it->get<std::string>();
}

bool optional_bool(const json& rec, const char* key, bool fallback, std::string_view where) {
    const auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) return fallback;
    if (it->is_boolean()) return it->get<bool>();
    if (it->is_number_integer()) {
        const auto v = it->get<std::int64_t>();
        if (v == 0 || v == 1) return v == 1;
    }
    throw ValidationError(at(where, key) + " must be a boolean");
}

std::optional<std::int64_t> optional_count(const json& rec, const char* key,
                                           std::string_view where) {
    const auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) throw ValidationError(at(where, key) + " must be an integer");
    const auto v = it->get<std::int64_t>();
    if (v < 0) throw ValidationError(at(where, key) + " must be non-negative");
    return v;
}

std::int64_t require_count(const json& rec, const char* key, std::string_view where) {
    auto v = optional_count(rec, key, where);
    if (!v) throw ValidationError(at(where, key) + " is missing");
    return *v;
}

double require_number(const json& rec, const char* key, std::string_view where) {
    const auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) throw ValidationError(at(where, key) + " is missing");
    if (!it->is_number()) throw ValidationError(at(where, key) + " must be a number");
    return it->get<double>();
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace misinfo::io

#include "misinfo/verdict_map.hpp"

#include <spdlog/spdlog.h>

#include "misinfo/error.hpp"
#include "misinfo/jsonl.hpp"
#include "misinfo/unicode.hpp"

namespace misinfo {

namespace {

std::set<std::string> normalized_set(const std::vector<std::string>& terms) {
    std::set<std::string> out;
    for (const auto& t : terms) {
        auto n = normalize_verdict(t);
        if (!n.empty()) out.insert(std::move(n));
    }
    return out;
}

void require_disjoint(const std::set<std::string>& a, const std::set<std::string>& b,
                      const char* an, const char* bn) {
    for (const auto& t : a) {
        if (b.contains(t)) {
            throw ValidationError("verdict term '" + t + "' appears in both '" + an + "' and '" +
                                  bn + "'");
        }
    }
}

std::vector<std::string> string_array(const io::json& doc, const char* key) {
    const auto it = doc.find(key);
    if (it == doc.end()) return {};
    if (!it->is_array()) throw ValidationError(std::string("mapping field '") + key + "' must be an array");
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string())
            throw ValidationError(std::string("mapping field '") + key + "' must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

}  // namespace

VerdictMapping::VerdictMapping(const std::vector<std::string>& fake,
                               const std::vector<std::string>& real,
                               const std::vector<std::string>& discard)
    : fake_(normalized_set(fake)), real_(normalized_set(real)), discard_(normalized_set(discard)) {
    require_disjoint(fake_, real_, "fake", "real");
    require_disjoint(fake_, discard_, "fake", "discard");
    require_disjoint(real_, discard_, "real", "discard");
}

VerdictMapping VerdictMapping::defaults() {
    return VerdictMapping(
        {"pants-fire", "false", "mostly-false", "full-flop", "misattributed", "not-true"},
        {"true", "mostly-true", "correct-attribution"},
        {"unknown", "unproven", "satire", "legend", "research-in-progress"});
}

VerdictMapping VerdictMapping::load(const std::filesystem::path& path) {
    io::json doc;
    try {
        doc = io::json::parse(io::read_file(path));
    } catch (const io::json::parse_error& e) {
        throw ValidationError("malformed verdict mapping " + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ValidationError("verdict mapping must be an object: " + path.string());
    return VerdictMapping(string_array(doc, "fake"), string_array(doc, "real"),
                          string_array(doc, "discard"));
}

std::optional<Verdict> VerdictMapping::lookup(std::string_view normalized) const {
    const std::string key(normalized);
    if (fake_.contains(key)) return Verdict::Fake;
    if (real_.contains(key)) return Verdict::Real;
    if (discard_.contains(key)) return Verdict::Discard;
    return std::nullopt;
}

std::string normalize_verdict(std::string_view raw) {
    std::string out;
    for (const auto word : unicode::split_ws(raw)) {
        if (!out.empty()) out.push_back('-');
        auto cps = unicode::decode(word);
        for (auto& c : cps) c = unicode::to_lower(c);
        out += unicode::encode(cps);
    }
    return out;
}

Verdict map_verdict(std::string_view raw, const VerdictMapping& m) {
    return m.lookup(normalize_verdict(raw)).value_or(Verdict::Discard);
}

GroupedStatements group_statements(std::vector<SupportingStatement> stmts,
                                   const VerdictMapping& m) {
    GroupedStatements out;
    auto& r = out.report;
    r.input = stmts.size();
    for (auto& s : stmts) {
        auto& src = r.by_source[std::string(to_string(s.source))];
        ++src.before;
        const auto norm = normalize_verdict(s.verdict_raw);
        const auto v = m.lookup(norm);
        if (!v) {
            s.verdict = Verdict::Discard;
            ++r.unmapped;
            if (r.unmapped_verdicts.insert(norm).second) {
                spdlog::warn("unmapped verdict '{}' (statement {}) treated as discard", norm,
                             s.statement_id);
            }
            continue;
        }
        s.verdict = *v;
        if (*v == Verdict::Discard) {
            ++r.discarded;
            continue;
        }
        ++src.after;
        ++r.kept;
        out.kept.push_back(std::move(s));
    }
    return out;
}

}  // namespace misinfo

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "misinfo/corpus.hpp"

namespace misinfo {

/// Three disjoint sets of normalized verdict strings.
class VerdictMapping {
public:
    /// Normalizes every term and throws ValidationError if a term lands in two sets.
    VerdictMapping(const std::vector<std::string>& fake, const std::vector<std::string>& real,
                   const std::vector<std::string>& discard);

    /// The published grouping examples and nothing more.
    static VerdictMapping defaults();

    /// JSON object with arrays "fake", "real", "discard".
    static VerdictMapping load(const std::filesystem::path& path);

    const std::set<std::string>& fake_terms() const { return fake_; }
    const std::set<std::string>& real_terms() const { return real_; }
    const std::set<std::string>& discard_terms() const { return discard_; }

    /// nullopt when the term is in none of the sets.
    std::optional<Verdict> lookup(std::string_view normalized) const;

private:
    std::set<std::string> fake_;
    std::set<std::string> real_;
    std::set<std::string> discard_;
};

/// Lowercase, trim, and replace internal whitespace runs with one hyphen.
std::string normalize_verdict(std::string_view raw);

/// Unknown strings map to Discard.
Verdict map_verdict(std::string_view raw, const VerdictMapping& m);

struct SourceCounts {
    std::size_t before = 0;
    std::size_t after = 0;
};

struct GroupingReport {
    std::size_t input = 0;
    std::size_t kept = 0;
    std::size_t discarded = 0;  // matched a discard term
    std::size_t unmapped = 0;   // matched nothing
    std::map<std::string, SourceCounts> by_source;
    std::set<std::string> unmapped_verdicts;  // normalized form
};

struct GroupedStatements {
    std::vector<SupportingStatement> kept;
    GroupingReport report;
};

/// Assigns `verdict` on every statement and keeps the Fake/Real ones, in input order.
GroupedStatements group_statements(std::vector<SupportingStatement> stmts,
                                   const VerdictMapping& m);

}  // namespace misinfo

#include "misinfo/textvec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "misinfo/error.hpp"
#include "misinfo/jsonl.hpp"
#include "misinfo/unicode.hpp"

namespace misinfo {

namespace {

bool starts_with_scheme(std::string_view chunk) {
    auto ieq_prefix = [&](std::string_view p) {
        if (chunk.size() < p.size()) return false;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto c = static_cast<unsigned char>(chunk[i]);
            if (std::tolower(c) != p[i]) return false;
        }
        return true;
    };
    return ieq_prefix("http://") || ieq_prefix("https://");
}

}  // namespace

TokenStream tokenize(std::string_view text, const TokenizerOptions& opts) {
    TokenStream out;
    std::u32string run;
    auto flush = [&] {
        if (!run.empty() && run.size() >= opts.min_token_length) out.push_back(unicode::encode(run));
        run.clear();
    };
    for (const auto chunk : unicode::split_ws(text)) {
        if (starts_with_scheme(chunk)) continue;
        for (char32_t c : unicode::decode(chunk)) {
            if (unicode::is_alnum(c)) {
                run.push_back(unicode::to_lower(c));
            } else {
                flush();
            }
        }
        flush();
    }
    return out;
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
    const auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void Vocabulary::rebuild_index() {
    index_.clear();
    index_.reserve(terms_.size());
    for (std::uint32_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], i);
}

nlohmann::json Vocabulary::to_json() const {
    return {{"document_count", document_count_},
            {"min_token_length", tokenizer_.min_token_length},
            {"terms", terms_},
            {"df", df_}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
    Vocabulary v;
    try {
        v.document_count_ = j.at("document_count").get<std::size_t>();
        v.tokenizer_.min_token_length = j.at("min_token_length").get<std::size_t>();
        v.terms_ = j.at("terms").get<std::vector<std::string>>();
        v.df_ = j.at("df").get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed vocabulary: ") + e.what());
    }
    if (v.df_.size() != v.terms_.size()) throw ValidationError("vocabulary df/terms size mismatch");
    const double n = static_cast<double>(v.document_count_);
    v.idf_.resize(v.df_.size());
    for (std::size_t i = 0; i < v.df_.size(); ++i) {
        if (v.df_[i] < 1 || v.df_[i] > v.document_count_)
            throw ValidationError("vocabulary df out of range for term '" + v.terms_[i] + "'");
        v.idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(v.df_[i]))) + 1.0;
    }
    v.rebuild_index();
    return v;
}

Vocabulary fit_tfidf(std::span<const std::string> docs, std::optional<std::size_t> max_features,
                     const TokenizerOptions& opts) {
    if (docs.empty()) throw ValidationError("fit_tfidf: no documents");
    struct Stat {
        std::size_t df = 0;
        std::size_t total = 0;
    };
    std::map<std::string, Stat> stats;
    bool any = false;
    for (const auto& d : docs) {
        auto toks = tokenize(d, opts);
        any = any || !toks.empty();
        std::sort(toks.begin(), toks.end());
        for (std::size_t i = 0; i < toks.size();) {
            std::size_t j = i;
            while (j < toks.size() && toks[j] == toks[i]) ++j;
            auto& s = stats[toks[i]];
            ++s.df;
            s.total += j - i;
            i = j;
        }
    }
    if (!any) throw ValidationError("fit_tfidf: every document tokenizes to nothing");

    std::vector<std::pair<std::string, Stat>> kept(stats.begin(), stats.end());
    if (max_features && kept.size() > *max_features) {
        std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
            return a.second.total > b.second.total;  // stable keeps lexicographic ties
        });
        kept.resize(*max_features);
        std::sort(kept.begin(), kept.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    Vocabulary v;
    v.tokenizer_ = opts;
    v.document_count_ = docs.size();
    const double n = static_cast<double>(docs.size());
    for (auto& [term, s] : kept) {
        v.terms_.push_back(term);
        v.df_.push_back(s.df);
        v.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(s.df))) + 1.0);
    }
    v.rebuild_index();
    return v;
}

double SparseVector::norm() const {
    double s = 0.0;
    for (const auto& [i, w] : entries) s += w * w;
    return std::sqrt(s);
}

SparseVector transform_tfidf(std::string_view doc, const Vocabulary& v) {
    std::map<std::uint32_t, double> counts;
    for (const auto& tok : tokenize(doc, v.tokenizer())) {
        if (auto idx = v.index_of(tok)) counts[*idx] += 1.0;
    }
    SparseVector out;
    out.dimension = v.size();
    out.entries.reserve(counts.size());
    double sq = 0.0;
    for (const auto& [idx, c] : counts) {
        const double w = c * v.idf(idx);
        out.entries.emplace_back(idx, w);
        sq += w * w;
    }
    if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        for (auto& e : out.entries) e.second *= inv;
    }
    return out;
}

double cosine_similarity(const SparseVector& a, const SparseVector& b) {
    if (a.dimension != b.dimension) {
        throw ValidationError("cosine_similarity: dimension mismatch (" +
                              std::to_string(a.dimension) + " vs " + std::to_string(b.dimension) +
                              ")");
    }
    double dot = 0.0;
    auto ia = a.entries.begin();
    auto ib = b.entries.begin();
    while (ia != a.entries.end() && ib != b.entries.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            dot += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ValidationError("cosine_similarity: dimension mismatch (" + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()) + ")");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
    if (a.index() != b.index()) throw ValidationError("cosine_similarity: mixed sparse and dense vectors");
    if (const auto* sa = std::get_if<SparseVector>(&a)) {
        return cosine_similarity(*sa, std::get<SparseVector>(b));
    }
    return cosine_similarity(std::span<const double>(std::get<DenseVector>(a)),
                             std::span<const double>(std::get<DenseVector>(b)));
}

bool EmbeddingStore::contains(std::string_view id) const {
    return vectors_.contains(std::string(id));
}

const DenseVector& EmbeddingStore::at(std::string_view id) const {
    const auto it = vectors_.find(std::string(id));
    if (it == vectors_.end()) throw ValidationError("no embedding for id '" + std::string(id) + "'");
    return it->second;
}

void EmbeddingStore::insert(std::string id, DenseVector v) {
    if (vectors_.empty()) {
        if (v.empty()) throw ValidationError("embedding '" + id + "' has no components");
        dimension_ = v.size();
    } else if (v.size() != dimension_) {
        throw ValidationError("embedding '" + id + "' has dimension " + std::to_string(v.size()) +
                              ", expected " + std::to_string(dimension_));
    }
    for (double x : v) {
        if (!std::isfinite(x)) throw ValidationError("embedding '" + id + "' has a non-finite component");
    }
    if (!vectors_.emplace(id, std::move(v)).second) {
        throw ValidationError("duplicate embedding id '" + id + "'");
    }
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
    EmbeddingStore store;
    io::for_each_record(path, [&](const io::json& rec, std::size_t line) {
        const std::string where = path.string() + ":" + std::to_string(line);
        auto id = io::require_string(rec, "id", where);
        const auto it = rec.find("vec");
        if (it == rec.end() || !it->is_array()) throw ValidationError(where + ": field 'vec' must be an array");
        DenseVector v;
        v.reserve(it->size());
        for (const auto& x : *it) {
            if (!x.is_number()) throw ValidationError(where + ": 'vec' must hold numbers");
            v.push_back(x.get<double>());
        }
        try {
            store.insert(std::move(id), std::move(v));
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    });
    if (store.size() == 0) throw ValidationError("embeddings file has no rows: " + path.string());
    return store;
}

TextEmbedder TextEmbedder::tfidf(Vocabulary vocab) {
    TextEmbedder e;
    e.kind_ = Kind::TfIdf;
    e.vocab_ = std::make_shared<const Vocabulary>(std::move(vocab));
    return e;
}

TextEmbedder TextEmbedder::store(EmbeddingStore store) {
    TextEmbedder e;
    e.kind_ = Kind::Store;
    e.store_ = std::make_shared<const EmbeddingStore>(std::move(store));
    return e;
}

std::size_t TextEmbedder::dimension() const {
    return kind_ == Kind::TfIdf ? vocab_->size() : store_->dimension();
}

std::string TextEmbedder::fingerprint() const {
    if (kind_ != Kind::TfIdf) return {};
    std::string joined;
    for (const auto& t : vocab_->terms()) {
        joined += t;
        joined.push_back('\n');
    }
    return io::hex64(io::fnv1a64(joined));
}

Embedding TextEmbedder::embed(std::string_view id, std::string_view text) const {
    if (kind_ == Kind::TfIdf) return transform_tfidf(text, *vocab_);
    return store_->at(id);
}

std::string_view to_string(TextEmbedder::Kind k) {
    return k == TextEmbedder::Kind::TfIdf ? "tfidf" : "store";
}

TextEmbedder::Kind parse_embedder_kind(std::string_view s) {
    if (s == "tfidf") return TextEmbedder::Kind::TfIdf;
    if (s == "store" || s == "embeddings") return TextEmbedder::Kind::Store;
    throw ValidationError("unknown text backend: " + std::string(s));
}

}  // namespace misinfo

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

namespace misinfo {

using TokenStream = std::vector<std::string>;

struct TokenizerOptions {
    std::size_t min_token_length = 2;  // in code points
};

/// Lowercased alphanumeric runs. Whitespace-delimited chunks that start with an
/// http:// or https:// scheme are dropped first; '@' and '#' never survive since
/// they are not alphanumeric.
TokenStream tokenize(std::string_view text, const TokenizerOptions& opts = {});

inline constexpr std::size_t kDefaultMaxFeatures = 10'000;

/// Fitted TF-IDF vocabulary. Terms are indexed in lexicographic order.
class Vocabulary {
public:
    Vocabulary() = default;

    std::size_t size() const { return terms_.size(); }
    std::size_t document_count() const { return document_count_; }
    const std::vector<std::string>& terms() const { return terms_; }
    const TokenizerOptions& tokenizer() const { return tokenizer_; }

    std::optional<std::uint32_t> index_of(std::string_view term) const;
    std::size_t document_frequency(std::uint32_t index) const { return df_[index]; }
    double idf(std::uint32_t index) const { return idf_[index]; }

    nlohmann::json to_json() const;
    static Vocabulary from_json(const nlohmann::json& j);

private:
    friend Vocabulary fit_tfidf(std::span<const std::string>, std::optional<std::size_t>,
                                const TokenizerOptions&);
    void rebuild_index();

    std::vector<std::string> terms_;
    std::vector<std::size_t> df_;
    std::vector<double> idf_;
    std::size_t document_count_ = 0;
    TokenizerOptions tokenizer_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

/// Smoothed idf: ln((1 + N) / (1 + df)) + 1. With `max_features`, keeps the terms
/// of highest total corpus count, ties broken lexicographically.
/// Throws ValidationError when docs is empty or every doc tokenizes empty.
Vocabulary fit_tfidf(std::span<const std::string> docs,
                     std::optional<std::size_t> max_features = kDefaultMaxFeatures,
                     const TokenizerOptions& opts = {});

struct SparseVector {
    std::size_t dimension = 0;
    std::vector<std::pair<std::uint32_t, double>> entries;  // strictly increasing index

    double norm() const;
};

using DenseVector = std::vector<double>;
using Embedding = std::variant<SparseVector, DenseVector>;

/// Raw count x idf, L2-normalized. Out-of-vocabulary terms are ignored; a doc with
/// none in vocabulary yields the zero vector.
SparseVector transform_tfidf(std::string_view doc, const Vocabulary& v);

/// dot / (|a||b|), 0 when either norm is 0. Throws ValidationError on dimension mismatch.
double cosine_similarity(const SparseVector& a, const SparseVector& b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const Embedding& a, const Embedding& b);

/// Precomputed dense vectors keyed by id.
class EmbeddingStore {
public:
    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return vectors_.size(); }
    bool contains(std::string_view id) const;
    /// Throws ValidationError naming the id when absent.
    const DenseVector& at(std::string_view id) const;

    void insert(std::string id, DenseVector v);

private:
    std::size_t dimension_ = 0;
    std::unordered_map<std::string, DenseVector> vectors_;
};

/// JSON Lines with {"id": ..., "vec": [...]}; dimension fixed by the first row.
EmbeddingStore load_embeddings(const std::filesystem::path& path);

/// The single entry point every "embed this text" pathway goes through.
class TextEmbedder {
public:
    enum class Kind { TfIdf, Store };

    static TextEmbedder tfidf(Vocabulary vocab);
    static TextEmbedder store(EmbeddingStore store);

    Kind kind() const { return kind_; }
    std::size_t dimension() const;
    const Vocabulary* vocabulary() const { return vocab_.get(); }
    /// Digest of the vocabulary terms (tfidf) or empty (store).
    std::string fingerprint() const;

    /// TF-IDF vectorizes `text`; Store looks up `id` and throws if it is missing.
    Embedding embed(std::string_view id, std::string_view text) const;

private:
    Kind kind_ = Kind::TfIdf;
    std::shared_ptr<const Vocabulary> vocab_;
    std::shared_ptr<const EmbeddingStore> store_;
};

std::string_view to_string(TextEmbedder::Kind k);
TextEmbedder::Kind parse_embedder_kind(std::string_view s);

}  // namespace misinfo

#include "misinfo/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "misinfo/botscan.hpp"
#include "misinfo/error.hpp"
#include "misinfo/eval.hpp"
#include "misinfo/features.hpp"
#include "misinfo/jsonl.hpp"
#include "misinfo/verdict_map.hpp"

namespace misinfo::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Variant {
    int index;
    BodyMode mode;
    VotingMethod method;
};

constexpr std::array<Variant, 4> kVariants{{
    {1, BodyMode::WithoutBody, VotingMethod::RegularMajority},
    {2, BodyMode::WithoutBody, VotingMethod::WeightedMajority},
    {3, BodyMode::WithBody, VotingMethod::RegularMajority},
    {4, BodyMode::WithBody, VotingMethod::WeightedMajority},
}};

const Variant& variant(int index) {
    for (const auto& v : kVariants) {
        if (v.index == index) return v;
    }
    throw ValidationError("labeled dataset index must be 1..4, got " + std::to_string(index));
}

std::string labels_name(int index) { return "labels_" + std::to_string(index) + ".jsonl"; }
std::string candidates_name(BodyMode m) { return "candidates_" + std::string(to_string(m)) + ".jsonl"; }

template <typename T>
T field(const json& j, const char* key) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

// ---------------------------------------------------------------- stage context

class Run {
public:
    explicit Run(const PipelineConfig& cfg) : cfg_(cfg) {
        header_ = {{"config_hash", cfg.config_hash},
                   {"seed", cfg.seed},
                   {"toolkit_version", std::string(kToolkitVersion)}};
    }

    const PipelineConfig& cfg() const { return cfg_; }
    fs::path out(const std::string& name) const { return cfg_.output_dir / name; }

    void write_json(const std::string& name, json payload) const {
        json doc{{"run", header_}};
        doc.update(payload);
        io::write_file(out(name), doc.dump(2) + "\n");
        spdlog::info("wrote {}", out(name).string());
    }

    fs::path require_artifact(const std::string& name, std::string_view producer) const {
        const auto p = out(name);
        if (!fs::exists(p)) {
            throw ValidationError(p.string() + " not found; run '" + std::string(producer) + "' first");
        }
        return p;
    }

    json read_artifact(const std::string& name, std::string_view producer) const {
        const auto p = require_artifact(name, producer);
        try {
            return json::parse(io::read_file(p));
        } catch (const json::parse_error& e) {
            throw ValidationError("corrupt artifact " + p.string() + ": " + e.what());
        }
    }

    const TweetCorpus& corpus() const {
        if (!corpus_) corpus_ = load_tweets(cfg_.tweets, cfg_.filters);
        return *corpus_;
    }

    const VerdictMapping& mapping() const {
        if (!mapping_) {
            mapping_ = cfg_.verdict_mapping ? VerdictMapping::load(*cfg_.verdict_mapping)
                                            : VerdictMapping::defaults();
        }
        return *mapping_;
    }

    const GroupedStatements& grouped(BodyMode mode) const {
        auto& slot = grouped_[mode == BodyMode::WithBody];
        if (!slot) slot = group_statements(load_statements(cfg_.statements, mode), mapping());
        return *slot;
    }

    /// Statements as seen by the annotation embedder.
    const std::vector<SupportingStatement>& annotation_statements() const {
        return grouped(cfg_.statement_field == StatementField::Title ? BodyMode::WithoutBody
                                                                     : BodyMode::WithBody)
            .kept;
    }

    /// Embedder for Stage 2 similarity and the weighted vote: TF-IDF fitted on every
    /// tweet plus the embedded statement texts, or the precomputed store.
    const TextEmbedder& annotation_embedder() const {
        if (!embedder_) {
            if (cfg_.text_backend == "store") {
                embedder_ = TextEmbedder::store(load_embeddings(*cfg_.embeddings));
            } else {
                std::vector<std::string> docs;
                for (const auto& t : corpus().tweets) docs.push_back(t.text);
                for (const auto& s : annotation_statements()) {
                    docs.push_back(embedding_text(s, cfg_.statement_field));
                }
                embedder_ = TextEmbedder::tfidf(fit_tfidf(docs, cfg_.max_features));
            }
        }
        return *embedder_;
    }

    /// Tweets in corpus order joined with the labels of dataset `index`.
    std::pair<std::vector<Tweet>, std::vector<Label>> labeled_rows(int index) const {
        const auto recs = load_labels(require_artifact(labels_name(index), "label"));
        std::map<std::string, Label> by_id;
        for (const auto& r : recs) by_id.emplace(r.tweet_id, r.label);
        std::pair<std::vector<Tweet>, std::vector<Label>> out;
        for (const auto& t : corpus().tweets) {
            const auto it = by_id.find(t.tweet_id);
            if (it == by_id.end()) continue;
            out.first.push_back(t);
            out.second.push_back(it->second);
            by_id.erase(it);
        }
        if (!by_id.empty()) {
            throw ValidationError(labels_name(index) + " labels tweet '" + by_id.begin()->first +
                                  "' which is not in the filtered corpus");
        }
        return out;
    }

private:
    const PipelineConfig& cfg_;
    json header_;
    mutable std::optional<TweetCorpus> corpus_;
    mutable std::optional<VerdictMapping> mapping_;
    mutable std::array<std::optional<GroupedStatements>, 2> grouped_;
    mutable std::optional<TextEmbedder> embedder_;
};

template <typename T>
std::vector<T> subset(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(v[i]);
    return out;
}

MetricsReport score(const std::vector<double>& p, const std::vector<Label>& gold) {
    std::vector<Label> pred;
    pred.reserve(p.size());
    for (double v : p) pred.push_back(label_for(v));
    return metrics(confusion(pred, gold), p, gold);
}

// ---------------------------------------------------------------- stages

void stage_ingest(const Run& r) {
    const auto& corpus = r.corpus();
    const auto stmts = load_statements(r.cfg().statements, BodyMode::WithBody);
    std::size_t long_bodies = 0;
    for (const auto& s : stmts) long_bodies += word_count(s.body) >= kMaxBodyWords;
    r.write_json("manifest.json",
                 {{"tweets",
                   {{"input_count", corpus.manifest.input_count},
                    {"tweet_count", corpus.manifest.tweet_count},
                    {"dropped", corpus.manifest.dropped}}},
                  {"statements",
                   {{"count", stmts.size()},
                    {"by_source", count_by_source(stmts)},
                    {"bodies_at_word_limit", long_bodies}}}});
}

void stage_group_verdicts(const Run& r) {
    const auto& rep = r.grouped(BodyMode::WithBody).report;
    json by_source = json::object();
    for (const auto& [src, c] : rep.by_source) by_source[src] = {{"before", c.before}, {"after", c.after}};
    r.write_json("verdict_groups.json",
                 {{"input", rep.input},
                  {"kept", rep.kept},
                  {"discarded", rep.discarded},
                  {"unmapped", rep.unmapped},
                  {"unmapped_verdicts", rep.unmapped_verdicts},
                  {"by_source", by_source}});
}

void stage_annotate(const Run& r) {
    const auto& cfg = r.cfg();
    const auto& tweets = r.corpus().tweets;
    const auto& stmts = r.annotation_statements();
    const auto trusted = cfg.trusted_sources ? load_trusted_sources(*cfg.trusted_sources)
                                             : std::set<std::string>{};
    const auto& embedder = r.annotation_embedder();
    const auto recs = annotate(tweets, stmts, embedder, trusted, cfg.cosine_threshold, cfg.statement_field);
    write_annotations(r.out("annotations.jsonl"), recs);

    std::size_t n_trusted = 0, n_fake = 0;
    for (const auto& a : recs) {
        n_trusted += a.method == AnnotationMethod::TrustedSource;
        n_fake += a.label == Label::Fake;
    }
    json calibration;
    if (cfg.gold_tweets) {
        const auto gold = load_gold_tweets(*cfg.gold_tweets);
        calibration = json::array();
        for (const auto& row : calibrate_threshold(gold, stmts, embedder, cfg.calibration_thresholds,
                                                   cfg.statement_field)) {
            calibration.push_back({{"threshold", row.threshold},
                                   {"annotated", row.annotated_count},
                                   {"correct", row.correct},
                                   {"accuracy", row.accuracy},
                                   {"empty", row.empty}});
        }
    }
    r.write_json("annotation_summary.json",
                 {{"threshold", cfg.cosine_threshold},
                  {"statement_field", to_string(cfg.statement_field)},
                  {"text_backend", cfg.text_backend},
                  {"tweets", tweets.size()},
                  {"statements", stmts.size()},
                  {"annotated", recs.size()},
                  {"trusted_source", n_trusted},
                  {"cosine_match", recs.size() - n_trusted},
                  {"fake", n_fake},
                  {"real", recs.size() - n_fake},
                  {"calibration", calibration}});
}

void stage_label(const Run& r) {
    const auto& cfg = r.cfg();
    const auto annotations = load_annotations(r.require_artifact("annotations.jsonl", "annotate"));
    std::set<std::string> ids;
    for (const auto& a : annotations) ids.insert(a.tweet_id);
    std::vector<Tweet> annotated;
    for (const auto& t : r.corpus().tweets) {
        if (ids.erase(t.tweet_id)) annotated.push_back(t);
    }
    if (!ids.empty()) {
        throw ValidationError("annotations.jsonl names tweet '" + *ids.begin() +
                              "' which is not in the filtered corpus");
    }

    std::optional<ExternalScores> external;
    if (cfg.scorer_backend == "external") external = load_relevance_scores(*cfg.relevance_scores);
    const RelevanceScorer scorer = external ? RelevanceScorer::from(*external) : RelevanceScorer::bm25();

    json summary = json::array();
    for (BodyMode mode : {BodyMode::WithoutBody, BodyMode::WithBody}) {
        std::vector<Variant> wanted;
        for (int k : cfg.label_variants) {
            if (variant(k).mode == mode) wanted.push_back(variant(k));
        }
        if (wanted.empty()) continue;
        const auto& stmts = r.grouped(mode).kept;
        const auto idx = build_index(stmts);
        const auto outcome = retrieve_and_rank(annotated, idx, scorer, cfg.candidates);

        std::vector<json> cand;
        cand.reserve(outcome.candidate_pairs.size());
        for (const auto& [tid, c] : outcome.candidate_pairs) {
            cand.push_back({{"tweet_id", tid},
                            {"statement_id", idx.statement_id(c.doc_index)},
                            {"bm25_score", c.score}});
        }
        io::write_jsonl(r.out(candidates_name(mode)), cand);

        std::optional<VotingContext> ctx;
        for (const auto& v : wanted) {
            if (v.method == VotingMethod::WeightedMajority && !ctx) {
                ctx.emplace(r.annotation_embedder(), annotated, stmts, cfg.statement_field);
            }
            const auto data = label_corpus(outcome.results, v.method, v.mode, ctx ? &*ctx : nullptr);
            write_labels(r.out(labels_name(v.index)), data.records);
            summary.push_back({{"dataset", v.index},
                               {"body_mode", to_string(v.mode)},
                               {"voting_method", to_string(v.method)},
                               {"annotated", annotated.size()},
                               {"labeled", data.records.size()},
                               {"skipped", outcome.skipped.size()},
                               {"fake", data.summary.fake},
                               {"real", data.summary.real},
                               {"weighted_fallback", data.summary.fallback}});
        }
    }
    std::sort(summary.begin(), summary.end(),
              [](const json& a, const json& b) { return a["dataset"] < b["dataset"]; });
    r.write_json("label_summary.json", {{"datasets", summary}});
}

struct FeatureBackend {
    TextEmbedder embedder;
    json vocabulary;  // null for the store backend
};

void stage_train(const Run& r) {
    const auto& cfg = r.cfg();
    const auto [tweets, labels] = r.labeled_rows(cfg.train_dataset);
    const auto split = split_80_20(labels, cfg.seed);
    const auto train_tweets = subset(tweets, split.train);
    const auto train_labels = subset(labels, split.train);
    const auto test_tweets = subset(tweets, split.test);
    const auto test_labels = subset(labels, split.test);

    std::optional<TextEmbedder> embedder;
    json vocabulary;
    if (cfg.text_backend == "store") {
        embedder = TextEmbedder::store(load_embeddings(*cfg.embeddings));
    } else {
        std::vector<std::string> docs;
        for (const auto& t : train_tweets) docs.push_back(t.text);
        auto vocab = fit_tfidf(docs, cfg.max_features);
        vocabulary = vocab.to_json();
        embedder = TextEmbedder::tfidf(std::move(vocab));
    }
    const auto train_set = assemble_matrix(train_tweets, train_labels, *embedder);
    const auto test_set = assemble_matrix(test_tweets, test_labels, *embedder, train_set.scaler);

    spdlog::info("training stack on {} rows x {} features", train_set.matrix.rows(),
                 train_set.matrix.signature.total_dim());
    const auto stack = train_stack(train_set.matrix, cfg.model, cfg.weak_learners);
    json model = model_to_json(stack);
    r.write_json("model.json", std::move(model));
    r.write_json("featurizer.json", {{"dataset", cfg.train_dataset},
                                     {"text_backend", cfg.text_backend},
                                     {"vocabulary", vocabulary},
                                     {"scaler", train_set.scaler.to_json()},
                                     {"signature", train_set.matrix.signature.to_json()},
                                     {"train_rows", split.train.size()},
                                     {"test_rows", split.test.size()}});

    std::vector<std::pair<std::string, MetricsReport>> ladder;
    const Matrix test_x = test_set.matrix.combined();
    for (auto kind : {ModelKind::Knn, ModelKind::DecisionTree, ModelKind::RandomForest, ModelKind::GaussianNB}) {
        const auto m = train(kind, train_set.matrix, cfg.model);
        std::vector<double> p;
        for (const auto& pr : predict(m, test_x, test_set.matrix.signature)) p.push_back(pr.p_fake);
        ladder.emplace_back(std::string(to_string(kind)), score(p, test_labels));
    }
    const auto table = compare_models(std::move(ladder));
    spdlog::info("weak learner comparison\n{}", render_table(table));
    r.write_json("ladder.json", {{"dataset", cfg.train_dataset},
                                 {"test_rows", split.test.size()},
                                 {"models", to_json(table)}});
}

void stage_evaluate(const Run& r) {
    const auto& cfg = r.cfg();
    const auto model = model_from_json(r.read_artifact("model.json", "train"));
    const auto feat = r.read_artifact("featurizer.json", "train");
    const int dataset = feat.value("dataset", cfg.train_dataset);
    const auto [tweets, labels] = r.labeled_rows(dataset);
    const auto split = split_80_20(labels, cfg.seed);
    const auto test_tweets = subset(tweets, split.test);
    const auto test_labels = subset(labels, split.test);

    std::optional<TextEmbedder> embedder;
    if (feat.at("vocabulary").is_null()) {
        if (!cfg.embeddings) throw ValidationError("model uses stored embeddings but none are configured");
        embedder = TextEmbedder::store(load_embeddings(*cfg.embeddings));
    } else {
        embedder = TextEmbedder::tfidf(Vocabulary::from_json(feat.at("vocabulary")));
    }
    const auto scaler = Scaler::from_json(feat.at("scaler"));
    const auto test_set = assemble_matrix(test_tweets, test_labels, *embedder, scaler);
    const Matrix x = test_set.matrix.combined();

    std::vector<double> p_stack;
    for (const auto& pr : predict(model, x, test_set.matrix.signature)) p_stack.push_back(pr.p_fake);
    const auto stack_report = score(p_stack, test_labels);

    std::vector<std::pair<std::string, MetricsReport>> rows{{"stack", stack_report}};
    if (const auto* sp = std::get_if<StackParams>(&model.params)) {
        for (std::size_t i = 0; i < sp->weak.size(); ++i) {
            std::vector<double> p;
            for (std::size_t row = 0; row < x.rows(); ++row) {
                p.push_back(std::clamp(weak_p_fake(sp->weak[i], x.row(row)), 0.0, 1.0));
            }
            rows.emplace_back(std::string(to_string(sp->weak_kinds[i])), score(p, test_labels));
        }
    }
    const auto table = compare_models(std::move(rows));
    spdlog::info("held-out evaluation\n{}", render_table(table));
    r.write_json("metrics.json", {{"dataset", dataset},
                                  {"model_kind", to_string(model.kind)},
                                  {"test_rows", split.test.size()},
                                  {"stack", to_json(stack_report)},
                                  {"comparison", to_json(table)},
                                  {"model_config", model.config.to_json()}});
    io::write_file(r.out("pr_curve.csv"), pr_curve_csv(*stack_report.curve));
}

void stage_bot_report(const Run& r) {
    const auto& cfg = r.cfg();
    if (!cfg.bot_scores) throw ValidationError("bot-report needs 'bot_scores' in the config");
    if (cfg.snapshot_a == cfg.snapshot_b) throw ValidationError("snapshot_a and snapshot_b must differ");
    const auto recs = load_bot_scores(*cfg.bot_scores);
    const auto a = snapshot_scores(recs, cfg.snapshot_a);
    const auto b = snapshot_scores(recs, cfg.snapshot_b);
    StatusTable status;
    if (cfg.account_status) status = snapshot_status(load_account_status(*cfg.account_status), cfg.snapshot_b);
    if (a.empty()) throw ValidationError("no bot scores for snapshot '" + cfg.snapshot_a + "'");

    const auto part = classify_accounts(a, cfg.bot_threshold);
    json datasets = json::array();
    for (int k : cfg.label_variants) {
        const auto& v = variant(k);
        const auto labels = load_labels(r.require_artifact(labels_name(k), "label"));
        const auto rep = fake_bot_fraction(labels, r.corpus().tweets, a, cfg.bot_threshold);
        json row = to_json(rep);
        row["dataset"] = k;
        row["body_mode"] = to_string(v.mode);
        row["voting_method"] = to_string(v.method);
        datasets.push_back(std::move(row));
    }
    r.write_json("bot_report.json",
                 {{"threshold", cfg.bot_threshold},
                  {"snapshot_a", cfg.snapshot_a},
                  {"snapshot_b", cfg.snapshot_b},
                  {"accounts_a", {{"scored", a.size()}, {"bots", part.bots.size()}, {"humans", part.humans.size()}}},
                  {"datasets", datasets},
                  {"sweep", to_json(threshold_sweep(a, cfg.bot_sweep))},
                  {"longitudinal", to_json(longitudinal_diff(a, b, status, cfg.bot_sweep))}});
}

void write_digest(const Run& r) {
    json artifacts = json::object();
    for (const auto& name : artifact_names()) {
        const auto p = r.out(name);
        if (fs::exists(p)) artifacts[name] = io::hex64(io::fnv1a64(io::read_file(p)));
    }
    r.write_json("run_digest.json", {{"artifacts", artifacts}});
}

void check_inputs(const PipelineConfig& cfg) {
    auto need = [](const fs::path& p, const char* what) {
        if (!fs::exists(p)) throw ValidationError(std::string(what) + " not found: " + p.string());
    };
    need(cfg.tweets, "tweets file");
    need(cfg.statements, "statements file");
    const std::pair<const std::optional<fs::path>*, const char*> optional_paths[] = {
        {&cfg.trusted_sources, "trusted sources file"}, {&cfg.verdict_mapping, "verdict mapping file"},
        {&cfg.embeddings, "embeddings file"},           {&cfg.relevance_scores, "relevance scores file"},
        {&cfg.gold_tweets, "gold tweets file"},         {&cfg.bot_scores, "bot scores file"},
        {&cfg.account_status, "account status file"}};
    for (const auto& [p, what] : optional_paths) {
        if (*p) need(**p, what);
    }
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw ValidationError("cannot create output dir " + cfg.output_dir.string() + ": " + ec.message());
}

}  // namespace

const std::vector<std::string>& artifact_names() {
    static const std::vector<std::string> names{
        "manifest.json",       "verdict_groups.json",
        "annotations.jsonl",   "annotation_summary.json",
        candidates_name(BodyMode::WithoutBody), candidates_name(BodyMode::WithBody),
        labels_name(1),        labels_name(2),
        labels_name(3),        labels_name(4),
        "label_summary.json",  "model.json",
        "featurizer.json",     "ladder.json",
        "metrics.json",        "pr_curve.csv",
        "bot_report.json"};
    return names;
}

PipelineConfig parse_config(const json& src, const fs::path& base_dir, std::string_view subcommand,
                            const Overrides& o) {
    if (!src.is_object()) throw ValidationError("config must be a JSON object");
    json j = src;
    if (o.seed) j["seed"] = *o.seed;
    if (o.out) j["output_dir"] = o.out->string();
    if (o.threshold) {
        if (subcommand == "annotate" || subcommand == "pipeline") {
            j["cosine_threshold"] = *o.threshold;
        } else if (subcommand == "bot-report") {
            j["bot_threshold"] = *o.threshold;
        } else {
            spdlog::warn("--threshold has no effect on '{}'", subcommand);
        }
    }

    PipelineConfig c;
    auto path = [&](const json& v, const char* key) {
        fs::path p = field<std::string>(v, key);
        return p.is_absolute() ? p : base_dir / p;
    };
    auto opt_path = [&](const json& v, const char* key) -> std::optional<fs::path> {
        if (v.is_null()) return std::nullopt;
        return path(v, key);
    };
    bool have_tweets = false, have_statements = false;
    for (const auto& [key, v] : j.items()) {
        const char* k = key.c_str();
        if (key == "tweets") { c.tweets = path(v, k); have_tweets = true; }
        else if (key == "statements") { c.statements = path(v, k); have_statements = true; }
        else if (key == "trusted_sources") c.trusted_sources = opt_path(v, k);
        else if (key == "verdict_mapping") c.verdict_mapping = opt_path(v, k);
        else if (key == "embeddings") c.embeddings = opt_path(v, k);
        else if (key == "relevance_scores") c.relevance_scores = opt_path(v, k);
        else if (key == "gold_tweets") c.gold_tweets = opt_path(v, k);
        else if (key == "bot_scores") c.bot_scores = opt_path(v, k);
        else if (key == "account_status") c.account_status = opt_path(v, k);
        else if (key == "output_dir") c.output_dir = path(v, k);
        else if (key == "filters") {
            if (!v.is_object()) throw ValidationError("config: 'filters' must be an object");
            for (const auto& [fk, fv] : v.items()) {
                if (fk == "languages") {
                    const auto l = field<std::vector<std::string>>(fv, "filters.languages");
                    c.filters.languages = {l.begin(), l.end()};
                } else if (fk == "countries") {
                    const auto l = field<std::vector<std::string>>(fv, "filters.countries");
                    c.filters.countries = {l.begin(), l.end()};
                } else {
                    throw ValidationError("config: unknown key 'filters." + fk + "'");
                }
            }
        }
        else if (key == "text_backend") c.text_backend = field<std::string>(v, k);
        else if (key == "scorer_backend") c.scorer_backend = field<std::string>(v, k);
        else if (key == "statement_field") c.statement_field = parse_statement_field(field<std::string>(v, k));
        else if (key == "max_features") c.max_features = field<std::size_t>(v, k);
        else if (key == "candidates") c.candidates = field<std::size_t>(v, k);
        else if (key == "cosine_threshold") c.cosine_threshold = field<double>(v, k);
        else if (key == "calibration_thresholds") c.calibration_thresholds = field<std::vector<double>>(v, k);
        else if (key == "label_variants") c.label_variants = field<std::vector<int>>(v, k);
        else if (key == "train_dataset") c.train_dataset = field<int>(v, k);
        else if (key == "weak_learners") {
            c.weak_learners.clear();
            for (const auto& name : field<std::vector<std::string>>(v, k)) c.weak_learners.push_back(parse_model_kind(name));
        }
        else if (key == "bot_threshold") c.bot_threshold = field<double>(v, k);
        else if (key == "bot_sweep") c.bot_sweep = field<std::vector<double>>(v, k);
        else if (key == "snapshot_a") c.snapshot_a = field<std::string>(v, k);
        else if (key == "snapshot_b") c.snapshot_b = field<std::string>(v, k);
        else if (key == "model") {
            if (v.is_object() && v.contains("seed")) {
                throw ValidationError("config: 'model.seed' is not allowed; set the top-level 'seed'");
            }
            c.model = ModelConfig::from_json(v);
        }
        else if (key == "seed") c.seed = field<std::uint64_t>(v, k);
        else throw ValidationError("config: unknown key '" + key + "'");
    }
    if (!have_tweets) throw ValidationError("config: 'tweets' is required");
    if (!have_statements) throw ValidationError("config: 'statements' is required");
    c.model.seed = c.seed;

    if (c.text_backend != "tfidf" && c.text_backend != "store") {
        throw ValidationError("config: text_backend must be 'tfidf' or 'store'");
    }
    if (c.text_backend == "store" && !c.embeddings) {
        throw ValidationError("config: text_backend 'store' needs 'embeddings'");
    }
    if (c.scorer_backend != "bm25" && c.scorer_backend != "external") {
        throw ValidationError("config: scorer_backend must be 'bm25' or 'external'");
    }
    if (c.scorer_backend == "external" && !c.relevance_scores) {
        throw ValidationError("config: scorer_backend 'external' needs 'relevance_scores'");
    }
    if (c.max_features == 0) throw ValidationError("config: max_features must be positive");
    if (c.candidates == 0) throw ValidationError("config: candidates must be positive");
    if (!(c.cosine_threshold >= -1.0 && c.cosine_threshold <= 1.0)) {
        throw ValidationError("config: cosine_threshold must be in [-1, 1]");
    }
    if (!(c.bot_threshold >= 0.0 && c.bot_threshold <= 1.0)) {
        throw ValidationError("config: bot_threshold must be in [0, 1]");
    }
    if (c.label_variants.empty()) throw ValidationError("config: label_variants must not be empty");
    {
        std::set<int> seen;
        for (int k : c.label_variants) {
            variant(k);
            if (!seen.insert(k).second) throw ValidationError("config: duplicate label variant " + std::to_string(k));
        }
    }
    variant(c.train_dataset);
    if (c.weak_learners.empty()) throw ValidationError("config: weak_learners must not be empty");
    for (auto k : c.weak_learners) {
        if (k == ModelKind::StackedEnsemble) throw ValidationError("config: a stack cannot be a weak learner");
    }
    for (std::size_t i = 1; i < c.bot_sweep.size(); ++i) {
        if (!(c.bot_sweep[i - 1] < c.bot_sweep[i])) throw ValidationError("config: bot_sweep must be ascending");
    }

    c.echo = j;
    json hashed = j;
    hashed.erase("output_dir");
    c.config_hash = io::hex64(io::fnv1a64(hashed.dump()));
    return c;
}

PipelineConfig load_config(const fs::path& path, std::string_view subcommand, const Overrides& o) {
    if (!fs::exists(path)) throw ValidationError("config file not found: " + path.string());
    json j;
    try {
        j = json::parse(io::read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j, path.parent_path(), subcommand, o);
}

void run_stage(std::string_view subcommand, const PipelineConfig& cfg) {
    using StageFn = void (*)(const Run&);
    static const std::vector<std::pair<std::string_view, StageFn>> stages{
        {"ingest", stage_ingest},     {"group-verdicts", stage_group_verdicts},
        {"annotate", stage_annotate}, {"label", stage_label},
        {"train", stage_train},       {"evaluate", stage_evaluate},
        {"bot-report", stage_bot_report}};
    check_inputs(cfg);
    const Run run(cfg);
    if (subcommand == "pipeline") {
        for (const auto& [name, fn] : stages) {
            spdlog::info("stage {}", name);
            fn(run);
        }
    } else {
        const auto it = std::find_if(stages.begin(), stages.end(),
                                     [&](const auto& s) { return s.first == subcommand; });
        if (it == stages.end()) throw ValidationError("unknown subcommand '" + std::string(subcommand) + "'");
        it->second(run);
    }
    write_digest(run);
}

int run(std::string_view subcommand, const fs::path& config, const Overrides& o) {
    try {
        const auto& subs = subcommands();
        if (std::none_of(subs.begin(), subs.end(), [&](const auto& s) { return s.first == subcommand; })) {
            throw ValidationError("unknown subcommand '" + std::string(subcommand) + "'");
        }
        const auto cfg = load_config(config, subcommand, o);
        run_stage(subcommand, cfg);
        return 0;
    } catch (const ValidationError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 2;
    }
}

void configure_logging() {
    if (!spdlog::get("misinfo")) spdlog::set_default_logger(spdlog::stderr_color_mt("misinfo"));
    const char* env = std::getenv("MISINFO_LOG_LEVEL");
    const std::string level = env ? env : "info";
    const auto parsed = spdlog::level::from_str(level);
    if (parsed == spdlog::level::off && level != "off") {
        spdlog::warn("unknown MISINFO_LOG_LEVEL '{}', using info", level);
        spdlog::set_level(spdlog::level::info);
        return;
    }
    spdlog::set_level(parsed);
}

}  // namespace misinfo::pipeline

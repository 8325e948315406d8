#include "misinfo/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <spdlog/spdlog.h>

#include "misinfo/error.hpp"
#include "misinfo/jsonl.hpp"

namespace misinfo {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 6> kKindNames{{
    {ModelKind::Knn, "knn"},
    {ModelKind::DecisionTree, "decision_tree"},
    {ModelKind::RandomForest, "random_forest"},
    {ModelKind::GaussianNB, "gaussian_nb"},
    {ModelKind::LogisticRegression, "logistic_regression"},
    {ModelKind::StackedEnsemble, "stacked_ensemble"},
}};

learners::TreeOptions tree_options(const ModelConfig& cfg) {
    learners::TreeOptions o;
    o.max_depth = cfg.tree_max_depth;
    o.min_samples_split = cfg.tree_min_samples_split;
    return o;
}

learners::LogisticOptions logistic_options(const ModelConfig& cfg) {
    return {cfg.lr_l2, cfg.lr_max_iters, cfg.lr_tolerance};
}

void report_logistic(const learners::LogisticRegression& lr, std::string_view role) {
    if (lr.constant) {
        spdlog::warn("{}: single-class training set, constant p_fake = {}", role, *lr.constant);
    } else if (!lr.converged) {
        spdlog::warn("{}: iteration cap reached, gradient max-norm {:.3g}", role,
                     lr.gradient_max_norm);
    }
}

WeakParams fit_weak(ModelKind kind, const Matrix& X, std::span<const Label> y,
                    const ModelConfig& cfg, std::uint64_t seed) {
    switch (kind) {
        case ModelKind::Knn:
            return learners::Knn::fit(X, y, cfg.knn_k);
        case ModelKind::DecisionTree:
            return learners::DecisionTree::fit(X, y, {}, tree_options(cfg));
        case ModelKind::RandomForest:
            return learners::RandomForest::fit(X, y, cfg.rf_trees, tree_options(cfg), seed);
        case ModelKind::GaussianNB:
            return learners::GaussianNB::fit(X, y);
        case ModelKind::LogisticRegression: {
            auto lr = learners::LogisticRegression::fit(X, y, logistic_options(cfg));
            report_logistic(lr, "logistic_regression");
            return lr;
        }
        case ModelKind::StackedEnsemble:
            break;
    }
    throw ValidationError("a stacked ensemble cannot be a weak learner");
}

nlohmann::json weak_to_json(const WeakParams& w) {
    return std::visit([](const auto& m) { return m.to_json(); }, w);
}

WeakParams weak_from_json(ModelKind kind, const nlohmann::json& j) {
    switch (kind) {
        case ModelKind::Knn: return learners::Knn::from_json(j);
        case ModelKind::DecisionTree: return learners::DecisionTree::from_json(j);
        case ModelKind::RandomForest: return learners::RandomForest::from_json(j);
        case ModelKind::GaussianNB: return learners::GaussianNB::from_json(j);
        case ModelKind::LogisticRegression: return learners::LogisticRegression::from_json(j);
        case ModelKind::StackedEnsemble: break;
    }
    throw ValidationError("nested stacked ensemble in model file");
}

void require_trainable(const Matrix& X, std::span<const Label> y, const FeatureSignature& sig) {
    if (X.rows() != y.size()) {
        throw ValidationError("feature rows (" + std::to_string(X.rows()) + ") and labels (" +
                              std::to_string(y.size()) + ") differ");
    }
    if (X.rows() < 2) throw ValidationError("training needs at least 2 rows");
    if (X.cols() != sig.total_dim()) {
        throw ValidationError("matrix has " + std::to_string(X.cols()) +
                              " columns but its signature describes " +
                              std::to_string(sig.total_dim()));
    }
}

}  // namespace

double weak_p_fake(const WeakParams& w, std::span<const double> row) {
    return std::visit([&](const auto& m) { return m.p_fake(row); }, w);
}

std::string_view to_string(ModelKind k) {
    for (const auto& [kind, name] : kKindNames) {
        if (kind == k) return name;
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view s) {
    for (const auto& [kind, name] : kKindNames) {
        if (name == s) return kind;
    }
    throw ValidationError("unknown model kind '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- config

void ModelConfig::validate() const {
    auto fail = [](const std::string& what) { throw ValidationError("model config: " + what); };
    if (knn_k < 1) fail("knn_k must be positive");
    if (tree_max_depth && *tree_max_depth < 1) fail("tree_max_depth must be positive");
    if (tree_min_samples_split < 2) fail("tree_min_samples_split must be >= 2");
    if (rf_trees < 1) fail("rf_trees must be positive");
    if (rf_feature_subset != "sqrt") fail("rf_feature_subset must be \"sqrt\"");
    if (!(lr_l2 >= 0.0) || !std::isfinite(lr_l2)) fail("lr_l2 must be non-negative");
    if (lr_max_iters < 1) fail("lr_max_iters must be positive");
    if (!(lr_tolerance > 0.0)) fail("lr_tolerance must be positive");
    if (stack_folds < 2) fail("stack_folds must be >= 2");
}

nlohmann::json ModelConfig::to_json() const {
    return {{"knn_k", knn_k},
            {"tree_max_depth", tree_max_depth ? nlohmann::json(*tree_max_depth) : nlohmann::json()},
            {"tree_min_samples_split", tree_min_samples_split},
            {"rf_trees", rf_trees},
            {"rf_feature_subset", rf_feature_subset},
            {"lr_l2", lr_l2},
            {"lr_max_iters", lr_max_iters},
            {"lr_tolerance", lr_tolerance},
            {"stack_folds", stack_folds},
            {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("model config must be an object");
    ModelConfig c;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "knn_k") c.knn_k = v.get<int>();
            else if (key == "tree_max_depth") c.tree_max_depth = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
            else if (key == "tree_min_samples_split") c.tree_min_samples_split = v.get<int>();
            else if (key == "rf_trees") c.rf_trees = v.get<int>();
            else if (key == "rf_feature_subset") c.rf_feature_subset = v.get<std::string>();
            else if (key == "lr_l2") c.lr_l2 = v.get<double>();
            else if (key == "lr_max_iters") c.lr_max_iters = v.get<int>();
            else if (key == "lr_tolerance") c.lr_tolerance = v.get<double>();
            else if (key == "stack_folds") c.stack_folds = v.get<int>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else throw ValidationError("model config: unknown key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("model config: ") + e.what());
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------- train / predict

double TrainedModel::p_fake(std::span<const double> row) const {
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StackParams>) {
                std::vector<double> meta(p.weak.size());
                for (std::size_t i = 0; i < p.weak.size(); ++i) meta[i] = weak_p_fake(p.weak[i], row);
                return p.meta.p_fake(meta);
            } else {
                return p.p_fake(row);
            }
        },
        params);
}

TrainedModel train(ModelKind kind, const Matrix& X, const FeatureSignature& sig,
                   std::span<const Label> y, const ModelConfig& cfg) {
    if (kind == ModelKind::StackedEnsemble) return train_stack(default_weak_kinds(), X, sig, y, cfg);
    cfg.validate();
    require_trainable(X, y, sig);
    TrainedModel m;
    m.kind = kind;
    m.signature = sig;
    m.config = cfg;
    std::visit([&](auto&& w) { m.params = std::move(w); }, fit_weak(kind, X, y, cfg, cfg.seed));
    return m;
}

TrainedModel train(ModelKind kind, const FeatureMatrix& X, const ModelConfig& cfg) {
    return train(kind, X.combined(), X.signature, X.labels, cfg);
}

std::vector<Prediction> predict(const TrainedModel& m, const Matrix& X, const FeatureSignature& sig) {
    if (!(sig == m.signature)) {
        throw ValidationError("feature signature mismatch: model expects " +
                              m.signature.to_json().dump() + ", got " + sig.to_json().dump());
    }
    if (X.cols() != m.signature.total_dim()) {
        throw ValidationError("matrix has " + std::to_string(X.cols()) + " columns, model expects " +
                              std::to_string(m.signature.total_dim()));
    }
    std::vector<Prediction> out(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const double p = std::clamp(m.p_fake(X.row(r)), 0.0, 1.0);
        out[r] = {label_for(p), p};
    }
    return out;
}

std::vector<Prediction> predict(const TrainedModel& m, const FeatureMatrix& X) {
    return predict(m, X.combined(), X.signature);
}

// ---------------------------------------------------------------- stacking

std::vector<int> stratified_folds(std::span<const Label> y, int folds, std::uint64_t seed) {
    if (folds < 2) throw ValidationError("stack_folds must be >= 2");
    if (y.size() < static_cast<std::size_t>(folds)) {
        throw ValidationError("cannot make " + std::to_string(folds) + " folds from " +
                              std::to_string(y.size()) + " rows");
    }
    std::vector<int> fold(y.size(), 0);
    std::size_t dealt = 0;
    for (Label cls : {Label::Fake, Label::Real}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] == cls) members.push_back(i);
        }
        if (members.size() < 2) {
            throw ValidationError("stacking needs at least 2 rows of class '" +
                                  std::string(to_string(cls)) + "', got " +
                                  std::to_string(members.size()));
        }
        Rng rng(derive_seed(seed, cls == Label::Fake ? 101 : 102));
        shuffle(std::span<std::size_t>(members), rng);
        for (auto i : members) fold[i] = static_cast<int>(dealt++ % static_cast<std::size_t>(folds));
    }
    return fold;
}

StackTraining train_stack_detailed(std::span<const ModelKind> weak_kinds, const Matrix& X,
                                   const FeatureSignature& sig, std::span<const Label> y,
                                   const ModelConfig& cfg) {
    cfg.validate();
    require_trainable(X, y, sig);
    if (weak_kinds.empty()) throw ValidationError("stacking needs at least one weak learner");
    for (auto k : weak_kinds) {
        if (k == ModelKind::StackedEnsemble) throw ValidationError("a stacked ensemble cannot be a weak learner");
    }

    StackTraining out;
    out.folds = stratified_folds(y, cfg.stack_folds, cfg.seed);
    const std::size_t n = X.rows();
    const std::size_t w = weak_kinds.size();
    out.meta_features = Matrix(n, w);

    for (int k = 0; k < cfg.stack_folds; ++k) {
        std::vector<std::size_t> train_rows, held_out;
        for (std::size_t i = 0; i < n; ++i) (out.folds[i] == k ? held_out : train_rows).push_back(i);
        if (held_out.empty()) continue;
        const Matrix Xtr = X.select_rows(train_rows);
        std::vector<Label> ytr;
        ytr.reserve(train_rows.size());
        for (auto i : train_rows) ytr.push_back(y[i]);
        const std::uint64_t fold_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k) + 1);
        for (std::size_t j = 0; j < w; ++j) {
            const auto learner = fit_weak(weak_kinds[j], Xtr, ytr, cfg, fold_seed);
            for (auto i : held_out) out.meta_features(i, j) = weak_p_fake(learner, X.row(i));
        }
    }

    StackParams sp;
    sp.weak_kinds.assign(weak_kinds.begin(), weak_kinds.end());
    sp.meta = learners::LogisticRegression::fit(out.meta_features, y, logistic_options(cfg));
    report_logistic(sp.meta, "meta-learner");
    for (auto kind : weak_kinds) sp.weak.push_back(fit_weak(kind, X, y, cfg, cfg.seed));

    out.model.kind = ModelKind::StackedEnsemble;
    out.model.params = std::move(sp);
    out.model.signature = sig;
    out.model.config = cfg;
    return out;
}

TrainedModel train_stack(std::span<const ModelKind> weak_kinds, const Matrix& X,
                         const FeatureSignature& sig, std::span<const Label> y,
                         const ModelConfig& cfg) {
    return train_stack_detailed(weak_kinds, X, sig, y, cfg).model;
}

TrainedModel train_stack(const FeatureMatrix& X, const ModelConfig& cfg,
                         std::span<const ModelKind> weak_kinds) {
    return train_stack(weak_kinds, X.combined(), X.signature, X.labels, cfg);
}

// ---------------------------------------------------------------- persistence

nlohmann::json model_to_json(const TrainedModel& m) {
    nlohmann::json params = std::visit(
        [](const auto& p) -> nlohmann::json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StackParams>) {
                nlohmann::json weak = nlohmann::json::array();
                for (std::size_t i = 0; i < p.weak.size(); ++i) {
                    weak.push_back({{"kind", to_string(p.weak_kinds[i])},
                                    {"params", weak_to_json(p.weak[i])}});
                }
                return {{"weak", weak}, {"meta", p.meta.to_json()}};
            } else {
                return p.to_json();
            }
        },
        m.params);
    return {{"format_version", m.format_version},
            {"kind", to_string(m.kind)},
            {"config", m.config.to_json()},
            {"signature", m.signature.to_json()},
            {"params", std::move(params)}};
}

TrainedModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("model file is not a JSON object");
    const auto v = j.find("format_version");
    if (v == j.end() || !v->is_number_integer()) {
        throw ValidationError("model file has no integer format_version");
    }
    const int version = v->get<int>();
    if (version != kModelFormatVersion) {
        throw ValidationError("unsupported model format_version " + std::to_string(version) +
                              " (this build reads version " + std::to_string(kModelFormatVersion) +
                              ")");
    }
    TrainedModel m;
    try {
        m.kind = parse_model_kind(j.at("kind").get<std::string>());
        m.config = ModelConfig::from_json(j.at("config"));
        m.signature = FeatureSignature::from_json(j.at("signature"));
        const auto& p = j.at("params");
        if (m.kind == ModelKind::StackedEnsemble) {
            StackParams sp;
            for (const auto& w : p.at("weak")) {
                const auto kind = parse_model_kind(w.at("kind").get<std::string>());
                sp.weak_kinds.push_back(kind);
                sp.weak.push_back(weak_from_json(kind, w.at("params")));
            }
            if (sp.weak.empty()) throw ValidationError("stacked model has no weak learners");
            sp.meta = learners::LogisticRegression::from_json(p.at("meta"));
            if (!sp.meta.constant && sp.meta.weights.size() != sp.weak.size()) {
                throw ValidationError("meta-learner width does not match weak learner count");
            }
            m.params = std::move(sp);
        } else {
            std::visit([&](auto&& w) { m.params = std::move(w); }, weak_from_json(m.kind, p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("corrupt model file: ") + e.what());
    }
    return m;
}

void save_model(const TrainedModel& m, const std::filesystem::path& path) {
    io::write_file(path, model_to_json(m).dump(1) + "\n");
}

TrainedModel load_model(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("corrupt model file " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace misinfo

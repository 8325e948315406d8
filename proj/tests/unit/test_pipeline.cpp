#include <doctest.h>

#include <fstream>

#include "misinfo/annotator.hpp"
#include "misinfo/error.hpp"
#include "misinfo/jsonl.hpp"
#include "misinfo/pipeline.hpp"
#include "test_util.hpp"

using namespace misinfo;
namespace fs = std::filesystem;

namespace {

fs::path fixture_config() { return test::source_dir() / "data" / "synthetic" / "config.json"; }

nlohmann::json fixture_json() { return nlohmann::json::parse(io::read_file(fixture_config())); }

}  // namespace

TEST_CASE("config parsing and overrides") {
    const auto base = fixture_config().parent_path();
    pipeline::Overrides o;
    o.seed = 7;
    o.threshold = 0.6;
    const auto cfg = pipeline::parse_config(fixture_json(), base, "annotate", o);
    CHECK(cfg.seed == 7);
    CHECK(cfg.cosine_threshold == 0.6);
    CHECK(cfg.tweets == base / "tweets.jsonl");

    const auto bots = pipeline::parse_config(fixture_json(), base, "bot-report", o);
    CHECK(bots.bot_threshold == 0.6);
    CHECK(bots.cosine_threshold == 0.85);

    auto j = fixture_json();
    j["surprise"] = 1;
    CHECK_THROWS_AS(pipeline::parse_config(j, base, "ingest"), ValidationError);
    j = fixture_json();
    j["model"]["seed"] = 3;
    CHECK_THROWS_AS(pipeline::parse_config(j, base, "ingest"), ValidationError);
    j = fixture_json();
    j["text_backend"] = "store";
    CHECK_THROWS_AS(pipeline::parse_config(j, base, "ingest"), ValidationError);
}

TEST_CASE("config hash ignores the output directory only") {
    const auto base = fixture_config().parent_path();
    auto j = fixture_json();
    const auto h0 = pipeline::parse_config(j, base, "ingest").config_hash;
    j["output_dir"] = "elsewhere";
    CHECK(pipeline::parse_config(j, base, "ingest").config_hash == h0);
    j["seed"] = 43;
    CHECK(pipeline::parse_config(j, base, "ingest").config_hash != h0);
}

TEST_CASE("exit codes") {
    test::TempDir dir("cli");
    auto j = fixture_json();
    j["tweets"] = (dir / "nowhere.jsonl").string();
    for (const char* k : {"statements", "trusted_sources", "gold_tweets", "bot_scores", "account_status"}) {
        j[k] = (fixture_config().parent_path() / j[k].get<std::string>()).string();
    }
    test::write(dir / "config.json", j.dump());
    pipeline::Overrides o;
    o.out = dir / "out";
    CHECK(pipeline::run("ingest", dir / "config.json", o) == 1);
    CHECK(pipeline::run("no-such-stage", fixture_config(), o) == 1);
    CHECK(pipeline::run("ingest", dir / "missing_config.json", o) == 1);
    // evaluate before train: the model artifact is missing.
    CHECK(pipeline::run("evaluate", fixture_config(), o) != 0);
}

TEST_CASE("missing input path is named in the error") {
    test::TempDir dir("cli");
    auto j = fixture_json();
    const auto missing = (dir / "nowhere.jsonl").string();
    j["tweets"] = missing;
    try {
        const auto cfg = pipeline::parse_config(j, fixture_config().parent_path(), "ingest");
        pipeline::run_stage("ingest", cfg);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("nowhere.jsonl") != std::string::npos);
    }
}

TEST_CASE("annotate at 0.99 produces no more records than at 0.85") {
    test::TempDir dir("annot");
    auto count = [&](double th) {
        pipeline::Overrides o;
        o.threshold = th;
        o.out = dir / ("out" + std::to_string(th));
        REQUIRE(pipeline::run("ingest", fixture_config(), o) == 0);
        REQUIRE(pipeline::run("group-verdicts", fixture_config(), o) == 0);
        REQUIRE(pipeline::run("annotate", fixture_config(), o) == 0);
        return load_annotations(*o.out / "annotations.jsonl").size();
    };
    const auto loose = count(0.85);
    const auto strict = count(0.99);
    CHECK(strict <= loose);
    CHECK(loose > 0);
}

TEST_CASE("full pipeline writes every artifact") {
    test::TempDir dir("full");
    pipeline::Overrides o;
    o.out = dir / "out";
    REQUIRE(pipeline::run("pipeline", fixture_config(), o) == 0);
    for (const auto& name : pipeline::artifact_names()) CHECK_MESSAGE(fs::exists(*o.out / name), name);
    const auto metrics = nlohmann::json::parse(io::read_file(*o.out / "metrics.json"));
    CHECK(metrics.contains("run"));
    const auto digest = nlohmann::json::parse(io::read_file(*o.out / "run_digest.json"));
    CHECK(digest.contains("run"));
}

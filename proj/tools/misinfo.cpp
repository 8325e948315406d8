#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "misinfo/pipeline.hpp"

namespace mp = misinfo::pipeline;

int main(int argc, char** argv) {
    mp::configure_logging();

    CLI::App app{"misinfo: automatic misinformation labeling, ensemble training and bot analysis", "misinfo"};
    app.set_version_flag("--version", std::string(mp::kToolkitVersion));
    app.require_subcommand(1);
    app.footer("Log verbosity: MISINFO_LOG_LEVEL=trace|debug|info|warn|error|off");

    std::string config;
    std::uint64_t seed = 0;
    double threshold = 0.0;
    std::string out;
    for (const auto& [name, about] : mp::subcommands()) {
        auto* sub = app.add_subcommand(name, about);
        sub->add_option("--config", config, "pipeline config (JSON)")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--threshold", threshold,
                        "cosine threshold (annotate, pipeline) or bot threshold (bot-report)");
        sub->add_option("--out", out, "override the output directory");
    }

    if (argc > 1 && argv[1][0] != '-') {
        const std::string_view first = argv[1];
        const auto& subs = mp::subcommands();
        if (std::none_of(subs.begin(), subs.end(), [&](const auto& s) { return s.first == first; })) {
            std::cerr << "error: unknown subcommand '" << first << "'\n\n" << app.help();
            return 1;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    auto* chosen = app.get_subcommands().front();
    mp::Overrides o;
    if (chosen->count("--seed")) o.seed = seed;
    if (chosen->count("--threshold")) o.threshold = threshold;
    if (chosen->count("--out")) o.out = out;
    return mp::run(chosen->get_name(), config, o);
}

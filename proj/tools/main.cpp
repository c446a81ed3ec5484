#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quarterlens/pipeline.hpp"
#include "quarterlens/segstat.hpp"

namespace {

struct CliState {
    std::string dataset;
    std::string config;
    std::string out = "out";
    std::string lexicon;
    std::vector<std::string> facade_classes;
    std::uint64_t seed = 0;
    int k = 5;
    int top_n = 20;
    int jobs = 0;
    double bandwidth = 4.5;
    double threshold = 0.01;
    bool no_white_balance = false;
};

void add_common_options(CLI::App* sub, CliState& st) {
    sub->add_option("dataset", st.dataset, "Dataset root: <root>/<quarter>/{photos,streetviews,masks,reviews.jsonl}")
        ->required();
    sub->add_option("--config", st.config, "JSON config file (overridden by explicit flags)");
    sub->add_option("--out", st.out, "Output directory (default: out)");
    sub->add_option("--seed", st.seed, "RNG seed for palette clustering");
    sub->add_option("--k", st.k, "Palette size (default: 5)");
    sub->add_option("--top-n", st.top_n, "Top CCS color rows per image (default: 20)");
    sub->add_option("--bandwidth", st.bandwidth, "Hue KDE bandwidth in hue units (default: 4.5)");
    sub->add_option("--heatmap-threshold", st.threshold,
                    "Hide heatmap cells at or below this fraction (default: 0.01)");
    sub->add_option("--lexicon", st.lexicon, "Sentiment lexicon JSON (default: built-in)");
    sub->add_option("--facade-classes", st.facade_classes,
                    "Comma-separated facade class names (default: Wall,Building)")
        ->delimiter(',');
    sub->add_option("--jobs", st.jobs, "Worker threads, 0 = auto");
    sub->add_flag("--no-white-balance", st.no_white_balance,
                  "Skip Gray World correction on both image sources");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quarterlens: batch color, segmentation, and review analytics for urban quarters"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "quarterlens 0.1.0");

    CliState st;
    struct SubSpec {
        const char* name;
        const char* help;
    };
    const SubSpec specs[] = {
        {"palette", "Dominant-color palettes and top CCS colors for quarter photos"},
        {"histogram", "Hue histograms and fitted density curves per quarter"},
        {"ks-matrix", "Pairwise KS divergence between quarter hue distributions"},
        {"segstats", "Segmentation-mask class statistics and cross-quarter heatmap"},
        {"facade-compare", "Photo-vs-streetview facade hue shift per quarter"},
        {"sentiment", "Four-dimension satisfaction scores for reviews"},
        {"report", "Run every enabled analysis and write the full report"},
    };
    for (const SubSpec& s : specs) add_common_options(app.add_subcommand(s.name, s.help), st);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        CLI::App* sub = app.get_subcommands().front();

        qlens::pipeline::RunConfig cfg;
        if (sub->count("--config")) cfg = qlens::pipeline::load_config(st.config);
        if (sub->count("--seed")) cfg.seed = st.seed;
        if (sub->count("--k")) cfg.k = st.k;
        if (sub->count("--top-n")) cfg.top_n = st.top_n;
        if (sub->count("--bandwidth")) cfg.bandwidth = st.bandwidth;
        if (sub->count("--heatmap-threshold")) cfg.heatmap_threshold = st.threshold;
        if (sub->count("--lexicon")) cfg.lexicon_path = st.lexicon;
        if (sub->count("--jobs")) cfg.jobs = st.jobs;
        if (st.no_white_balance)
            cfg.white_balance_photos = cfg.white_balance_streetviews = false;
        if (sub->count("--facade-classes")) {
            cfg.facade_classes.clear();
            for (const std::string& name : st.facade_classes) {
                int idx = qlens::segstat::class_index(name);
                if (idx <= qlens::segstat::kBackground)
                    throw std::invalid_argument("unknown facade class '" + name + "'");
                cfg.facade_classes.push_back(idx);
            }
        }

        const std::string& mode = sub->get_name();
        if (mode != "report") {
            cfg.palette = cfg.histogram = cfg.ks = cfg.segstat = cfg.facade = cfg.sentiment = false;
            cfg.strict_inputs = true;
            if (mode == "palette") cfg.palette = true;
            else if (mode == "histogram") cfg.histogram = true;
            else if (mode == "ks-matrix") cfg.ks = true;
            else if (mode == "segstats") cfg.segstat = true;
            else if (mode == "facade-compare") cfg.facade = true;
            else if (mode == "sentiment") cfg.sentiment = true;
        }

        qlens::pipeline::DatasetLayout layout = qlens::pipeline::discover(st.dataset);
        qlens::pipeline::RunResult result = qlens::pipeline::run(layout, cfg, st.out);
        for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
        std::cout << "wrote " << result.manifest.size() << " artifacts + manifest.json to "
                  << st.out << "\n";
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

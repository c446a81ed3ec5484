#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "fixture_dataset.hpp"
#include "json.hpp"
#include "quarterlens/pipeline.hpp"

using namespace qlens;
namespace fs = std::filesystem;

namespace {

const fs::path& dataset_root() {
    static const fs::path root = qfx::build_dataset(qfx::temp_dir("qlens_pipeline_fixture"));
    return root;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::map<std::string, std::string> tree_bytes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file())
            out[fs::relative(e.path(), dir).generic_string()] = read_bytes(e.path());
    return out;
}

bool mentions(const std::vector<std::string>& warnings, const std::string& needle) {
    return std::any_of(warnings.begin(), warnings.end(),
                       [&](const std::string& w) { return w.find(needle) != std::string::npos; });
}

diststat::HueHistogram direct_photo_hist(const pipeline::QuarterInputs& q) {
    diststat::HueHistogram h;
    h.label = q.name;
    for (const fs::path& p : q.photos) {
        color::PixelImage img = color::gray_world_correct(io::load_image(p));
        diststat::accumulate(h, diststat::build_histogram(color::to_hsv(img), ""));
    }
    return h;
}

}  // namespace

TEST_CASE("discover inventories quarters, pairs, and reviews") {
    pipeline::DatasetLayout layout = pipeline::discover(dataset_root());
    CHECK(layout.warnings.empty());
    REQUIRE(layout.quarters.size() == 2);

    const pipeline::QuarterInputs& east = layout.quarters[0];
    CHECK(east.name == "quarter_east");
    REQUIRE(east.photos.size() == 3);
    CHECK(east.photos[0].filename() == "p1.png");
    CHECK(east.photos[2].filename() == "p3.jpg");
    CHECK(east.streetviews.size() == 2);
    REQUIRE(east.photo_pairs.size() == 1);
    CHECK(east.photo_pairs[0].image.filename() == "p1.png");
    CHECK(east.photo_pairs[0].mask.filename() == "p1.png");
    REQUIRE(east.street_pairs.size() == 1);
    CHECK(east.street_pairs[0].image.filename() == "s1.png");
    CHECK(!east.reviews.empty());

    CHECK(layout.quarters[1].name == "quarter_west");
}

TEST_CASE("discover flags orphan, ambiguous, mismatched, and duplicate inputs") {
    fs::path root = qfx::temp_dir("qlens_pipeline_messy");
    fs::path q1 = root / "q1";
    fs::create_directories(q1 / "photos");
    fs::create_directories(q1 / "streetviews");
    fs::create_directories(q1 / "masks");
    io::save_png(q1 / "photos" / "a.png", qfx::flat(4, 4, {10, 10, 10}));
    io::save_png(q1 / "streetviews" / "a.png", qfx::flat(4, 4, {20, 20, 20}));
    io::save_mask_png(q1 / "masks" / "a.png", qfx::band_mask(4, 4, 2, 3));
    io::save_mask_png(q1 / "masks" / "zz.png", qfx::band_mask(4, 4, 2, 3));
    io::save_png(q1 / "photos" / "b.png", qfx::flat(4, 4, {30, 30, 30}));
    io::save_mask_png(q1 / "masks" / "b.png", qfx::band_mask(5, 4, 2, 3));
    io::save_png(q1 / "photos" / "c.png", qfx::flat(4, 4, {40, 40, 40}));
    io::save_jpeg(q1 / "photos" / "c.jpg", qfx::flat(4, 4, {40, 40, 40}));
    io::save_jpeg(q1 / "masks" / "m.jpg", qfx::flat(4, 4, {0, 0, 0}));
    fs::create_directories(root / "q2");
    qfx::write_text(root / "stray.txt", "ignored");

    pipeline::DatasetLayout layout = pipeline::discover(root);
    REQUIRE(layout.quarters.size() == 1);
    CHECK(layout.quarters[0].name == "q1");
    CHECK(layout.quarters[0].photos.size() == 3);  // one of the duplicate stems dropped
    CHECK(layout.quarters[0].photo_pairs.empty());
    CHECK(layout.quarters[0].street_pairs.empty());

    CHECK(mentions(layout.warnings, "matches both a photo and a streetview"));
    CHECK(mentions(layout.warnings, "orphan mask"));
    CHECK(mentions(layout.warnings, "masks/zz.png"));
    CHECK(mentions(layout.warnings, "duplicate stem 'c'"));
    CHECK(mentions(layout.warnings, "mask files must be PNG"));
    CHECK(mentions(layout.warnings, "quarter 'q2' has no readable inputs; skipped"));

    bool mismatch_names_both = false;
    for (const std::string& w : layout.warnings)
        if (w.find("masks/b.png") != std::string::npos &&
            w.find("photos/b.png") != std::string::npos &&
            w.find("5x4") != std::string::npos && w.find("4x4") != std::string::npos &&
            w.find("pair excluded") != std::string::npos)
            mismatch_names_both = true;
    CHECK(mismatch_names_both);
}

TEST_CASE("discover rejects bad roots and reports empty ones") {
    CHECK_THROWS_AS(pipeline::discover(dataset_root() / "no_such_dir"), std::runtime_error);
    fs::path empty = qfx::temp_dir("qlens_pipeline_empty");
    pipeline::DatasetLayout layout = pipeline::discover(empty);
    CHECK(layout.quarters.empty());
    CHECK(mentions(layout.warnings, "no quarter directories"));
}

TEST_CASE("config json overrides defaults and rejects unknown keys") {
    pipeline::RunConfig cfg;
    pipeline::apply_config_json(cfg, R"({
        "analyses": ["palette", "ks"],
        "k": 3, "top_n": 7, "bandwidth": 2.0, "heatmap_threshold": 0.05,
        "seed": 42, "white_balance": {"photos": false},
        "facade_classes": ["Wall", "Sign"], "jobs": 2, "lexicon": "lex.json"
    })");
    CHECK(cfg.palette);
    CHECK(cfg.ks);
    CHECK_FALSE(cfg.histogram);
    CHECK_FALSE(cfg.segstat);
    CHECK_FALSE(cfg.facade);
    CHECK_FALSE(cfg.sentiment);
    CHECK(cfg.k == 3);
    CHECK(cfg.top_n == 7);
    CHECK(cfg.bandwidth == 2.0);
    CHECK(cfg.heatmap_threshold == 0.05);
    CHECK(cfg.seed == 42);
    CHECK_FALSE(cfg.white_balance_photos);
    CHECK(cfg.white_balance_streetviews);
    CHECK(cfg.facade_classes == std::vector<int>{3, 6});
    CHECK(cfg.jobs == 2);
    CHECK(cfg.lexicon_path == fs::path("lex.json"));

    pipeline::RunConfig plain;
    pipeline::apply_config_json(plain, R"({"white_balance": false})");
    CHECK_FALSE(plain.white_balance_photos);
    CHECK_FALSE(plain.white_balance_streetviews);

    pipeline::RunConfig bad;
    CHECK_THROWS_AS(pipeline::apply_config_json(bad, R"({"bogus": 1})"), std::invalid_argument);
    CHECK_THROWS_AS(pipeline::apply_config_json(bad, R"({"analyses": ["palete"]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(pipeline::apply_config_json(bad, R"({"facade_classes": ["Background"]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(pipeline::apply_config_json(bad, "not json"), std::invalid_argument);
    CHECK_THROWS_AS(pipeline::apply_config_json(bad, R"(["array"])"), std::invalid_argument);
    CHECK_THROWS_AS(pipeline::apply_config_json(bad, R"({"k": 0})"), std::invalid_argument);
    CHECK_THROWS_AS(pipeline::apply_config_json(bad, R"({"bandwidth": 0})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(pipeline::apply_config_json(bad, R"({"heatmap_threshold": 0})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(pipeline::apply_config_json(bad, R"({"heatmap_threshold": 1})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(pipeline::apply_config_json(bad, R"({"jobs": -1})"), std::invalid_argument);
}

TEST_CASE("load_config layers a file over a base config") {
    fs::path dir = qfx::temp_dir("qlens_pipeline_cfg");
    qfx::write_text(dir / "cfg.json", R"({"k": 2, "seed": 9})");
    pipeline::RunConfig base;
    base.top_n = 3;
    pipeline::RunConfig cfg = pipeline::load_config(dir / "cfg.json", base);
    CHECK(cfg.k == 2);
    CHECK(cfg.seed == 9);
    CHECK(cfg.top_n == 3);
    CHECK_THROWS_AS(pipeline::load_config(dir / "missing.json"), std::runtime_error);
}

TEST_CASE("full report run is deterministic and composes from the module primitives") {
    pipeline::DatasetLayout layout = pipeline::discover(dataset_root());
    pipeline::RunConfig cfg;
    cfg.jobs = 1;

    fs::path out1 = qfx::temp_dir("qlens_pipeline_out1");
    pipeline::RunResult res = pipeline::run(layout, cfg, out1);
    CHECK(res.exit_code == 0);
    CHECK(res.warnings.empty());
    REQUIRE(res.quarters.size() == 2);

    // Re-running, and running with a different worker count, reproduces every
    // artifact byte for byte.
    fs::path out2 = qfx::temp_dir("qlens_pipeline_out2");
    pipeline::run(layout, cfg, out2);
    pipeline::RunConfig wide = cfg;
    wide.jobs = 4;
    fs::path out3 = qfx::temp_dir("qlens_pipeline_out3");
    pipeline::run(layout, wide, out3);
    auto t1 = tree_bytes(out1);
    CHECK(t1 == tree_bytes(out2));
    CHECK(t1 == tree_bytes(out3));

    // Manifest covers exactly the artifacts and their true digests.
    REQUIRE(fs::exists(out1 / "manifest.json"));
    std::size_t files_on_disk = t1.size() - 1;  // manifest.json itself is not listed
    CHECK(res.manifest.size() == files_on_disk);
    for (const pipeline::ManifestEntry& e : res.manifest) {
        auto it = t1.find(e.path);
        REQUIRE(it != t1.end());
        CHECK(e.bytes == it->second.size());
        CHECK(e.sha256 == pipeline::sha256_hex(it->second));
    }
    nlohmann::json manifest = nlohmann::json::parse(t1.at("manifest.json"));
    CHECK(manifest.at("tool") == "quarterlens");
    CHECK(manifest.at("seed") == 0);
    CHECK(manifest.at("warning_count") == 0);
    CHECK(manifest.at("quarters") == nlohmann::json({"quarter_east", "quarter_west"}));
    CHECK(manifest.at("files").size() == res.manifest.size());

    // Expected artifact set for the east quarter.
    CHECK(t1.count("quarters/quarter_east/palette/p1.json") == 1);
    CHECK(t1.count("quarters/quarter_east/palette/p1_swatch.png") == 1);
    CHECK(t1.count("quarters/quarter_east/top_colors.csv") == 1);
    CHECK(t1.count("quarters/quarter_east/hue_histogram.csv") == 1);
    CHECK(t1.count("quarters/quarter_east/hue_curve.csv") == 1);
    CHECK(t1.count("quarters/quarter_east/streetview_histogram.csv") == 1);
    CHECK(t1.count("quarters/quarter_east/class_proportions.csv") == 1);
    CHECK(t1.count("quarters/quarter_east/facade_shift.json") == 1);
    CHECK(t1.count("quarters/quarter_east/sentiment_scores.csv") == 1);
    CHECK(t1.count("quarters/quarter_east/sentiment_summary.json") == 1);
    CHECK(t1.count("ks_matrix.json") == 1);
    CHECK(t1.count("ks_pairs.csv") == 1);
    CHECK(t1.count("heatmap.csv") == 1);
    CHECK(t1.count("facade_shift.csv") == 1);
    CHECK(t1.count("warnings.txt") == 0);

    // KS matrix equals the statistic computed directly from the same pixels.
    REQUIRE(res.ks.has_value());
    REQUIRE(res.ks->labels == std::vector<std::string>{"quarter_east", "quarter_west"});
    diststat::HueHistogram he = direct_photo_hist(layout.quarters[0]);
    diststat::HueHistogram hw = direct_photo_hist(layout.quarters[1]);
    CHECK(res.ks->values[0][1] == diststat::ks_statistic(he, hw));
    CHECK(res.ks->values[0][0] == 0.0);
    REQUIRE(res.quarters[0].photo_hist.has_value());
    CHECK(res.quarters[0].photo_hist->bins == he.bins);

    // Segment proportions equal a direct merge of the quarter's masks.
    const pipeline::QuarterInputs& east = layout.quarters[0];
    std::vector<segstat::ClassMask> masks;
    masks.push_back(io::load_mask(east.photo_pairs[0].mask));
    masks.push_back(io::load_mask(east.street_pairs[0].mask));
    segstat::ClassProportions direct = segstat::class_proportions(masks, east.name);
    REQUIRE(res.quarters[0].proportions.has_value());
    CHECK(res.quarters[0].proportions->counts == direct.counts);
    CHECK(res.quarters[0].proportions->total_pixels == direct.total_pixels);
    CHECK(res.quarters[0].proportions->of_foreground == direct.of_foreground);
    REQUIRE(res.heatmap.has_value());
    CHECK(res.heatmap->quarters == std::vector<std::string>{"quarter_east", "quarter_west"});

    // Facade shift equals the report computed directly from the paired files.
    color::PixelImage p1 = color::gray_world_correct(io::load_image(east.photo_pairs[0].image));
    color::PixelImage s1 = color::gray_world_correct(io::load_image(east.street_pairs[0].image));
    auto ppx = segstat::facade_pixels(p1, masks[0], segstat::default_facade_classes());
    auto spx = segstat::facade_pixels(s1, masks[1], segstat::default_facade_classes());
    diststat::FacadeShiftReport direct_shift = diststat::facade_shift_report(
        diststat::build_histogram(ppx, ""), diststat::build_histogram(spx, ""));
    REQUIRE(res.facade_shifts.size() == 2);
    CHECK(res.facade_shifts[0].quarter == "quarter_east");
    REQUIRE(res.quarters[0].facade_shift.has_value());
    CHECK(res.quarters[0].facade_shift->ks == direct_shift.ks);
    for (int b = 0; b < 3; ++b) {
        CHECK(res.quarters[0].facade_shift->bands[b].delta == direct_shift.bands[b].delta);
        CHECK(res.quarters[0].facade_shift->bands[b].direction ==
              direct_shift.bands[b].direction);
    }

    // Quarter sentiment means equal the mean of directly scored reviews.
    sentiment::LexiconSet lex = sentiment::parse_lexicon(pipeline::default_lexicon_json());
    const char* east_texts[] = {
        "来步行街了，打卡成功！但街道有点脏乱差，而且说实话没啥太多的餐饮选择",
        "人太多了 容易发生踩踏事件 不过景色真的很漂亮 建筑群超好看",
        "厕所很干净",
        "价格有点贵。",
    };
    std::array<double, 4> mean{};
    for (const char* text : east_texts) {
        sentiment::DimensionScores s = sentiment::score_review(text, lex);
        for (int d = 0; d < 4; ++d) mean[d] += s[static_cast<sentiment::Dimension>(d)];
    }
    for (double& m : mean) m /= 4.0;
    CHECK(res.quarters[0].has_sentiment);
    CHECK(res.quarters[0].review_count == 4);
    CHECK(res.quarters[0].sentiment_means == mean);
    nlohmann::json summary =
        nlohmann::json::parse(t1.at("quarters/quarter_east/sentiment_summary.json"));
    CHECK(summary.at("review_count") == 4);
}

TEST_CASE("seed changes palettes but nothing downstream of them") {
    pipeline::DatasetLayout layout = pipeline::discover(dataset_root());
    pipeline::RunConfig a;
    pipeline::RunConfig b;
    b.seed = 1234;
    fs::path outa = qfx::temp_dir("qlens_pipeline_seed_a");
    fs::path outb = qfx::temp_dir("qlens_pipeline_seed_b");
    pipeline::run(layout, a, outa);
    pipeline::run(layout, b, outb);
    auto ta = tree_bytes(outa);
    auto tb = tree_bytes(outb);
    CHECK(ta.at("quarters/quarter_east/hue_histogram.csv") ==
          tb.at("quarters/quarter_east/hue_histogram.csv"));
    CHECK(ta.at("ks_pairs.csv") == tb.at("ks_pairs.csv"));
    CHECK(ta.at("heatmap.csv") == tb.at("heatmap.csv"));
    CHECK(ta.at("quarters/quarter_east/sentiment_scores.csv") ==
          tb.at("quarters/quarter_east/sentiment_scores.csv"));
}

TEST_CASE("quarters without masks or reviews degrade with warnings") {
    fs::path root = qfx::temp_dir("qlens_pipeline_partial");
    for (const char* name : {"qa", "qb"}) {
        fs::create_directories(root / name / "photos");
        io::save_png(root / name / "photos" / "x.png",
                     qfx::bands(6, 6, {200, 30, 30}, {30, 30, 200}));
    }
    pipeline::DatasetLayout layout = pipeline::discover(root);
    REQUIRE(layout.quarters.size() == 2);

    pipeline::RunConfig cfg;
    fs::path out = qfx::temp_dir("qlens_pipeline_partial_out");
    pipeline::RunResult res = pipeline::run(layout, cfg, out);
    CHECK(res.exit_code == 2);
    CHECK(mentions(res.warnings, "has no usable masks; segstats skipped"));
    CHECK(mentions(res.warnings, "facade comparison skipped"));
    CHECK(mentions(res.warnings, "analysis 'sentiment' had no valid inputs"));
    CHECK(fs::exists(out / "warnings.txt"));
    CHECK(fs::exists(out / "ks_matrix.json"));
    CHECK(fs::exists(out / "quarters/qa/palette/x.json"));
    CHECK_FALSE(res.heatmap.has_value());

    nlohmann::json manifest = nlohmann::json::parse(read_bytes(out / "manifest.json"));
    CHECK(manifest.at("warning_count") == res.warnings.size());

    // The same gaps fail the run when inputs are strict.
    pipeline::RunConfig strict;
    strict.palette = strict.histogram = strict.ks = strict.facade = strict.sentiment = false;
    strict.segstat = true;
    strict.strict_inputs = true;
    fs::path sout = qfx::temp_dir("qlens_pipeline_strict_out");
    CHECK(pipeline::run(layout, strict, sout).exit_code == 1);

    pipeline::RunConfig pal = strict;
    pal.segstat = false;
    pal.palette = true;
    fs::path pout = qfx::temp_dir("qlens_pipeline_palette_out");
    CHECK(pipeline::run(layout, pal, pout).exit_code == 0);
}

TEST_CASE("a single quarter cannot fill a ks matrix") {
    fs::path root = qfx::temp_dir("qlens_pipeline_single");
    fs::create_directories(root / "only" / "photos");
    io::save_png(root / "only" / "photos" / "x.png", qfx::flat(5, 5, {120, 40, 40}));
    pipeline::DatasetLayout layout = pipeline::discover(root);
    pipeline::RunConfig cfg;
    cfg.palette = cfg.histogram = cfg.segstat = cfg.facade = cfg.sentiment = false;
    cfg.ks = true;
    fs::path out = qfx::temp_dir("qlens_pipeline_single_out");
    pipeline::RunResult res = pipeline::run(layout, cfg, out);
    CHECK(res.exit_code == 2);
    CHECK(mentions(res.warnings, "needs at least two quarters"));
    CHECK_FALSE(res.ks.has_value());
}

TEST_CASE("review parsing synthesizes ids and skips malformed lines") {
    fs::path root = qfx::temp_dir("qlens_pipeline_reviews");
    fs::create_directories(root / "q");
    qfx::write_text(root / "q" / "reviews.jsonl",
                    "{\"id\": \"r1\", \"text\": \"厕所很干净\"}\n"
                    "{\"id\": 7, \"text\": \"价格贵\"}\n"
                    "{\"id\": \"x\"}\n"
                    "{not json\n"
                    "{\"id\": [1], \"text\": \"服务好\"}\n"
                    "\n"
                    "{\"text\": \"商品便宜\"}\n");
    pipeline::DatasetLayout layout = pipeline::discover(root);
    REQUIRE(layout.quarters.size() == 1);

    pipeline::RunConfig cfg;
    cfg.palette = cfg.histogram = cfg.ks = cfg.segstat = cfg.facade = false;
    cfg.sentiment = true;
    fs::path out = qfx::temp_dir("qlens_pipeline_reviews_out");
    pipeline::RunResult res = pipeline::run(layout, cfg, out);
    CHECK(res.exit_code == 2);
    CHECK(mentions(res.warnings, "skipping malformed review line"));
    CHECK(mentions(res.warnings, "has no text field"));
    CHECK(mentions(res.warnings, "non-string id"));
    CHECK(mentions(res.warnings, "reviews.jsonl:4"));
    REQUIRE(res.quarters.size() == 1);
    CHECK(res.quarters[0].review_count == 4);

    std::string csv = read_bytes(out / "quarters/q/sentiment_scores.csv");
    CHECK(csv.find("\nr1,") != std::string::npos);
    CHECK(csv.find("\n7,") != std::string::npos);
    CHECK(csv.find("\nq-5,") != std::string::npos);
    CHECK(csv.find("\nq-7,") != std::string::npos);
}

#ifdef QLENS_CLI_PATH
TEST_CASE("the command line frontend drives the same pipeline") {
    auto run_cli = [](const std::string& args) {
        std::string cmd = std::string(QLENS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
        int status = std::system(cmd.c_str());
        REQUIRE(status != -1);
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("definitely-not-a-subcommand") != 0);

    fs::path out = qfx::temp_dir("qlens_cli_out");
    int code = run_cli("report " + dataset_root().string() + " --out " + out.string() +
                       " --jobs 1");
    CHECK(code == 0);
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::exists(out / "ks_matrix.json"));

    fs::path pout = qfx::temp_dir("qlens_cli_palette_out");
    CHECK(run_cli("palette " + dataset_root().string() + " --out " + pout.string() + " --k 2") ==
          0);
    CHECK(fs::exists(pout / "quarters/quarter_east/palette/p1.json"));
    CHECK_FALSE(fs::exists(pout / "ks_matrix.json"));
}
#endif

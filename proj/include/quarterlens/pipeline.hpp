#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quarterlens/diststat.hpp"
#include "quarterlens/palette.hpp"
#include "quarterlens/report.hpp"
#include "quarterlens/segstat.hpp"
#include "quarterlens/sentiment.hpp"

namespace qlens::pipeline {

/// Mask paired with the image sharing its filename stem.
struct MaskPair {
    std::filesystem::path image;
    std::filesystem::path mask;
};

struct QuarterInputs {
    std::string name;
    std::filesystem::path dir;
    std::vector<std::filesystem::path> photos;       // sorted by filename
    std::vector<std::filesystem::path> streetviews;  // sorted by filename
    std::vector<MaskPair> photo_pairs;               // sorted by mask filename
    std::vector<MaskPair> street_pairs;
    std::filesystem::path reviews;  // empty when reviews.jsonl is absent
};

struct DatasetLayout {
    std::filesystem::path root;
    std::vector<QuarterInputs> quarters;  // sorted by name; empty quarters dropped
    std::vector<std::string> warnings;
};

/// Walk root/<quarter>/{photos,streetviews,masks,reviews.jsonl}. Orphan masks,
/// ambiguous or duplicate stems, unsupported files, and dimension mismatches
/// become warnings; a quarter with no readable inputs is skipped with a warning.
/// Throws std::runtime_error when root is missing or not a directory.
DatasetLayout discover(const std::filesystem::path& root);

struct RunConfig {
    bool palette = true;
    bool histogram = true;
    bool ks = true;
    bool segstat = true;
    bool facade = true;
    bool sentiment = true;

    int k = 5;
    int top_n = 20;
    double bandwidth = 4.5;
    double heatmap_threshold = 0.01;
    std::vector<int> facade_classes;  // empty -> segstat::default_facade_classes()
    std::uint64_t seed = 0;
    bool white_balance_photos = true;
    bool white_balance_streetviews = true;
    std::filesystem::path lexicon_path;  // empty -> built-in demonstration lexicon
    int jobs = 0;                        // worker threads; 0 -> auto

    /// Enabled analyses with zero valid inputs fail the run instead of
    /// degrading to a warning. Set by the single-analysis CLI subcommands.
    bool strict_inputs = false;
};

/// Throws std::invalid_argument when a field is out of range.
void validate(const RunConfig& cfg);

/// Merge keys of a JSON config document over cfg. Unknown keys or bad values
/// throw std::invalid_argument.
void apply_config_json(RunConfig& cfg, const std::string& json_text);

RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// JSON source of the bundled demonstration lexicon.
const std::string& default_lexicon_json();

struct QuarterReport {
    std::string name;
    std::vector<std::pair<std::string, palette::PaletteResult>> palettes;  // stem, palette
    std::vector<report::NamedTopColors> top_colors;
    std::optional<diststat::HueHistogram> photo_hist;
    std::optional<diststat::FittedCurve> photo_curve;
    std::optional<diststat::HueHistogram> street_hist;
    std::optional<diststat::FittedCurve> street_curve;
    std::optional<segstat::ClassProportions> proportions;
    std::optional<diststat::FacadeShiftReport> facade_shift;
    std::array<double, sentiment::kNumDimensions> sentiment_means{};
    std::size_t review_count = 0;
    bool has_sentiment = false;
};

struct ManifestEntry {
    std::string path;  // relative to the output directory, '/' separators
    std::string sha256;
    std::uint64_t bytes = 0;
};

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 enabled analysis had no inputs, 2 warnings
    std::vector<QuarterReport> quarters;
    std::optional<diststat::KsMatrix> ks;
    std::optional<segstat::HeatmapTable> heatmap;
    std::vector<report::NamedShift> facade_shifts;
    std::vector<std::string> warnings;
    std::vector<ManifestEntry> manifest;  // sorted by path
};

/// Execute every enabled analysis over the layout and write CSV/JSON/PNG
/// artifacts plus manifest.json under out_dir. Deterministic for fixed
/// (dataset bytes, config, seed); jobs only changes scheduling.
/// Throws std::runtime_error / std::invalid_argument on configuration or
/// output-directory failures.
RunResult run(const DatasetLayout& layout, const RunConfig& cfg,
              const std::filesystem::path& out_dir);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace qlens::pipeline

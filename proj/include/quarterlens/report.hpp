#pragma once

#include <string>
#include <vector>

#include "quarterlens/color.hpp"
#include "quarterlens/diststat.hpp"
#include "quarterlens/palette.hpp"
#include "quarterlens/segstat.hpp"
#include "quarterlens/sentiment.hpp"

namespace qlens::report {

/// Shortest round-trip decimal form of a double ("0.25", "133", ...).
std::string format_double(double value);

/// RFC-4180 style field quoting, applied only when needed.
std::string csv_field(std::string_view value);

std::string palette_json(std::string_view stem, const palette::PaletteResult& result);

/// Proportional color blocks, Fig.-7(b) style strip.
color::PixelImage palette_swatch(const palette::PaletteResult& result, int width = 512,
                                 int height = 64);

struct NamedTopColors {
    std::string stem;
    std::vector<palette::CcsFrequencyEntry> entries;
};

std::string ccs_top_csv(const std::vector<NamedTopColors>& rows);

std::string histogram_csv(const diststat::HueHistogram& h);
std::string curve_csv(const diststat::FittedCurve& c);
std::string hue_plotdata_json(const diststat::HueHistogram& h, const diststat::FittedCurve* curve);

std::string ks_pairs_csv(const diststat::KsMatrix& m);
std::string ks_matrix_json(const diststat::KsMatrix& m);

std::string class_proportions_csv(const segstat::ClassProportions& p);
std::string heatmap_csv(const segstat::HeatmapTable& t, bool filtered);
std::string heatmap_json(const segstat::HeatmapTable& t);

struct NamedShift {
    std::string quarter;
    diststat::FacadeShiftReport shift;
};

std::string facade_shift_csv(const std::vector<NamedShift>& rows);
std::string facade_shift_json(const NamedShift& row);

std::string sentiment_scores_csv(const std::vector<sentiment::ScoredReview>& rows);
std::string sentiment_summary_json(const std::string& quarter,
                                   const std::array<double, sentiment::kNumDimensions>& means,
                                   std::size_t review_count);

}  // namespace qlens::report

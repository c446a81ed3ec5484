#include "quarterlens/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace qlens::report {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double value) {
    if (value == 0.0) return "0";  // merges -0
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

std::string csv_field(std::string_view value) {
    bool needs_quotes = value.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

ordered_json ccs_json(color::CcsCode code) {
    ordered_json j;
    j["hue_level"] = code.hue_level;
    j["sat_level"] = code.sat_level;
    j["val_level"] = code.val_level;
    return j;
}

ordered_json hsv_json(color::HsvPixel p) {
    ordered_json j;
    j["h"] = p.h;
    j["s"] = p.s;
    j["v"] = p.v;
    return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string palette_json(std::string_view stem, const palette::PaletteResult& result) {
    ordered_json j;
    j["stem"] = std::string(stem);
    j["degenerate"] = result.degenerate;
    ordered_json colors = ordered_json::array();
    for (const auto& e : result.entries) {
        ordered_json c;
        c["hex"] = color::hex_rgb(color::hsv_to_rgb(e.center));
        c["proportion"] = e.proportion;
        c["hsv"] = hsv_json(e.center);
        c["ccs"] = ccs_json(e.ccs);
        c["ccs_name"] = color::ccs_label(e.ccs);
        colors.push_back(std::move(c));
    }
    j["colors"] = std::move(colors);
    return dump(j);
}

color::PixelImage palette_swatch(const palette::PaletteResult& result, int width, int height) {
    color::PixelImage img(width, height);
    double cum = 0.0;
    int x0 = 0;
    for (const auto& e : result.entries) {
        cum += e.proportion;
        int x1 = static_cast<int>(std::llround(cum * width));
        x1 = std::clamp(x1, x0, width);
        color::RgbPixel rgb = color::hsv_to_rgb(e.center);
        for (int y = 0; y < height; ++y)
            for (int x = x0; x < x1; ++x) img.at(x, y) = rgb;
        x0 = x1;
    }
    // Rounding slack at the right edge extends the last block.
    if (x0 < width && !result.entries.empty()) {
        color::RgbPixel rgb = color::hsv_to_rgb(result.entries.back().center);
        for (int y = 0; y < height; ++y)
            for (int x = x0; x < width; ++x) img.at(x, y) = rgb;
    }
    return img;
}

std::string ccs_top_csv(const std::vector<NamedTopColors>& rows) {
    std::string out = "stem,rank,ccs_name,hue_level,sat_level,val_level,pixel_count,fraction\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.entries.size(); ++i) {
            const auto& e = row.entries[i];
            out += csv_field(row.stem);
            out += ',' + std::to_string(i + 1);
            out += ',' + color::ccs_label(e.code);
            out += ',' + std::to_string(e.code.hue_level);
            out += ',' + std::to_string(e.code.sat_level);
            out += ',' + std::to_string(e.code.val_level);
            out += ',' + std::to_string(e.pixel_count);
            out += ',' + format_double(e.fraction);
            out += '\n';
        }
    }
    return out;
}

std::string histogram_csv(const diststat::HueHistogram& h) {
    std::string out = "bin,count\n";
    for (int i = 0; i < diststat::kHueBins; ++i) {
        out += std::to_string(i);
        out += ',' + std::to_string(h.bins[i]);
        out += '\n';
    }
    return out;
}

std::string curve_csv(const diststat::FittedCurve& c) {
    std::string out = "bin_center,density\n";
    for (int i = 0; i < diststat::kHueBins; ++i) {
        out += format_double(i + 0.5);
        out += ',' + format_double(c.samples[i]);
        out += '\n';
    }
    return out;
}

std::string hue_plotdata_json(const diststat::HueHistogram& h,
                              const diststat::FittedCurve* curve) {
    ordered_json j;
    j["label"] = h.label;
    j["total"] = h.total;
    j["bins"] = h.bins;
    if (curve != nullptr) {
        ordered_json c;
        c["bandwidth"] = curve->bandwidth;
        c["density"] = curve->samples;
        j["curve"] = std::move(c);
    } else {
        j["curve"] = nullptr;
    }
    return dump(j);
}

std::string ks_pairs_csv(const diststat::KsMatrix& m) {
    std::string out = "a,b,ks\n";
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        for (std::size_t jdx = i + 1; jdx < m.labels.size(); ++jdx) {
            out += csv_field(m.labels[i]);
            out += ',';
            out += csv_field(m.labels[jdx]);
            out += ',' + format_double(m.values[i][jdx]);
            out += '\n';
        }
    }
    return out;
}

std::string ks_matrix_json(const diststat::KsMatrix& m) {
    ordered_json j;
    j["labels"] = m.labels;
    j["values"] = m.values;
    return dump(j);
}

std::string class_proportions_csv(const segstat::ClassProportions& p) {
    std::string out = "class_index,class_name,pixel_count,fraction_of_foreground,fraction_of_total\n";
    const auto& names = segstat::class_names();
    for (int c = 0; c < segstat::kNumClasses; ++c) {
        out += std::to_string(c);
        out += ',';
        out += names[c];
        out += ',' + std::to_string(p.counts[c]);
        out += ',';
        if (c != segstat::kBackground && p.fractions_defined)
            out += format_double(p.of_foreground[c]);
        out += ',';
        if (p.total_pixels > 0) out += format_double(p.of_total[c]);
        out += '\n';
    }
    return out;
}

namespace {

std::string heatmap_header() {
    std::string out = "quarter";
    const auto& names = segstat::class_names();
    for (int c = 1; c < segstat::kNumClasses; ++c) {
        out += ',';
        out += names[c];
    }
    out += '\n';
    return out;
}

}  // namespace

std::string heatmap_csv(const segstat::HeatmapTable& t, bool filtered) {
    std::string out = heatmap_header();
    for (std::size_t q = 0; q < t.quarters.size(); ++q) {
        out += csv_field(t.quarters[q]);
        for (int c = 0; c < segstat::kNumForegroundClasses; ++c) {
            out += ',';
            if (!filtered || t.cell_visible(q, c + 1)) out += format_double(t.values[q][c]);
        }
        out += '\n';
    }
    return out;
}

std::string heatmap_json(const segstat::HeatmapTable& t) {
    ordered_json j;
    j["quarters"] = t.quarters;
    ordered_json classes = ordered_json::array();
    const auto& names = segstat::class_names();
    for (int c = 1; c < segstat::kNumClasses; ++c) classes.push_back(std::string(names[c]));
    j["classes"] = std::move(classes);
    j["threshold"] = t.threshold;
    j["values"] = t.values;
    return dump(j);
}

std::string facade_shift_csv(const std::vector<NamedShift>& rows) {
    std::string out = "quarter,band,photo_fraction,street_fraction,delta,direction,ks\n";
    for (const auto& row : rows) {
        for (const auto& band : row.shift.bands) {
            out += csv_field(row.quarter);
            out += ',' + band.band;
            out += ',' + format_double(band.photo_fraction);
            out += ',' + format_double(band.street_fraction);
            out += ',' + format_double(band.delta);
            out += ',' + std::to_string(band.direction);
            out += ',' + format_double(row.shift.ks);
            out += '\n';
        }
    }
    return out;
}

std::string facade_shift_json(const NamedShift& row) {
    ordered_json j;
    j["quarter"] = row.quarter;
    j["ks"] = row.shift.ks;
    ordered_json bands = ordered_json::array();
    for (const auto& band : row.shift.bands) {
        ordered_json b;
        b["band"] = band.band;
        b["lo"] = band.lo;
        b["hi"] = band.hi;
        b["photo_fraction"] = band.photo_fraction;
        b["street_fraction"] = band.street_fraction;
        b["delta"] = band.delta;
        b["direction"] = band.direction;
        bands.push_back(std::move(b));
    }
    j["bands"] = std::move(bands);
    return dump(j);
}

std::string sentiment_scores_csv(const std::vector<sentiment::ScoredReview>& rows) {
    std::string out = "id,activities,built_environment,service_facilities,business_formats\n";
    for (const auto& row : rows) {
        out += csv_field(row.id);
        out += ',' + std::to_string(row.scores.activities);
        out += ',' + std::to_string(row.scores.built_environment);
        out += ',' + std::to_string(row.scores.service_facilities);
        out += ',' + std::to_string(row.scores.business_formats);
        out += '\n';
    }
    return out;
}

std::string sentiment_summary_json(const std::string& quarter,
                                   const std::array<double, sentiment::kNumDimensions>& means,
                                   std::size_t review_count) {
    ordered_json j;
    j["quarter"] = quarter;
    j["review_count"] = review_count;
    ordered_json m;
    for (int d = 0; d < sentiment::kNumDimensions; ++d)
        m[std::string(sentiment::to_string(static_cast<sentiment::Dimension>(d)))] = means[d];
    j["means"] = std::move(m);
    return dump(j);
}

}  // namespace qlens::report

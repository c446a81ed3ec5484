#include "quarterlens/segstat.hpp"

#include <stdexcept>

namespace qlens::segstat {

const std::array<std::string_view, kNumClasses>& class_names() {
    static const std::array<std::string_view, kNumClasses> names = {
        "Background", "Human",  "Door",   "Wall",   "Building", "Stairs",
        "Sign",       "Advertisement", "Light", "Tree", "Flower", "Plant",
        "Animal",     "Toy",    "Food",   "Drink",  "Vehicle",  "Bench",
        "Fence",      "Fountain", "Statue", "Vendor", "Artwork"};
    return names;
}

int class_index(std::string_view name) {
    const auto& names = class_names();
    for (int i = 0; i < kNumClasses; ++i) {
        if (names[i] == name) return i;
    }
    return -1;
}

ClassMask::ClassMask(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("ClassMask dimensions must be >= 1");
    indices.resize(static_cast<std::size_t>(w) * h, 0);
}

ClassMask::ClassMask(int w, int h, std::vector<std::uint8_t> idx)
    : width(w), height(h), indices(std::move(idx)) {
    if (w < 1 || h < 1) throw std::invalid_argument("ClassMask dimensions must be >= 1");
    if (indices.size() != static_cast<std::size_t>(w) * h)
        throw std::invalid_argument("ClassMask index count does not match width*height");
    for (std::uint8_t v : indices) {
        if (v >= kNumClasses)
            throw std::invalid_argument("ClassMask index " + std::to_string(v) +
                                        " outside taxonomy range [0, 22]");
    }
}

ClassProportions class_proportions(std::span<const ClassMask> masks, std::string quarter) {
    if (masks.empty()) throw std::invalid_argument("class_proportions: no masks");

    ClassProportions out;
    out.quarter = std::move(quarter);
    for (const ClassMask& m : masks) {
        for (std::uint8_t v : m.indices) {
            if (v >= kNumClasses)
                throw std::invalid_argument("class_proportions: index outside taxonomy range");
            out.counts[v]++;
        }
        out.total_pixels += m.indices.size();
    }
    out.foreground_pixels = out.total_pixels - out.counts[kBackground];
    out.fractions_defined = out.foreground_pixels > 0;

    for (int c = 0; c < kNumClasses; ++c)
        out.of_total[c] = static_cast<double>(out.counts[c]) / static_cast<double>(out.total_pixels);
    if (out.fractions_defined) {
        for (int c = 1; c < kNumClasses; ++c)
            out.of_foreground[c] =
                static_cast<double>(out.counts[c]) / static_cast<double>(out.foreground_pixels);
    }
    return out;
}

bool HeatmapTable::cell_visible(std::size_t quarter, int class_idx) const {
    return values[quarter][class_idx - 1] > threshold;
}

HeatmapTable heatmap_table(std::span<const ClassProportions> props, double threshold) {
    if (props.empty()) throw std::invalid_argument("heatmap_table: no quarters");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("heatmap_table: threshold must be in (0, 1)");

    HeatmapTable table;
    table.threshold = threshold;
    for (const ClassProportions& p : props) {
        table.quarters.push_back(p.quarter);
        std::array<double, kNumForegroundClasses> row{};
        for (int c = 1; c < kNumClasses; ++c) row[c - 1] = p.of_foreground[c];
        table.values.push_back(row);
    }
    return table;
}

std::vector<int> default_facade_classes() {
    return {class_index("Wall"), class_index("Building")};
}

std::vector<color::HsvPixel> facade_pixels(const color::PixelImage& img, const ClassMask& mask,
                                           std::span<const int> facade_classes) {
    if (img.width != mask.width || img.height != mask.height) {
        throw std::invalid_argument("facade_pixels: image " + std::to_string(img.width) + "x" +
                                    std::to_string(img.height) + " does not match mask " +
                                    std::to_string(mask.width) + "x" +
                                    std::to_string(mask.height));
    }

    std::array<bool, kNumClasses> wanted{};
    for (int c : facade_classes) {
        if (c < 0 || c >= kNumClasses)
            throw std::invalid_argument("facade_pixels: class index outside taxonomy range");
        wanted[c] = true;
    }

    std::vector<color::HsvPixel> out;
    for (std::size_t i = 0; i < mask.indices.size(); ++i) {
        if (wanted[mask.indices[i]]) out.push_back(color::rgb_to_hsv(img.pixels[i]));
    }
    return out;
}

}  // namespace qlens::segstat

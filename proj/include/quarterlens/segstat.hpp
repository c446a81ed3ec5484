#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quarterlens/color.hpp"

namespace qlens::segstat {

/// 22 foreground classes plus background at index 0.
inline constexpr int kNumForegroundClasses = 22;
inline constexpr int kNumClasses = kNumForegroundClasses + 1;
inline constexpr int kBackground = 0;

/// Class names indexed by taxonomy index; [0] is "Background".
const std::array<std::string_view, kNumClasses>& class_names();

/// Taxonomy index of a class name, or -1 if unknown. Case-sensitive.
int class_index(std::string_view name);

/// Per-pixel class-index map, row-major; every index in [0, 22].
struct ClassMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> indices;

    ClassMask() = default;
    ClassMask(int w, int h);
    ClassMask(int w, int h, std::vector<std::uint8_t> idx);

    std::uint8_t& at(int x, int y) { return indices[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return indices[static_cast<std::size_t>(y) * width + x]; }
};

/// Aggregate class pixel statistics for one quarter.
struct ClassProportions {
    std::string quarter;
    std::array<std::uint64_t, kNumClasses> counts{};
    std::uint64_t total_pixels = 0;
    std::uint64_t foreground_pixels = 0;
    bool fractions_defined = false;  // false when every pixel is background
    std::array<double, kNumClasses> of_foreground{};  // index 0 stays 0
    std::array<double, kNumClasses> of_total{};       // includes background base
};

ClassProportions class_proportions(std::span<const ClassMask> masks, std::string quarter);

/// Quarters x classes matrix of foreground fractions. Cells are shown in the
/// filtered view only when strictly above the threshold.
struct HeatmapTable {
    std::vector<std::string> quarters;
    std::vector<std::array<double, kNumForegroundClasses>> values;  // class index - 1
    double threshold = 0.01;

    bool cell_visible(std::size_t quarter, int class_idx) const;
};

HeatmapTable heatmap_table(std::span<const ClassProportions> props, double threshold = 0.01);

/// Default facade class set: {Wall, Building}.
std::vector<int> default_facade_classes();

/// HSV pixels at mask positions whose class is in facade_classes, row-major.
/// Throws if image and mask dimensions differ.
std::vector<color::HsvPixel> facade_pixels(const color::PixelImage& img, const ClassMask& mask,
                                           std::span<const int> facade_classes);

}  // namespace qlens::segstat

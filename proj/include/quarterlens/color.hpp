#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qlens::color {

/// 8-bit RGB sample.
struct RgbPixel {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const RgbPixel&) const = default;
};

/// HSV sample on the half-degree hue scale: h in [0, 180), s and v in [0, 1].
/// Achromatic pixels (s == 0) carry h == 0 by convention.
struct HsvPixel {
    double h = 0.0;
    double s = 0.0;
    double v = 0.0;

    bool operator==(const HsvPixel&) const = default;
};

/// Decoded raster, row-major.
struct PixelImage {
    int width = 0;
    int height = 0;
    std::vector<RgbPixel> pixels;

    PixelImage() = default;
    PixelImage(int w, int h);
    PixelImage(int w, int h, std::vector<RgbPixel> px);

    std::size_t size() const { return pixels.size(); }
    bool empty() const { return pixels.empty(); }
    RgbPixel& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    const RgbPixel& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const PixelImage&) const = default;
};

/// One of the 40 x 5 x 5 = 1000 Chinese-color-system categories.
struct CcsCode {
    int hue_level = 0;  // [0, 39]
    int sat_level = 0;  // [0, 4]
    int val_level = 0;  // [0, 4]

    auto operator<=>(const CcsCode&) const = default;
};

/// The ten basic hues, in wheel order starting at pure red.
enum class BasicHue { R, YR, Y, GY, G, BG, B, PB, P, RP };

const char* to_string(BasicHue hue);

/// Human-readable CCS identity: basic hue + sub-interval, hue_level = 4 * hue_index + sub_index.
struct CcsName {
    BasicHue basic_hue = BasicHue::R;
    int sub_index = 0;  // [0, 3]
    int sat_level = 0;
    int val_level = 0;

    bool operator==(const CcsName&) const = default;
};

HsvPixel rgb_to_hsv(RgbPixel p);
RgbPixel hsv_to_rgb(HsvPixel p);

/// Gray World white balance: scales each channel toward the mean of the
/// three channel means. A channel with zero mean keeps gain 1. Throws
/// std::invalid_argument on an empty image.
PixelImage gray_world_correct(const PixelImage& img);

CcsCode quantize_to_ccs(HsvPixel p);
CcsName ccs_name(CcsCode c);
CcsCode ccs_code(const CcsName& n);

/// Compact label such as "GY1-s2v2".
std::string ccs_label(const CcsName& n);
std::string ccs_label(CcsCode c);

/// Lowercase "#rrggbb".
std::string hex_rgb(RgbPixel p);

/// HSV view of a whole image, pixel order preserved.
std::vector<HsvPixel> to_hsv(const PixelImage& img);

}  // namespace qlens::color

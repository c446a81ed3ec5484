#include "quarterlens/color.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qlens::color {

namespace {

std::uint8_t clamp_channel(double v) {
    if (v <= 0.0) return 0;
    if (v >= 255.0) return 255;
    return static_cast<std::uint8_t>(std::llround(v));
}

}  // namespace

PixelImage::PixelImage(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("PixelImage dimensions must be >= 1");
    pixels.resize(static_cast<std::size_t>(w) * h);
}

PixelImage::PixelImage(int w, int h, std::vector<RgbPixel> px)
    : width(w), height(h), pixels(std::move(px)) {
    if (w < 1 || h < 1) throw std::invalid_argument("PixelImage dimensions must be >= 1");
    if (pixels.size() != static_cast<std::size_t>(w) * h)
        throw std::invalid_argument("PixelImage pixel count does not match width*height");
}

const char* to_string(BasicHue hue) {
    switch (hue) {
        case BasicHue::R: return "R";
        case BasicHue::YR: return "YR";
        case BasicHue::Y: return "Y";
        case BasicHue::GY: return "GY";
        case BasicHue::G: return "G";
        case BasicHue::BG: return "BG";
        case BasicHue::B: return "B";
        case BasicHue::PB: return "PB";
        case BasicHue::P: return "P";
        case BasicHue::RP: return "RP";
    }
    return "?";
}

HsvPixel rgb_to_hsv(RgbPixel p) {
    const int maxc = std::max({p.r, p.g, p.b});
    const int minc = std::min({p.r, p.g, p.b});
    const int delta = maxc - minc;

    HsvPixel out;
    out.v = maxc / 255.0;
    out.s = maxc == 0 ? 0.0 : static_cast<double>(delta) / maxc;
    if (delta == 0) {
        out.h = 0.0;
        return out;
    }

    double deg;
    if (maxc == p.r) {
        deg = 60.0 * (static_cast<double>(p.g) - p.b) / delta;
    } else if (maxc == p.g) {
        deg = 60.0 * ((static_cast<double>(p.b) - p.r) / delta + 2.0);
    } else {
        deg = 60.0 * ((static_cast<double>(p.r) - p.g) / delta + 4.0);
    }
    if (deg < 0.0) deg += 360.0;

    out.h = deg * 0.5;
    if (out.h >= 180.0) out.h -= 180.0;
    if (out.h <= 0.0) out.h = 0.0;  // normalize -0
    return out;
}

RgbPixel hsv_to_rgb(HsvPixel p) {
    if (p.s <= 0.0) {
        const std::uint8_t g = clamp_channel(p.v * 255.0);
        return {g, g, g};
    }

    const double deg = p.h * 2.0;  // back to the full 360-degree circle
    const double c = p.v * p.s;
    const double x = c * (1.0 - std::fabs(std::fmod(deg / 60.0, 2.0) - 1.0));
    const double m = p.v - c;

    double r = 0, g = 0, b = 0;
    const int sector = std::min(5, static_cast<int>(deg / 60.0));
    switch (sector) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        case 5: r = c; b = x; break;
    }
    return {clamp_channel((r + m) * 255.0), clamp_channel((g + m) * 255.0),
            clamp_channel((b + m) * 255.0)};
}

PixelImage gray_world_correct(const PixelImage& img) {
    if (img.empty()) throw std::invalid_argument("gray_world_correct: empty image");

    std::uint64_t sum_r = 0, sum_g = 0, sum_b = 0;
    for (const RgbPixel& p : img.pixels) {
        sum_r += p.r;
        sum_g += p.g;
        sum_b += p.b;
    }
    const double n = static_cast<double>(img.pixels.size());
    const double mean_r = sum_r / n;
    const double mean_g = sum_g / n;
    const double mean_b = sum_b / n;
    const double target = (mean_r + mean_g + mean_b) / 3.0;

    // A zero-mean channel signals a degenerate image; leave it untouched.
    const double gain_r = mean_r == 0.0 ? 1.0 : target / mean_r;
    const double gain_g = mean_g == 0.0 ? 1.0 : target / mean_g;
    const double gain_b = mean_b == 0.0 ? 1.0 : target / mean_b;

    PixelImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const RgbPixel& p = img.pixels[i];
        out.pixels[i] = {clamp_channel(p.r * gain_r), clamp_channel(p.g * gain_g),
                         clamp_channel(p.b * gain_b)};
    }
    return out;
}

CcsCode quantize_to_ccs(HsvPixel p) {
    // 40 equal hue intervals of width 4.5; s and v each split into 5 levels,
    // with the top boundary clamped into the last level.
    int hue_level = static_cast<int>(std::floor(p.h / 4.5));
    hue_level = std::clamp(hue_level, 0, 39);
    const int sat_level = std::min(static_cast<int>(std::floor(p.s * 5.0)), 4);
    const int val_level = std::min(static_cast<int>(std::floor(p.v * 5.0)), 4);
    return {hue_level, std::max(0, sat_level), std::max(0, val_level)};
}

CcsName ccs_name(CcsCode c) {
    CcsName n;
    n.basic_hue = static_cast<BasicHue>(c.hue_level / 4);
    n.sub_index = c.hue_level % 4;
    n.sat_level = c.sat_level;
    n.val_level = c.val_level;
    return n;
}

CcsCode ccs_code(const CcsName& n) {
    return {static_cast<int>(n.basic_hue) * 4 + n.sub_index, n.sat_level, n.val_level};
}

std::string ccs_label(const CcsName& n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%d-s%dv%d", to_string(n.basic_hue), n.sub_index,
                  n.sat_level, n.val_level);
    return buf;
}

std::string ccs_label(CcsCode c) { return ccs_label(ccs_name(c)); }

std::string hex_rgb(RgbPixel p) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", p.r, p.g, p.b);
    return buf;
}

std::vector<HsvPixel> to_hsv(const PixelImage& img) {
    std::vector<HsvPixel> out;
    out.reserve(img.pixels.size());
    for (const RgbPixel& p : img.pixels) out.push_back(rgb_to_hsv(p));
    return out;
}

}  // namespace qlens::color

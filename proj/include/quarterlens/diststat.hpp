#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "quarterlens/color.hpp"

namespace qlens::diststat {

inline constexpr int kHueBins = 180;

/// Pixel counts over 180 integer hue bins, bin index = min(floor(h), 179).
struct HueHistogram {
    std::array<std::uint64_t, kHueBins> bins{};
    std::uint64_t total = 0;
    std::string label;
};

HueHistogram build_histogram(std::span<const color::HsvPixel> pixels, std::string label);

/// Merge counts of b into a (labels untouched).
void accumulate(HueHistogram& a, const HueHistogram& b);

/// Circular Gaussian KDE sampled at the 180 bin centers; samples sum to 1
/// (unit bin width, so the curve integrates to 1).
struct FittedCurve {
    std::array<double, kHueBins> samples{};
    double bandwidth = 0.0;
};

FittedCurve fit_curve(const HueHistogram& h, double bandwidth = 4.5);

/// Kolmogorov-Smirnov statistic between two hue distributions on the linear
/// [0, 180) ordering: max |CDF_a - CDF_b| over bin boundaries.
double ks_statistic(const HueHistogram& a, const HueHistogram& b);

struct KsMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;  // symmetric, zero diagonal
};

KsMatrix ks_matrix(const std::vector<HueHistogram>& hs);

/// Inclusive hue-bin bands used by the photo-vs-streetview shift report.
struct HueBand {
    const char* name;
    int lo;
    int hi;
};

inline constexpr HueBand kWarmBand{"warm", 0, 30};
inline constexpr HueBand kGreenBand{"green", 45, 75};
inline constexpr HueBand kBlueBand{"blue", 105, 135};

struct BandShift {
    std::string band;
    int lo = 0;
    int hi = 0;
    double photo_fraction = 0.0;
    double street_fraction = 0.0;
    double delta = 0.0;  // photo - street
    int direction = 0;   // sign of delta
};

struct FacadeShiftReport {
    double ks = 0.0;
    std::array<BandShift, 3> bands;  // warm, green, blue
};

FacadeShiftReport facade_shift_report(const HueHistogram& photo, const HueHistogram& street);

}  // namespace qlens::diststat

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "quarterlens/color.hpp"

namespace qlens::palette {

/// HSV embedded into the color cone: x = s*v*cos(2h deg), y = s*v*sin(2h deg), z = v.
/// Makes hue circularity metrizable; all grays of equal v collapse onto the axis.
struct ConePoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const ConePoint&) const = default;
};

ConePoint embed_cone(color::HsvPixel p);

/// Inverse of embed_cone: h from atan2, s = sqrt(x^2+y^2)/z when z > 0 else 0.
color::HsvPixel cone_to_hsv(const ConePoint& p);

struct PaletteEntry {
    color::HsvPixel center;
    double proportion = 0.0;
    color::CcsCode ccs;
};

struct PaletteResult {
    std::vector<PaletteEntry> entries;  // sorted by proportion descending
    bool degenerate = false;            // fewer distinct points than k
};

struct KmeansOptions {
    int max_iters = 100;
    int restarts = 10;                   // best-of-N reseeded runs, lowest WCSS wins
    std::size_t sample_budget = 250000;  // pixels beyond this are seeded-subsampled
};

/// Best of opt.restarts Lloyd's runs in cone space, each with k-means++
/// seeding; restart sub-seeds derive from the given seed, so the result is
/// deterministic for a fixed (points, k, seed). The RNG stream is built from
/// raw mt19937_64 output only, never from implementation-defined
/// distributions. Ties on WCSS keep the earliest restart.
struct KmeansRun {
    std::vector<ConePoint> centers;
    std::vector<int> assignment;   // per input point
    std::vector<std::size_t> counts;
    int iterations = 0;
    bool degenerate = false;       // centers are the distinct points themselves
};

KmeansRun kmeans_cone(std::span<const ConePoint> points, int k, std::uint64_t seed,
                      const KmeansOptions& opt = {});

/// Within-cluster sum of squared distances for a given clustering.
double wcss(std::span<const ConePoint> points, std::span<const ConePoint> centers,
            std::span<const int> assignment);

/// Top-k dominant colors of an image, k-means in cone space.
PaletteResult kmeans_palette(const color::PixelImage& img, int k = 5, std::uint64_t seed = 0,
                             const KmeansOptions& opt = {});

struct CcsFrequencyEntry {
    color::CcsCode code;
    std::uint64_t pixel_count = 0;
    double fraction = 0.0;
};

/// Exact per-code pixel frequencies, top n by count (ties by ascending code).
/// Never subsamples.
std::vector<CcsFrequencyEntry> ccs_top_n(const color::PixelImage& img, int n = 20);

}  // namespace qlens::palette

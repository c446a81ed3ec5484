#include "quarterlens/palette.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace qlens::palette {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// [0, 1) from raw mt19937_64 output; std::uniform_real_distribution is
// implementation-defined and would break cross-toolchain determinism.
double next_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t next_index(std::mt19937_64& rng, std::size_t n) {
    const auto i = static_cast<std::size_t>(next_double(rng) * static_cast<double>(n));
    return std::min(i, n - 1);
}

double dist2(const ConePoint& a, const ConePoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

struct PointKey {
    double x, y, z;
    bool operator==(const PointKey&) const = default;
};

struct PointKeyHash {
    std::size_t operator()(const PointKey& k) const {
        auto mix = [](std::size_t h, double d) {
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(d));
            std::memcpy(&bits, &d, sizeof(bits));
            h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return h;
        };
        std::size_t h = 0;
        h = mix(h, k.x);
        h = mix(h, k.y);
        h = mix(h, k.z);
        return h;
    }
};

}  // namespace

ConePoint embed_cone(color::HsvPixel p) {
    const double radius = p.s * p.v;
    const double angle = 2.0 * p.h * kDegToRad;
    return {radius * std::cos(angle), radius * std::sin(angle), p.v};
}

color::HsvPixel cone_to_hsv(const ConePoint& p) {
    color::HsvPixel out;
    out.v = std::clamp(p.z, 0.0, 1.0);
    const double radius = std::sqrt(p.x * p.x + p.y * p.y);
    out.s = p.z > 0.0 ? std::min(1.0, radius / p.z) : 0.0;
    if (out.s == 0.0) {
        out.h = 0.0;
        return out;
    }
    double deg = std::atan2(p.y, p.x) / kDegToRad;
    if (deg < 0.0) deg += 360.0;
    out.h = deg * 0.5;
    if (out.h >= 180.0) out.h -= 180.0;
    if (out.h <= 0.0) out.h = 0.0;
    return out;
}

namespace {

KmeansRun lloyd_once(std::span<const ConePoint> points, int k, std::uint64_t seed,
                     int max_iters) {
    const std::size_t n = points.size();
    KmeansRun run;
    std::mt19937_64 rng(seed);

    // k-means++ seeding.
    std::vector<ConePoint> centers;
    centers.reserve(k);
    centers.push_back(points[next_index(rng, n)]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = dist2(points[i], centers[0]);
    while (centers.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (double d : d2) total += d;
        std::size_t chosen = n - 1;
        if (total > 0.0) {
            const double u = next_double(rng) * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cum += d2[i];
                if (u < cum) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = next_index(rng, n);
        }
        centers.push_back(points[chosen]);
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], dist2(points[i], centers.back()));
    }

    // Lloyd's iterations: stop on zero reassignments or the iteration cap.
    std::vector<int> assignment(n, -1);
    std::vector<std::size_t> counts(k, 0);
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = dist2(points[i], centers[0]);
            for (int c = 1; c < k; ++c) {
                const double d = dist2(points[i], centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }
        if (!changed) break;

        std::vector<double> sx(k, 0.0), sy(k, 0.0), sz(k, 0.0);
        counts.assign(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const int c = assignment[i];
            sx[c] += points[i].x;
            sy[c] += points[i].y;
            sz[c] += points[i].z;
            counts[c]++;
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Reseed an empty cluster to the point farthest from its center.
                std::size_t far_i = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = dist2(points[i], centers[assignment[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                centers[c] = points[far_i];
            } else {
                const double inv = 1.0 / static_cast<double>(counts[c]);
                centers[c] = {sx[c] * inv, sy[c] * inv, sz[c] * inv};
            }
        }
    }

    // Final bookkeeping pass in case the cap fired mid-update.
    counts.assign(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        double best_d = dist2(points[i], centers[0]);
        for (int c = 1; c < k; ++c) {
            const double d = dist2(points[i], centers[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        assignment[i] = best;
        counts[best]++;
    }

    run.centers = std::move(centers);
    run.assignment = std::move(assignment);
    run.counts = std::move(counts);
    run.iterations = iter;
    return run;
}

}  // namespace

KmeansRun kmeans_cone(std::span<const ConePoint> points, int k, std::uint64_t seed,
                      const KmeansOptions& opt) {
    if (points.empty()) throw std::invalid_argument("kmeans_cone: no points");
    if (k < 1) throw std::invalid_argument("kmeans_cone: k must be >= 1");

    const std::size_t n = points.size();

    std::unordered_set<PointKey, PointKeyHash> distinct;
    for (const ConePoint& p : points) {
        distinct.insert({p.x, p.y, p.z});
        if (distinct.size() > static_cast<std::size_t>(k)) break;
    }

    if (distinct.size() < static_cast<std::size_t>(k)) {
        // Degenerate palette: one center per distinct point, in first-seen order.
        KmeansRun run;
        run.degenerate = true;
        std::vector<ConePoint> centers;
        std::unordered_set<PointKey, PointKeyHash> seen;
        for (const ConePoint& p : points) {
            if (seen.insert({p.x, p.y, p.z}).second) centers.push_back(p);
        }
        run.centers = std::move(centers);
        run.counts.assign(run.centers.size(), 0);
        run.assignment.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < run.centers.size(); ++c) {
                if (points[i] == run.centers[c]) {
                    run.assignment[i] = static_cast<int>(c);
                    run.counts[c]++;
                    break;
                }
            }
        }
        return run;
    }

    std::mt19937_64 master(seed);
    const int restarts = std::max(1, opt.restarts);
    KmeansRun best;
    double best_w = 0.0;
    for (int r = 0; r < restarts; ++r) {
        KmeansRun run = lloyd_once(points, k, master(), opt.max_iters);
        const double w = wcss(points, run.centers, run.assignment);
        if (r == 0 || w < best_w) {
            best = std::move(run);
            best_w = w;
        }
    }
    return best;
}

double wcss(std::span<const ConePoint> points, std::span<const ConePoint> centers,
            std::span<const int> assignment) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        total += dist2(points[i], centers[assignment[i]]);
    return total;
}

PaletteResult kmeans_palette(const color::PixelImage& img, int k, std::uint64_t seed,
                             const KmeansOptions& opt) {
    if (img.empty()) throw std::invalid_argument("kmeans_palette: empty image");
    if (k < 1) throw std::invalid_argument("kmeans_palette: k must be >= 1");

    std::vector<ConePoint> points;
    points.reserve(img.pixels.size());
    for (const color::RgbPixel& p : img.pixels) points.push_back(embed_cone(color::rgb_to_hsv(p)));

    std::mt19937_64 rng(seed);
    if (opt.sample_budget > 0 && points.size() > opt.sample_budget) {
        // Seeded uniform subsample, kept in row-major order.
        std::vector<std::uint32_t> idx(points.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
        for (std::size_t i = 0; i < opt.sample_budget; ++i) {
            const std::size_t j = i + next_index(rng, idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(opt.sample_budget);
        std::sort(idx.begin(), idx.end());
        std::vector<ConePoint> sampled;
        sampled.reserve(opt.sample_budget);
        for (std::uint32_t i : idx) sampled.push_back(points[i]);
        points = std::move(sampled);
    }

    const KmeansRun run = kmeans_cone(points, k, rng(), opt);

    PaletteResult result;
    result.degenerate = run.degenerate;
    const double n = static_cast<double>(points.size());
    for (std::size_t c = 0; c < run.centers.size(); ++c) {
        PaletteEntry e;
        e.center = cone_to_hsv(run.centers[c]);
        e.proportion = static_cast<double>(run.counts[c]) / n;
        e.ccs = color::quantize_to_ccs(e.center);
        result.entries.push_back(e);
    }
    std::stable_sort(result.entries.begin(), result.entries.end(),
                     [](const PaletteEntry& a, const PaletteEntry& b) {
                         return a.proportion > b.proportion;
                     });
    return result;
}

std::vector<CcsFrequencyEntry> ccs_top_n(const color::PixelImage& img, int n) {
    if (img.empty()) throw std::invalid_argument("ccs_top_n: empty image");
    if (n < 1) throw std::invalid_argument("ccs_top_n: n must be >= 1");

    // 40*5*5 dense counter; code -> flat index.
    std::vector<std::uint64_t> counts(1000, 0);
    for (const color::RgbPixel& p : img.pixels) {
        const color::CcsCode c = color::quantize_to_ccs(color::rgb_to_hsv(p));
        counts[static_cast<std::size_t>(c.hue_level) * 25 + c.sat_level * 5 + c.val_level]++;
    }

    std::vector<CcsFrequencyEntry> entries;
    const double total = static_cast<double>(img.pixels.size());
    for (int flat = 0; flat < 1000; ++flat) {
        if (counts[flat] == 0) continue;
        CcsFrequencyEntry e;
        e.code = {flat / 25, (flat / 5) % 5, flat % 5};
        e.pixel_count = counts[flat];
        e.fraction = static_cast<double>(counts[flat]) / total;
        entries.push_back(e);
    }
    // Count descending; ties by ascending code, which flat order already gives.
    std::stable_sort(entries.begin(), entries.end(),
                     [](const CcsFrequencyEntry& a, const CcsFrequencyEntry& b) {
                         return a.pixel_count > b.pixel_count;
                     });
    if (entries.size() > static_cast<std::size_t>(n)) entries.resize(n);
    return entries;
}

}  // namespace qlens::palette

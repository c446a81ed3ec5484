#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "quarterlens/color.hpp"
#include "quarterlens/palette.hpp"

using namespace qlens;
using palette::ConePoint;

namespace {

color::PixelImage two_color_rows(int rows_a, int rows_b, color::RgbPixel a, color::RgbPixel b) {
    color::PixelImage img(10, rows_a + rows_b);
    for (int y = 0; y < rows_a + rows_b; ++y)
        for (int x = 0; x < 10; ++x) img.at(x, y) = y < rows_a ? a : b;
    return img;
}

}  // namespace

TEST_CASE("cone embedding of the axis-aligned anchors") {
    ConePoint red = palette::embed_cone({0.0, 1.0, 1.0});
    CHECK(red.x == doctest::Approx(1.0));
    CHECK(red.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(red.z == 1.0);

    ConePoint green = palette::embed_cone({45.0, 1.0, 1.0});  // 90 degrees on the full circle
    CHECK(green.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(green.y == doctest::Approx(1.0));
    CHECK(green.z == 1.0);

    ConePoint gray = palette::embed_cone({0.0, 0.0, 0.5});
    CHECK(gray.x == 0.0);
    CHECK(gray.y == 0.0);
    CHECK(gray.z == 0.5);
}

TEST_CASE("cone embedding round-trips chromatic pixels") {
    std::mt19937_64 rng(3);
    auto unit = [&] { return (rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 2000; ++i) {
        color::HsvPixel p{unit() * 180.0, 0.05 + 0.95 * unit(), 0.05 + 0.95 * unit()};
        color::HsvPixel q = palette::cone_to_hsv(palette::embed_cone(p));
        double dh = std::fabs(p.h - q.h);
        dh = std::min(dh, 180.0 - dh);
        CHECK(dh < 1e-9);
        CHECK(q.s == doctest::Approx(p.s).epsilon(1e-9));
        CHECK(q.v == doctest::Approx(p.v).epsilon(1e-9));
    }
}

TEST_CASE("cone apex maps back to black with zero saturation") {
    color::HsvPixel p = palette::cone_to_hsv({0.0, 0.0, 0.0});
    CHECK(p.s == 0.0);
    CHECK(p.v == 0.0);
}

TEST_CASE("k-means separates two pure groups exactly") {
    std::vector<ConePoint> pts;
    for (int i = 0; i < 3; ++i) pts.push_back({1.0, 0.0, 1.0});
    for (int i = 0; i < 7; ++i) pts.push_back({-1.0, 0.0, 1.0});
    palette::KmeansRun run = palette::kmeans_cone(pts, 2, 42);
    REQUIRE(run.centers.size() == 2);
    CHECK_FALSE(run.degenerate);
    CHECK(palette::wcss(pts, run.centers, run.assignment) == doctest::Approx(0.0));
    std::vector<std::size_t> counts = run.counts;
    std::sort(counts.begin(), counts.end());
    CHECK(counts[0] == 3);
    CHECK(counts[1] == 7);
}

TEST_CASE("k-means is reproducible for a fixed seed") {
    std::mt19937_64 rng(5);
    auto unit = [&] { return (rng() >> 11) * 0x1.0p-53; };
    std::vector<ConePoint> pts;
    for (int i = 0; i < 300; ++i) pts.push_back({unit() * 2 - 1, unit() * 2 - 1, unit()});
    palette::KmeansRun a = palette::kmeans_cone(pts, 4, 99);
    palette::KmeansRun b = palette::kmeans_cone(pts, 4, 99);
    CHECK(a.centers == b.centers);
    CHECK(a.assignment == b.assignment);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("every cluster stays populated") {
    std::mt19937_64 rng(6);
    auto unit = [&] { return (rng() >> 11) * 0x1.0p-53; };
    std::vector<ConePoint> pts;
    for (int i = 0; i < 60; ++i) pts.push_back({unit(), unit(), unit()});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        palette::KmeansRun run = palette::kmeans_cone(pts, 5, seed);
        for (std::size_t c : run.counts) CHECK(c > 0);
    }
}

TEST_CASE("fewer distinct points than k yields the degenerate palette") {
    std::vector<ConePoint> pts = {{0.5, 0.0, 1.0}, {-0.5, 0.0, 1.0}, {0.5, 0.0, 1.0}};
    palette::KmeansRun run = palette::kmeans_cone(pts, 3, 0);
    CHECK(run.degenerate);
    REQUIRE(run.centers.size() == 2);  // first-seen order of the distinct points
    CHECK(run.centers[0] == ConePoint{0.5, 0.0, 1.0});
    CHECK(run.centers[1] == ConePoint{-0.5, 0.0, 1.0});
    CHECK(run.assignment == std::vector<int>{0, 1, 0});
}

TEST_CASE("30/70 two-color image recovers exact centers and proportions") {
    color::PixelImage img = two_color_rows(3, 7, {255, 0, 0}, {0, 0, 255});
    palette::PaletteResult res = palette::kmeans_palette(img, 2, 0);
    REQUIRE(res.entries.size() == 2);
    CHECK_FALSE(res.degenerate);
    CHECK(res.entries[0].proportion == doctest::Approx(0.7));
    CHECK(res.entries[1].proportion == doctest::Approx(0.3));
    // Entries are proportion-sorted: blue (70 pixels) first.
    CHECK(res.entries[0].center.h == doctest::Approx(120.0));
    CHECK(res.entries[1].center.h == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(res.entries[0].ccs == color::quantize_to_ccs(res.entries[0].center));
}

TEST_CASE("k above the distinct-color count degrades gracefully") {
    color::PixelImage img = two_color_rows(5, 5, {255, 0, 0}, {0, 0, 255});
    palette::PaletteResult res = palette::kmeans_palette(img, 5, 1);
    CHECK(res.degenerate);
    REQUIRE(res.entries.size() == 2);
    CHECK(res.entries[0].proportion == doctest::Approx(0.5));
    CHECK(res.entries[0].proportion + res.entries[1].proportion == doctest::Approx(1.0));
}

TEST_CASE("palette proportions always sum to one") {
    std::mt19937_64 rng(8);
    color::PixelImage img(12, 12);
    for (auto& p : img.pixels)
        p = {static_cast<std::uint8_t>(rng() % 256), static_cast<std::uint8_t>(rng() % 256),
             static_cast<std::uint8_t>(rng() % 256)};
    for (int k : {1, 3, 5}) {
        palette::PaletteResult res = palette::kmeans_palette(img, k, 7);
        double sum = 0.0;
        double last = 2.0;
        for (const auto& e : res.entries) {
            sum += e.proportion;
            CHECK(e.proportion <= last);  // sorted descending
            last = e.proportion;
        }
        CHECK(sum == doctest::Approx(1.0));
    }
}

TEST_CASE("subsampled clustering stays deterministic") {
    std::mt19937_64 rng(9);
    color::PixelImage img(30, 30);
    for (auto& p : img.pixels)
        p = {static_cast<std::uint8_t>(rng() % 256), static_cast<std::uint8_t>(rng() % 256),
             static_cast<std::uint8_t>(rng() % 256)};
    palette::KmeansOptions opt;
    opt.sample_budget = 100;  // force the subsample path
    palette::PaletteResult a = palette::kmeans_palette(img, 3, 21, opt);
    palette::PaletteResult b = palette::kmeans_palette(img, 3, 21, opt);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].center == b.entries[i].center);
        CHECK(a.entries[i].proportion == b.entries[i].proportion);
    }
}

TEST_CASE("ccs_top_n counts exact pixel frequencies") {
    color::PixelImage img(10, 10);
    for (int i = 0; i < 100; ++i) {
        color::RgbPixel c = i < 50 ? color::RgbPixel{255, 0, 0}
                                   : (i < 80 ? color::RgbPixel{0, 0, 255}
                                             : color::RgbPixel{0, 255, 0});
        img.pixels[i] = c;
    }
    auto top = palette::ccs_top_n(img, 20);
    REQUIRE(top.size() == 3);
    CHECK(top[0].code == color::quantize_to_ccs(color::rgb_to_hsv({255, 0, 0})));
    CHECK(top[0].pixel_count == 50);
    CHECK(top[0].fraction == doctest::Approx(0.5));
    CHECK(top[1].pixel_count == 30);
    CHECK(top[2].pixel_count == 20);
}

TEST_CASE("ccs_top_n breaks count ties by ascending code") {
    color::PixelImage img(10, 2);
    for (int x = 0; x < 10; ++x) {
        img.at(x, 0) = {0, 255, 0};  // GY range, hue level 13
        img.at(x, 1) = {255, 0, 0};  // R0, hue level 0
    }
    auto top = palette::ccs_top_n(img, 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0].code.hue_level == 0);   // red sorts first on equal counts
    CHECK(top[1].code.hue_level == 13);
}

TEST_CASE("ccs_top_n caps at the requested n") {
    std::mt19937_64 rng(10);
    color::PixelImage img(16, 16);
    for (auto& p : img.pixels)
        p = {static_cast<std::uint8_t>(rng() % 256), static_cast<std::uint8_t>(rng() % 256),
             static_cast<std::uint8_t>(rng() % 256)};
    auto top = palette::ccs_top_n(img, 5);
    CHECK(top.size() <= 5);
    for (std::size_t i = 1; i < top.size(); ++i)
        CHECK(top[i - 1].pixel_count >= top[i].pixel_count);
}

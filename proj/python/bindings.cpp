#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "quarterlens/color.hpp"
#include "quarterlens/diststat.hpp"
#include "quarterlens/imageio.hpp"
#include "quarterlens/palette.hpp"
#include "quarterlens/pipeline.hpp"
#include "quarterlens/segstat.hpp"
#include "quarterlens/sentiment.hpp"

namespace py = pybind11;
using namespace qlens;

namespace {

std::uint8_t to_u8(int v, const char* what) {
    if (v < 0 || v > 255) throw std::invalid_argument(std::string(what) + " out of [0, 255]");
    return static_cast<std::uint8_t>(v);
}

diststat::HueHistogram histogram_from_bins(const std::vector<std::uint64_t>& bins) {
    if (bins.size() != diststat::kHueBins)
        throw std::invalid_argument("expected 180 hue bins");
    diststat::HueHistogram h;
    for (int i = 0; i < diststat::kHueBins; ++i) {
        h.bins[i] = bins[i];
        h.total += bins[i];
    }
    return h;
}

py::dict scores_dict(const sentiment::DimensionScores& s) {
    py::dict d;
    d["activities"] = s.activities;
    d["built_environment"] = s.built_environment;
    d["service_facilities"] = s.service_facilities;
    d["business_formats"] = s.business_formats;
    return d;
}

sentiment::LexiconSet lexicon_from(const std::string& path) {
    return path.empty() ? sentiment::parse_lexicon(pipeline::default_lexicon_json())
                        : sentiment::load_lexicon(path);
}

}  // namespace

PYBIND11_MODULE(_quarterlens, m) {
    m.doc() = "Color, segmentation, and review analytics for urban quarters";
    m.attr("__version__") = "0.1.0";

    py::class_<color::PixelImage>(m, "Image")
        .def(py::init<int, int>(), py::arg("width"), py::arg("height"))
        .def(py::init([](int w, int h, const std::vector<std::tuple<int, int, int>>& px) {
                 color::PixelImage img(w, h);
                 if (px.size() != img.size())
                     throw std::invalid_argument("pixel list size does not match width*height");
                 for (std::size_t i = 0; i < px.size(); ++i)
                     img.pixels[i] = {to_u8(std::get<0>(px[i]), "r"), to_u8(std::get<1>(px[i]), "g"),
                                      to_u8(std::get<2>(px[i]), "b")};
                 return img;
             }),
             py::arg("width"), py::arg("height"), py::arg("pixels"))
        .def_readonly("width", &color::PixelImage::width)
        .def_readonly("height", &color::PixelImage::height)
        .def("__len__", &color::PixelImage::size)
        .def("pixel",
             [](const color::PixelImage& img, int x, int y) {
                 if (x < 0 || y < 0 || x >= img.width || y >= img.height)
                     throw std::out_of_range("pixel coordinates out of range");
                 color::RgbPixel p = img.at(x, y);
                 return py::make_tuple(int(p.r), int(p.g), int(p.b));
             },
             py::arg("x"), py::arg("y"))
        .def("pixels", [](const color::PixelImage& img) {
            std::vector<std::tuple<int, int, int>> out;
            out.reserve(img.size());
            for (const auto& p : img.pixels) out.emplace_back(p.r, p.g, p.b);
            return out;
        });

    py::class_<segstat::ClassMask>(m, "Mask")
        .def(py::init([](int w, int h, const std::vector<int>& values) {
                 std::vector<std::uint8_t> idx;
                 idx.reserve(values.size());
                 for (int v : values) {
                     if (v < 0 || v >= segstat::kNumClasses)
                         throw std::invalid_argument("class index out of range");
                     idx.push_back(static_cast<std::uint8_t>(v));
                 }
                 return segstat::ClassMask(w, h, std::move(idx));
             }),
             py::arg("width"), py::arg("height"), py::arg("values"))
        .def_readonly("width", &segstat::ClassMask::width)
        .def_readonly("height", &segstat::ClassMask::height)
        .def("values", [](const segstat::ClassMask& mask) {
            return std::vector<int>(mask.indices.begin(), mask.indices.end());
        });

    m.def("load_image", [](const std::string& p) { return io::load_image(p); }, py::arg("path"));
    m.def("save_png", [](const std::string& p, const color::PixelImage& img) { io::save_png(p, img); },
          py::arg("path"), py::arg("image"));
    m.def("load_mask", [](const std::string& p) { return io::load_mask(p); }, py::arg("path"));
    m.def("save_mask_png",
          [](const std::string& p, const segstat::ClassMask& mask) { io::save_mask_png(p, mask); },
          py::arg("path"), py::arg("mask"));

    m.def("rgb_to_hsv", [](int r, int g, int b) {
        color::HsvPixel p = color::rgb_to_hsv({to_u8(r, "r"), to_u8(g, "g"), to_u8(b, "b")});
        return py::make_tuple(p.h, p.s, p.v);
    });
    m.def("hsv_to_rgb", [](double h, double s, double v) {
        color::RgbPixel p = color::hsv_to_rgb({h, s, v});
        return py::make_tuple(int(p.r), int(p.g), int(p.b));
    });
    m.def("quantize_to_ccs", [](double h, double s, double v) {
        color::CcsCode c = color::quantize_to_ccs({h, s, v});
        return py::make_tuple(c.hue_level, c.sat_level, c.val_level);
    });
    m.def("ccs_label", [](int hue_level, int sat_level, int val_level) {
        if (hue_level < 0 || hue_level > 39 || sat_level < 0 || sat_level > 4 || val_level < 0 ||
            val_level > 4)
            throw std::invalid_argument("CCS levels out of range");
        return color::ccs_label(color::CcsCode{hue_level, sat_level, val_level});
    });
    m.def("hex_rgb", [](int r, int g, int b) {
        return color::hex_rgb({to_u8(r, "r"), to_u8(g, "g"), to_u8(b, "b")});
    });
    m.def("gray_world_correct", &color::gray_world_correct, py::arg("image"));

    m.def(
        "kmeans_palette",
        [](const color::PixelImage& img, int k, std::uint64_t seed) {
            palette::PaletteResult r = palette::kmeans_palette(img, k, seed);
            py::list entries;
            for (const auto& e : r.entries) {
                py::dict d;
                d["hex"] = color::hex_rgb(color::hsv_to_rgb(e.center));
                d["proportion"] = e.proportion;
                d["hsv"] = py::make_tuple(e.center.h, e.center.s, e.center.v);
                d["ccs_name"] = color::ccs_label(e.ccs);
                entries.append(std::move(d));
            }
            py::dict out;
            out["entries"] = std::move(entries);
            out["degenerate"] = r.degenerate;
            return out;
        },
        py::arg("image"), py::arg("k") = 5, py::arg("seed") = 0);

    m.def(
        "ccs_top_n",
        [](const color::PixelImage& img, int n) {
            py::list out;
            for (const auto& e : palette::ccs_top_n(img, n)) {
                py::dict d;
                d["ccs_name"] = color::ccs_label(e.code);
                d["hue_level"] = e.code.hue_level;
                d["sat_level"] = e.code.sat_level;
                d["val_level"] = e.code.val_level;
                d["pixel_count"] = e.pixel_count;
                d["fraction"] = e.fraction;
                out.append(std::move(d));
            }
            return out;
        },
        py::arg("image"), py::arg("n") = 20);

    m.def(
        "hue_histogram",
        [](const color::PixelImage& img) {
            diststat::HueHistogram h = diststat::build_histogram(color::to_hsv(img), "");
            return std::vector<std::uint64_t>(h.bins.begin(), h.bins.end());
        },
        py::arg("image"));
    m.def(
        "ks_statistic",
        [](const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
            return diststat::ks_statistic(histogram_from_bins(a), histogram_from_bins(b));
        },
        py::arg("bins_a"), py::arg("bins_b"));
    m.def(
        "fit_curve",
        [](const std::vector<std::uint64_t>& bins, double bandwidth) {
            diststat::FittedCurve c = diststat::fit_curve(histogram_from_bins(bins), bandwidth);
            return std::vector<double>(c.samples.begin(), c.samples.end());
        },
        py::arg("bins"), py::arg("bandwidth") = 4.5);

    m.def("class_names", [] {
        std::vector<std::string> names;
        for (auto n : segstat::class_names()) names.emplace_back(n);
        return names;
    });
    m.def(
        "class_proportions",
        [](const std::vector<segstat::ClassMask>& masks, const std::string& quarter) {
            segstat::ClassProportions p = segstat::class_proportions(masks, quarter);
            py::dict d;
            d["quarter"] = p.quarter;
            d["counts"] = std::vector<std::uint64_t>(p.counts.begin(), p.counts.end());
            d["total_pixels"] = p.total_pixels;
            d["foreground_pixels"] = p.foreground_pixels;
            d["fractions_defined"] = p.fractions_defined;
            d["of_foreground"] = std::vector<double>(p.of_foreground.begin(), p.of_foreground.end());
            d["of_total"] = std::vector<double>(p.of_total.begin(), p.of_total.end());
            return d;
        },
        py::arg("masks"), py::arg("quarter") = "");

    m.def(
        "score_review",
        [](const std::string& text, const std::string& lexicon_path) {
            return scores_dict(sentiment::score_review(text, lexicon_from(lexicon_path)));
        },
        py::arg("text"), py::arg("lexicon_path") = "");
    m.def("default_lexicon_json", [] { return pipeline::default_lexicon_json(); });

    m.def(
        "run_report",
        [](const std::string& dataset_root, const std::string& out_dir,
           const std::string& config_json) {
            pipeline::RunConfig cfg;
            if (!config_json.empty()) pipeline::apply_config_json(cfg, config_json);
            pipeline::DatasetLayout layout = pipeline::discover(dataset_root);
            pipeline::RunResult r = pipeline::run(layout, cfg, out_dir);
            return std::make_tuple(r.exit_code, r.warnings);
        },
        py::arg("dataset_root"), py::arg("out_dir"), py::arg("config_json") = "",
        py::call_guard<py::gil_scoped_release>());
}

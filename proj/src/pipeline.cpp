#include "quarterlens/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <openssl/evp.h>

#include "json.hpp"
#include "quarterlens/imageio.hpp"

namespace qlens::pipeline {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out(static_cast<std::size_t>(len) * 2, '0');
    for (unsigned int i = 0; i < len; ++i) {
        out[2 * i] = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0xF];
    }
    return out;
}

namespace {

std::string rel_display(const fs::path& p, const fs::path& root) {
    fs::path r = p.lexically_relative(root);
    if (r.empty() || *r.begin() == "..") return p.generic_string();
    return r.generic_string();
}

std::vector<fs::path> sorted_entries(const fs::path& dir, bool dirs) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::string name = e.path().filename().string();
        if (name.empty() || name[0] == '.') continue;
        if (dirs ? e.is_directory() : e.is_regular_file()) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });
    return out;
}

bool is_png_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png";
}

std::vector<fs::path> list_images(const fs::path& dir, const fs::path& root, bool masks,
                                  std::vector<std::string>& warnings) {
    std::vector<fs::path> files;
    std::unordered_set<std::string> stems;
    for (const auto& p : sorted_entries(dir, false)) {
        if (masks ? !is_png_extension(p) : !io::supported_image_extension(p)) {
            warnings.push_back((masks ? "mask files must be PNG; ignoring "
                                      : "ignoring unsupported file ") +
                               rel_display(p, root));
            continue;
        }
        std::string stem = p.stem().string();
        if (!stems.insert(stem).second) {
            warnings.push_back("duplicate stem '" + stem + "' under " + rel_display(dir, root) +
                               "; ignoring " + p.filename().string());
            continue;
        }
        files.push_back(p);
    }
    return files;
}

std::map<std::string, fs::path> by_stem(const std::vector<fs::path>& files) {
    std::map<std::string, fs::path> m;
    for (const auto& p : files) m[p.stem().string()] = p;
    return m;
}

}  // namespace

DatasetLayout discover(const fs::path& root) {
    if (!fs::exists(root)) throw std::runtime_error("dataset root does not exist: " + root.string());
    if (!fs::is_directory(root))
        throw std::runtime_error("dataset root is not a directory: " + root.string());

    DatasetLayout layout;
    layout.root = root;

    std::vector<fs::path> quarter_dirs = sorted_entries(root, true);
    if (quarter_dirs.empty()) {
        layout.warnings.push_back("dataset root contains no quarter directories: " +
                                  root.string());
        return layout;
    }

    for (const fs::path& qdir : quarter_dirs) {
        QuarterInputs q;
        q.name = qdir.filename().string();
        q.dir = qdir;
        q.photos = list_images(qdir / "photos", root, false, layout.warnings);
        q.streetviews = list_images(qdir / "streetviews", root, false, layout.warnings);
        std::vector<fs::path> masks = list_images(qdir / "masks", root, true, layout.warnings);

        const auto photo_stems = by_stem(q.photos);
        const auto street_stems = by_stem(q.streetviews);
        for (const fs::path& mask : masks) {
            std::string stem = mask.stem().string();
            auto pit = photo_stems.find(stem);
            auto sit = street_stems.find(stem);
            if (pit != photo_stems.end() && sit != street_stems.end()) {
                layout.warnings.push_back("mask " + rel_display(mask, root) +
                                          " matches both a photo and a streetview; ignoring it");
                continue;
            }
            if (pit == photo_stems.end() && sit == street_stems.end()) {
                layout.warnings.push_back("orphan mask (no image shares its stem): " +
                                          rel_display(mask, root));
                continue;
            }
            const fs::path& image = pit != photo_stems.end() ? pit->second : sit->second;
            auto mask_info = io::probe_image(mask);
            auto image_info = io::probe_image(image);
            if (!mask_info || !image_info) {
                layout.warnings.push_back("cannot read image header of " +
                                          rel_display(!mask_info ? mask : image, root) +
                                          "; ignoring mask " + rel_display(mask, root));
                continue;
            }
            if (mask_info->width != image_info->width || mask_info->height != image_info->height) {
                layout.warnings.push_back(
                    "mask " + rel_display(mask, root) + " (" + std::to_string(mask_info->width) +
                    "x" + std::to_string(mask_info->height) + ") does not match " +
                    rel_display(image, root) + " (" + std::to_string(image_info->width) + "x" +
                    std::to_string(image_info->height) + "); pair excluded");
                continue;
            }
            (pit != photo_stems.end() ? q.photo_pairs : q.street_pairs).push_back({image, mask});
        }

        fs::path reviews = qdir / "reviews.jsonl";
        if (fs::is_regular_file(reviews)) q.reviews = reviews;

        if (q.photos.empty() && q.streetviews.empty() && q.reviews.empty()) {
            layout.warnings.push_back("quarter '" + q.name + "' has no readable inputs; skipped");
            continue;
        }
        layout.quarters.push_back(std::move(q));
    }
    return layout;
}

void validate(const RunConfig& cfg) {
    if (cfg.k < 1) throw std::invalid_argument("config: k must be >= 1");
    if (cfg.top_n < 1) throw std::invalid_argument("config: top_n must be >= 1");
    if (!(cfg.bandwidth > 0.0)) throw std::invalid_argument("config: bandwidth must be > 0");
    if (!(cfg.heatmap_threshold > 0.0 && cfg.heatmap_threshold < 1.0))
        throw std::invalid_argument("config: heatmap_threshold must be in (0, 1)");
    if (cfg.jobs < 0) throw std::invalid_argument("config: jobs must be >= 0");
    for (int c : cfg.facade_classes)
        if (c <= segstat::kBackground || c >= segstat::kNumClasses)
            throw std::invalid_argument("config: facade class index out of range: " +
                                        std::to_string(c));
}

void apply_config_json(RunConfig& cfg, const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config: top-level JSON object expected");
    try {
        for (const auto& [key, val] : doc.items()) {
            if (key == "analyses") {
                cfg.palette = cfg.histogram = cfg.ks = cfg.segstat = cfg.facade = cfg.sentiment =
                    false;
                for (const auto& name_json : val) {
                    std::string name = name_json.get<std::string>();
                    if (name == "palette") cfg.palette = true;
                    else if (name == "histogram") cfg.histogram = true;
                    else if (name == "ks") cfg.ks = true;
                    else if (name == "segstat") cfg.segstat = true;
                    else if (name == "facade") cfg.facade = true;
                    else if (name == "sentiment") cfg.sentiment = true;
                    else throw std::invalid_argument("config: unknown analysis '" + name + "'");
                }
            } else if (key == "k") {
                cfg.k = val.get<int>();
            } else if (key == "top_n") {
                cfg.top_n = val.get<int>();
            } else if (key == "bandwidth") {
                cfg.bandwidth = val.get<double>();
            } else if (key == "heatmap_threshold") {
                cfg.heatmap_threshold = val.get<double>();
            } else if (key == "facade_classes") {
                std::vector<int> classes;
                for (const auto& name_json : val) {
                    std::string name = name_json.get<std::string>();
                    int idx = segstat::class_index(name);
                    if (idx <= segstat::kBackground)
                        throw std::invalid_argument("config: unknown facade class '" + name + "'");
                    classes.push_back(idx);
                }
                cfg.facade_classes = std::move(classes);
            } else if (key == "seed") {
                cfg.seed = val.get<std::uint64_t>();
            } else if (key == "white_balance") {
                if (val.is_boolean()) {
                    cfg.white_balance_photos = cfg.white_balance_streetviews = val.get<bool>();
                } else {
                    cfg.white_balance_photos = val.value("photos", cfg.white_balance_photos);
                    cfg.white_balance_streetviews =
                        val.value("streetviews", cfg.white_balance_streetviews);
                }
            } else if (key == "lexicon") {
                cfg.lexicon_path = val.get<std::string>();
            } else if (key == "jobs") {
                cfg.jobs = val.get<int>();
            } else {
                throw std::invalid_argument("config: unknown key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    validate(cfg);
}

RunConfig load_config(const fs::path& path, RunConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_config_json(base, buf.str());
    return base;
}

namespace {

void parallel_tasks(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t threads;
    if (jobs > 0) {
        threads = static_cast<std::size_t>(jobs);
    } else {
        unsigned hw = std::thread::hardware_concurrency();
        threads = std::clamp<std::size_t>(hw, 1, 8);
    }
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& th : pool) th.join();
}

std::string read_file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read back " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Writes artifacts under the output root and records manifest entries.
class Emitter {
public:
    Emitter(fs::path out, std::vector<ManifestEntry>& manifest)
        : out_(std::move(out)), manifest_(manifest) {}

    void text(const std::string& rel, const std::string& content) {
        fs::path p = prepare(rel);
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.close();
        if (!f) throw std::runtime_error("short write to " + p.string());
        manifest_.push_back({rel, sha256_hex(content), content.size()});
    }

    void png(const std::string& rel, const color::PixelImage& img) {
        fs::path p = prepare(rel);
        io::save_png(p, img);
        std::string bytes = read_file_bytes(p);
        manifest_.push_back({rel, sha256_hex(bytes), bytes.size()});
    }

private:
    fs::path prepare(const std::string& rel) {
        fs::path p = out_ / fs::path(rel);
        fs::create_directories(p.parent_path());
        return p;
    }

    fs::path out_;
    std::vector<ManifestEntry>& manifest_;
};

std::vector<sentiment::ReviewRecord> parse_reviews(const fs::path& file, const std::string& quarter,
                                                   const fs::path& root,
                                                   std::vector<std::string>& warnings) {
    std::vector<sentiment::ReviewRecord> records;
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        warnings.push_back("cannot open " + rel_display(file, root) + "; skipping its reviews");
        return records;
    }
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string where = rel_display(file, root) + ":" + std::to_string(lineno);
        nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            warnings.push_back("skipping malformed review line " + where);
            continue;
        }
        if (!doc.contains("text") || !doc.at("text").is_string()) {
            warnings.push_back("review line " + where + " has no text field; skipped");
            continue;
        }
        sentiment::ReviewRecord rec;
        rec.quarter = quarter;
        rec.text = doc.at("text").get<std::string>();
        if (doc.contains("id") && doc.at("id").is_string()) {
            rec.id = doc.at("id").get<std::string>();
        } else if (doc.contains("id") && doc.at("id").is_number_integer()) {
            rec.id = std::to_string(doc.at("id").get<long long>());
        } else {
            if (doc.contains("id"))
                warnings.push_back("review line " + where + " has a non-string id; synthesized");
            rec.id = quarter + "-" + std::to_string(lineno);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

struct ImageTask {
    fs::path image;
    fs::path mask;  // empty when unpaired
    bool street = false;
};

struct ImageOutcome {
    std::vector<std::string> warnings;
    bool decoded = false;
    bool has_palette = false;
    palette::PaletteResult pal;
    std::vector<palette::CcsFrequencyEntry> top;
    bool has_hist = false;
    diststat::HueHistogram hist;
    bool has_mask = false;
    segstat::ClassMask mask;
    bool has_facade = false;
    diststat::HueHistogram facade_hist;
};

ordered_json config_echo(const RunConfig& cfg, const std::vector<int>& facade_classes) {
    ordered_json c;
    ordered_json analyses = ordered_json::array();
    if (cfg.palette) analyses.push_back("palette");
    if (cfg.histogram) analyses.push_back("histogram");
    if (cfg.ks) analyses.push_back("ks");
    if (cfg.segstat) analyses.push_back("segstat");
    if (cfg.facade) analyses.push_back("facade");
    if (cfg.sentiment) analyses.push_back("sentiment");
    c["analyses"] = std::move(analyses);
    c["k"] = cfg.k;
    c["top_n"] = cfg.top_n;
    c["bandwidth"] = cfg.bandwidth;
    c["heatmap_threshold"] = cfg.heatmap_threshold;
    ordered_json fc = ordered_json::array();
    for (int idx : facade_classes) fc.push_back(std::string(segstat::class_names()[idx]));
    c["facade_classes"] = std::move(fc);
    c["seed"] = cfg.seed;
    ordered_json wb;
    wb["photos"] = cfg.white_balance_photos;
    wb["streetviews"] = cfg.white_balance_streetviews;
    c["white_balance"] = std::move(wb);
    c["lexicon"] = cfg.lexicon_path.empty() ? std::string("builtin")
                                            : cfg.lexicon_path.generic_string();
    return c;
}

}  // namespace

RunResult run(const DatasetLayout& layout, const RunConfig& cfg, const fs::path& out_dir) {
    validate(cfg);

    RunResult res;
    res.warnings = layout.warnings;

    const std::vector<int> facade_classes =
        cfg.facade_classes.empty() ? segstat::default_facade_classes() : cfg.facade_classes;

    sentiment::LexiconSet lexicon;
    if (cfg.sentiment)
        lexicon = cfg.lexicon_path.empty() ? sentiment::parse_lexicon(default_lexicon_json())
                                           : sentiment::load_lexicon(cfg.lexicon_path);

    fs::create_directories(out_dir);
    if (!fs::is_directory(out_dir))
        throw std::runtime_error("cannot create output directory: " + out_dir.string());
    Emitter emit(out_dir, res.manifest);

    std::size_t palette_images = 0;
    std::size_t histogram_quarters = 0;
    std::size_t segstat_quarters = 0;
    std::size_t facade_quarters = 0;

    std::vector<diststat::HueHistogram> ks_inputs;  // per-quarter photo histograms
    std::vector<segstat::ClassProportions> heatmap_inputs;
    std::vector<sentiment::ReviewRecord> all_reviews;

    const bool need_photo_hist = cfg.histogram || cfg.ks;

    for (const QuarterInputs& q : layout.quarters) {
        QuarterReport rep;
        rep.name = q.name;
        const std::string qp = "quarters/" + q.name + "/";

        std::map<std::string, fs::path> photo_mask, street_mask;
        for (const auto& pr : q.photo_pairs) photo_mask[pr.image.stem().string()] = pr.mask;
        for (const auto& pr : q.street_pairs) street_mask[pr.image.stem().string()] = pr.mask;

        std::vector<ImageTask> tasks;
        for (const fs::path& p : q.photos) {
            auto it = photo_mask.find(p.stem().string());
            tasks.push_back({p, it == photo_mask.end() ? fs::path() : it->second, false});
        }
        for (const fs::path& p : q.streetviews) {
            auto it = street_mask.find(p.stem().string());
            tasks.push_back({p, it == street_mask.end() ? fs::path() : it->second, true});
        }

        std::vector<ImageOutcome> outcomes(tasks.size());
        const bool need_masks = cfg.segstat || cfg.facade;
        parallel_tasks(tasks.size(), cfg.jobs, [&](std::size_t i) {
            const ImageTask& t = tasks[i];
            ImageOutcome& o = outcomes[i];
            const bool want_hist = t.street ? cfg.histogram : need_photo_hist;
            const bool want_palette = !t.street && cfg.palette;
            const bool want_facade = cfg.facade && !t.mask.empty();
            const bool want_image = want_hist || want_palette || want_facade;

            if (need_masks && !t.mask.empty()) {
                try {
                    o.mask = io::load_mask(t.mask);
                    o.has_mask = true;
                } catch (const std::exception& e) {
                    o.warnings.push_back("skipping mask " + rel_display(t.mask, layout.root) +
                                         ": " + e.what());
                }
            }
            if (!want_image) return;
            color::PixelImage img;
            try {
                img = io::load_image(t.image);
            } catch (const std::exception& e) {
                o.warnings.push_back("skipping " + rel_display(t.image, layout.root) + ": " +
                                     e.what());
                return;
            }
            if (img.empty()) {
                o.warnings.push_back("skipping empty image " + rel_display(t.image, layout.root));
                return;
            }
            const bool wb = t.street ? cfg.white_balance_streetviews : cfg.white_balance_photos;
            if (wb) img = color::gray_world_correct(img);
            o.decoded = true;
            if (want_palette) {
                o.pal = palette::kmeans_palette(img, cfg.k, cfg.seed);
                o.top = palette::ccs_top_n(img, cfg.top_n);
                o.has_palette = true;
            }
            if (want_hist) {
                o.hist = diststat::build_histogram(color::to_hsv(img), "");
                o.has_hist = true;
            }
            if (want_facade && o.has_mask) {
                try {
                    auto px = segstat::facade_pixels(img, o.mask, facade_classes);
                    if (!px.empty()) {
                        o.facade_hist = diststat::build_histogram(px, "");
                        o.has_facade = true;
                    }
                } catch (const std::exception& e) {
                    o.warnings.push_back("facade pixels of " + rel_display(t.image, layout.root) +
                                         ": " + e.what());
                }
            }
        });

        diststat::HueHistogram photo_hist, street_hist, photo_facade, street_facade;
        photo_hist.label = q.name;
        street_hist.label = q.name + " streetviews";
        photo_facade.label = q.name + " photo facades";
        street_facade.label = q.name + " streetview facades";
        std::vector<segstat::ClassMask> masks;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            ImageOutcome& o = outcomes[i];
            for (auto& w : o.warnings) res.warnings.push_back(std::move(w));
            if (o.has_palette) {
                std::string stem = tasks[i].image.stem().string();
                rep.top_colors.push_back({stem, std::move(o.top)});
                rep.palettes.emplace_back(std::move(stem), std::move(o.pal));
                ++palette_images;
            }
            if (o.has_hist) diststat::accumulate(tasks[i].street ? street_hist : photo_hist, o.hist);
            if (o.has_facade)
                diststat::accumulate(tasks[i].street ? street_facade : photo_facade, o.facade_hist);
            if (o.has_mask) masks.push_back(std::move(o.mask));
        }

        if (cfg.palette) {
            for (const auto& [stem, pal] : rep.palettes) {
                emit.text(qp + "palette/" + stem + ".json", report::palette_json(stem, pal));
                emit.png(qp + "palette/" + stem + "_swatch.png", report::palette_swatch(pal));
            }
            if (!rep.top_colors.empty())
                emit.text(qp + "top_colors.csv", report::ccs_top_csv(rep.top_colors));
        }

        bool quarter_has_hist = false;
        if (photo_hist.total > 0 && need_photo_hist) {
            rep.photo_hist = photo_hist;
            if (cfg.ks) ks_inputs.push_back(photo_hist);
            if (cfg.histogram) {
                rep.photo_curve = diststat::fit_curve(photo_hist, cfg.bandwidth);
                emit.text(qp + "hue_histogram.csv", report::histogram_csv(photo_hist));
                emit.text(qp + "hue_curve.csv", report::curve_csv(*rep.photo_curve));
                emit.text(qp + "hue_plotdata.json",
                          report::hue_plotdata_json(photo_hist, &*rep.photo_curve));
                quarter_has_hist = true;
            }
        }
        if (street_hist.total > 0 && cfg.histogram) {
            rep.street_hist = street_hist;
            rep.street_curve = diststat::fit_curve(street_hist, cfg.bandwidth);
            emit.text(qp + "streetview_histogram.csv", report::histogram_csv(street_hist));
            emit.text(qp + "streetview_curve.csv", report::curve_csv(*rep.street_curve));
            emit.text(qp + "streetview_plotdata.json",
                      report::hue_plotdata_json(street_hist, &*rep.street_curve));
            quarter_has_hist = true;
        }
        if (quarter_has_hist) ++histogram_quarters;

        if (cfg.segstat) {
            if (!masks.empty()) {
                rep.proportions = segstat::class_proportions(masks, q.name);
                emit.text(qp + "class_proportions.csv",
                          report::class_proportions_csv(*rep.proportions));
                heatmap_inputs.push_back(*rep.proportions);
                ++segstat_quarters;
            } else {
                res.warnings.push_back("quarter '" + q.name +
                                       "' has no usable masks; segstats skipped");
            }
        }

        if (cfg.facade) {
            if (photo_facade.total > 0 && street_facade.total > 0) {
                rep.facade_shift = diststat::facade_shift_report(photo_facade, street_facade);
                report::NamedShift named{q.name, *rep.facade_shift};
                emit.text(qp + "facade_shift.json", report::facade_shift_json(named));
                res.facade_shifts.push_back(std::move(named));
                ++facade_quarters;
            } else {
                res.warnings.push_back("quarter '" + q.name +
                                       "' lacks masked photos or masked streetviews; "
                                       "facade comparison skipped");
            }
        }

        if (cfg.sentiment && !q.reviews.empty()) {
            auto records = parse_reviews(q.reviews, q.name, layout.root, res.warnings);
            all_reviews.insert(all_reviews.end(), std::make_move_iterator(records.begin()),
                               std::make_move_iterator(records.end()));
        }

        res.quarters.push_back(std::move(rep));
    }

    if (cfg.sentiment && !all_reviews.empty()) {
        sentiment::BatchResult batch = sentiment::score_batch(all_reviews, lexicon);
        for (QuarterReport& rep : res.quarters) {
            auto mit = batch.quarter_means.find(rep.name);
            if (mit == batch.quarter_means.end()) continue;
            rep.sentiment_means = mit->second;
            rep.review_count = batch.quarter_counts.at(rep.name);
            rep.has_sentiment = true;

            std::vector<sentiment::ScoredReview> rows;
            for (std::size_t i = 0; i < all_reviews.size(); ++i)
                if (all_reviews[i].quarter == rep.name) rows.push_back(batch.per_review[i]);
            const std::string qp = "quarters/" + rep.name + "/";
            emit.text(qp + "sentiment_scores.csv", report::sentiment_scores_csv(rows));
            emit.text(qp + "sentiment_summary.json",
                      report::sentiment_summary_json(rep.name, rep.sentiment_means,
                                                     rep.review_count));
        }
    }

    if (cfg.ks) {
        if (ks_inputs.size() >= 2) {
            res.ks = diststat::ks_matrix(ks_inputs);
            emit.text("ks_matrix.json", report::ks_matrix_json(*res.ks));
            emit.text("ks_pairs.csv", report::ks_pairs_csv(*res.ks));
        } else {
            res.warnings.push_back(
                "ks-matrix needs at least two quarters with decodable photos; skipped");
        }
    }

    if (cfg.segstat && !heatmap_inputs.empty()) {
        res.heatmap = segstat::heatmap_table(heatmap_inputs, cfg.heatmap_threshold);
        emit.text("heatmap.csv", report::heatmap_csv(*res.heatmap, false));
        emit.text("heatmap_filtered.csv", report::heatmap_csv(*res.heatmap, true));
        emit.text("heatmap.json", report::heatmap_json(*res.heatmap));
    }

    if (!res.facade_shifts.empty())
        emit.text("facade_shift.csv", report::facade_shift_csv(res.facade_shifts));

    struct InputCheck {
        bool enabled;
        const char* name;
        bool satisfied;
    };
    const InputCheck checks[] = {
        {cfg.palette, "palette", palette_images > 0},
        {cfg.histogram, "histogram", histogram_quarters > 0},
        {cfg.ks, "ks-matrix", res.ks.has_value()},
        {cfg.segstat, "segstats", segstat_quarters > 0},
        {cfg.facade, "facade-compare", facade_quarters > 0},
        {cfg.sentiment, "sentiment", !all_reviews.empty()},
    };
    bool failed = false;
    for (const InputCheck& c : checks) {
        if (!c.enabled || c.satisfied) continue;
        res.warnings.push_back(std::string("analysis '") + c.name + "' had no valid inputs");
        if (cfg.strict_inputs) failed = true;
    }

    if (!res.warnings.empty()) {
        std::string txt;
        for (const auto& w : res.warnings) {
            txt += w;
            txt += '\n';
        }
        emit.text("warnings.txt", txt);
    }

    std::sort(res.manifest.begin(), res.manifest.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    ordered_json manifest;
    manifest["tool"] = "quarterlens";
    manifest["seed"] = cfg.seed;
    manifest["config"] = config_echo(cfg, facade_classes);
    manifest["quarters"] = [&] {
        ordered_json names = ordered_json::array();
        for (const auto& q : layout.quarters) names.push_back(q.name);
        return names;
    }();
    manifest["warning_count"] = res.warnings.size();
    ordered_json files = ordered_json::array();
    for (const ManifestEntry& e : res.manifest) {
        ordered_json f;
        f["path"] = e.path;
        f["sha256"] = e.sha256;
        f["bytes"] = e.bytes;
        files.push_back(std::move(f));
    }
    manifest["files"] = std::move(files);
    {
        std::ofstream f(out_dir / "manifest.json", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write manifest.json");
        std::string text = manifest.dump(2) + "\n";
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
    }

    res.exit_code = failed ? 1 : (res.warnings.empty() ? 0 : 2);
    return res;
}

}  // namespace qlens::pipeline

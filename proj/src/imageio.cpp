#include "quarterlens/imageio.hpp"

#include <algorithm>
#include <cstdio>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <jpeglib.h>
#include <png.h>

namespace qlens::io {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

bool is_png_ext(const std::string& ext) { return ext == ".png"; }
bool is_jpeg_ext(const std::string& ext) { return ext == ".jpg" || ext == ".jpeg"; }

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

// ---------------------------------------------------------------------------
// PNG via the libpng simplified API
// ---------------------------------------------------------------------------

color::PixelImage load_png(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        fail(path, std::string("PNG read failed: ") + image.message);

    image.format = PNG_FORMAT_RGBA;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        png_image_free(&image);
        fail(path, std::string("PNG decode failed: ") + image.message);
    }

    color::PixelImage out(static_cast<int>(image.width), static_cast<int>(image.height));
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        out.pixels[i] = {buffer[i * 4], buffer[i * 4 + 1], buffer[i * 4 + 2]};  // alpha dropped
    }
    return out;
}

segstat::ClassMask load_mask_png(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        fail(path, std::string("PNG read failed: ") + image.message);

    if (image.format != PNG_FORMAT_GRAY) {
        png_image_free(&image);
        fail(path, "mask must be an 8-bit single-channel PNG");
    }

    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        png_image_free(&image);
        fail(path, std::string("PNG decode failed: ") + image.message);
    }

    for (std::uint8_t v : buffer) {
        if (v >= segstat::kNumClasses)
            fail(path, "mask index " + std::to_string(v) + " outside taxonomy range [0, 22]");
    }
    return segstat::ClassMask(static_cast<int>(image.width), static_cast<int>(image.height),
                              std::move(buffer));
}

// ---------------------------------------------------------------------------
// JPEG via libjpeg
// ---------------------------------------------------------------------------

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

struct FileHandle {
    std::FILE* fp = nullptr;
    explicit FileHandle(const std::filesystem::path& path, const char* mode)
        : fp(std::fopen(path.string().c_str(), mode)) {}
    ~FileHandle() {
        if (fp) std::fclose(fp);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

color::PixelImage load_jpeg(const std::filesystem::path& path) {
    FileHandle file(path, "rb");
    if (!file.fp) fail(path, "cannot open file");

    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        fail(path, std::string("JPEG decode failed: ") + err.message);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.fp);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    color::PixelImage out(static_cast<int>(cinfo.output_width),
                          static_cast<int>(cinfo.output_height));
    std::vector<std::uint8_t> row(static_cast<std::size_t>(cinfo.output_width) * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        const int y = static_cast<int>(cinfo.output_scanline);
        JSAMPROW rows[1] = {row.data()};
        jpeg_read_scanlines(&cinfo, rows, 1);
        for (int x = 0; x < out.width; ++x)
            out.at(x, y) = {row[x * 3], row[x * 3 + 1], row[x * 3 + 2]};
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return out;
}

}  // namespace

bool supported_image_extension(const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    return is_png_ext(ext) || is_jpeg_ext(ext);
}

std::optional<ImageInfo> probe_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    unsigned char head[32];
    in.read(reinterpret_cast<char*>(head), sizeof(head));
    const auto got = static_cast<std::size_t>(in.gcount());

    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (got >= 24 && std::memcmp(head, png_sig, 8) == 0) {
        // IHDR width/height, big-endian at offsets 16 and 20.
        auto be32 = [&head](int off) {
            return (static_cast<int>(head[off]) << 24) | (head[off + 1] << 16) |
                   (head[off + 2] << 8) | head[off + 3];
        };
        return ImageInfo{be32(16), be32(20)};
    }

    if (got >= 4 && head[0] == 0xFF && head[1] == 0xD8) {
        // Walk JPEG markers until a start-of-frame.
        in.clear();
        in.seekg(2);
        while (in) {
            int byte = in.get();
            if (byte != 0xFF) continue;
            int marker = in.get();
            while (marker == 0xFF) marker = in.get();
            if (marker == EOF) break;
            if (marker == 0xD8 || (marker >= 0xD0 && marker <= 0xD7) || marker == 0x01) continue;
            unsigned char lenbuf[2];
            in.read(reinterpret_cast<char*>(lenbuf), 2);
            if (!in) break;
            const int seg_len = (lenbuf[0] << 8) | lenbuf[1];
            const bool sof = (marker >= 0xC0 && marker <= 0xCF) && marker != 0xC4 &&
                             marker != 0xC8 && marker != 0xCC;
            if (sof) {
                unsigned char frame[5];
                in.read(reinterpret_cast<char*>(frame), 5);
                if (!in) break;
                const int h = (frame[1] << 8) | frame[2];
                const int w = (frame[3] << 8) | frame[4];
                return ImageInfo{w, h};
            }
            in.seekg(seg_len - 2, std::ios::cur);
        }
        return std::nullopt;
    }
    return std::nullopt;
}

color::PixelImage load_image(const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    if (is_png_ext(ext)) return load_png(path);
    if (is_jpeg_ext(ext)) return load_jpeg(path);
    fail(path, "unsupported image format '" + ext + "' (expected .png, .jpg, or .jpeg)");
}

segstat::ClassMask load_mask(const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    if (!is_png_ext(ext)) fail(path, "mask files must be PNG index rasters");
    return load_mask_png(path);
}

void save_png(const std::filesystem::path& path, const color::PixelImage& img) {
    if (img.empty()) throw std::invalid_argument("save_png: empty image");
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_RGB;

    std::vector<std::uint8_t> buffer(static_cast<std::size_t>(img.width) * img.height * 3);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        buffer[i * 3] = img.pixels[i].r;
        buffer[i * 3 + 1] = img.pixels[i].g;
        buffer[i * 3 + 2] = img.pixels[i].b;
    }
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, buffer.data(), 0, nullptr))
        fail(path, std::string("PNG write failed: ") + image.message);
}

void save_mask_png(const std::filesystem::path& path, const segstat::ClassMask& mask) {
    if (mask.indices.empty()) throw std::invalid_argument("save_mask_png: empty mask");
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(mask.width);
    image.height = static_cast<png_uint_32>(mask.height);
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, mask.indices.data(), 0,
                                 nullptr))
        fail(path, std::string("PNG write failed: ") + image.message);
}

void save_jpeg(const std::filesystem::path& path, const color::PixelImage& img, int quality) {
    if (img.empty()) throw std::invalid_argument("save_jpeg: empty image");
    FileHandle file(path, "wb");
    if (!file.fp) fail(path, "cannot open file for writing");

    jpeg_compress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        fail(path, std::string("JPEG write failed: ") + err.message);
    }

    jpeg_create_compress(&cinfo);
    jpeg_stdio_dest(&cinfo, file.fp);
    cinfo.image_width = static_cast<JDIMENSION>(img.width);
    cinfo.image_height = static_cast<JDIMENSION>(img.height);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);

    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * 3);
    while (cinfo.next_scanline < cinfo.image_height) {
        const int y = static_cast<int>(cinfo.next_scanline);
        for (int x = 0; x < img.width; ++x) {
            const color::RgbPixel& p = img.at(x, y);
            row[x * 3] = p.r;
            row[x * 3 + 1] = p.g;
            row[x * 3 + 2] = p.b;
        }
        JSAMPROW rows[1] = {row.data()};
        jpeg_write_scanlines(&cinfo, rows, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
}

}  // namespace qlens::io

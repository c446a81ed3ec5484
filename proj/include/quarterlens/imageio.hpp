#pragma once

#include <filesystem>
#include <optional>

#include "quarterlens/color.hpp"
#include "quarterlens/segstat.hpp"

namespace qlens::io {

struct ImageInfo {
    int width = 0;
    int height = 0;
};

/// Dimensions from PNG/JPEG headers without a full decode; nullopt when the
/// file is missing or not one of the two formats.
std::optional<ImageInfo> probe_image(const std::filesystem::path& path);

/// True for .png/.jpg/.jpeg (case-insensitive).
bool supported_image_extension(const std::filesystem::path& path);

/// Decode a PNG or JPEG photo to RGB. Throws std::runtime_error on decode
/// failure or an unsupported extension.
color::PixelImage load_image(const std::filesystem::path& path);

/// Decode a class-index mask: must be an 8-bit single-channel PNG with every
/// index inside the taxonomy.
segstat::ClassMask load_mask(const std::filesystem::path& path);

void save_png(const std::filesystem::path& path, const color::PixelImage& img);
void save_mask_png(const std::filesystem::path& path, const segstat::ClassMask& mask);
void save_jpeg(const std::filesystem::path& path, const color::PixelImage& img, int quality = 90);

}  // namespace qlens::io

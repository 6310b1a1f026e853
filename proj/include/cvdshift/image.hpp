#pragma once

#include "cvdshift/colorspace.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvdshift {

class ImageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 8-bit sRGB raster, row-major, interleaved RGB or RGBA.
class Image {
public:
    Image() = default;
    /// Throws ImageError for non-positive dimensions or a channel count other than 3 or 4.
    Image(int width, int height, int channels = 3);
    Image(int width, int height, SRgb8 fill);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool has_alpha() const { return channels_ == 4; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_); }
    bool empty() const { return pixel_count() == 0; }

    SRgb8 pixel(int x, int y) const;
    void set_pixel(int x, int y, SRgb8 c);
    std::uint8_t alpha(int x, int y) const;

    std::span<std::uint8_t> bytes() { return data_; }
    std::span<const std::uint8_t> bytes() const { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t offset(int x, int y) const;

    int width_ = 0;
    int height_ = 0;
    int channels_ = 3;
    std::vector<std::uint8_t> data_;
};

std::vector<std::uint8_t> encode_png(const Image& img);
Image decode_png(std::span<const std::uint8_t> bytes, const std::string& source = "<memory>");

std::vector<std::uint8_t> encode_ppm(const Image& img);
Image decode_ppm(std::span<const std::uint8_t> bytes, const std::string& source = "<memory>");

/// Dispatches on the file signature (PNG or binary PPM).
Image read_image(const std::filesystem::path& path);

/// Format from the extension: `.ppm` writes P6, anything else PNG. PPM drops alpha.
void write_image(const Image& img, const std::filesystem::path& path);

}  // namespace cvdshift
